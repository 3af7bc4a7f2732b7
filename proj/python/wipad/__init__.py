"""OFDM padding covert-channel toolkit for IEEE 802.11a/g networks.

Thin wrapper over the compiled extension: rate-table and pad-capacity math,
the DCF saturation-throughput model with its Markov-chain oracle, the
discrete-event simulator, the padding codec and the sweep engine.
"""

try:
    from ._wipad import *  # noqa: F401,F403  (installed package layout)
    from ._wipad import __doc__ as _doc
except ImportError:  # build-tree layout: extension sits next to the package
    from _wipad import *  # noqa: F401,F403
    from _wipad import __doc__ as _doc

__all__ = [name for name in dir() if not name.startswith("_")]
