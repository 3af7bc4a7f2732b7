#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wipad/backoff_chain.hpp"
#include "wipad/dcf_model.hpp"
#include "wipad/dcf_sim.hpp"
#include "wipad/phy.hpp"
#include "wipad/scenario.hpp"
#include "wipad/steg_codec.hpp"

namespace py = pybind11;
using namespace wipad;

namespace {

std::vector<std::uint8_t> to_byte_vector(const py::bytes& data) {
    const std::string_view view = data;
    return {view.begin(), view.end()};
}

py::bytes to_py_bytes(const std::vector<std::uint8_t>& data) {
    return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

}  // namespace

PYBIND11_MODULE(_wipad, m) {
    m.doc() = "OFDM padding covert channel toolkit: capacity math, DCF "
              "saturation model, discrete-event simulator and bit-level codec";

    py::register_exception<CapacityError>(m, "CapacityError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<ScenarioError>(m, "ScenarioError");

    py::enum_<Modulation>(m, "Modulation")
        .value("BPSK", Modulation::Bpsk)
        .value("QPSK", Modulation::Qpsk)
        .value("QAM16", Modulation::Qam16)
        .value("QAM64", Modulation::Qam64);

    py::class_<PhyRate>(m, "PhyRate")
        .def_readonly("rate_mbps", &PhyRate::rate_mbps)
        .def_readonly("modulation", &PhyRate::modulation)
        .def_readonly("code_rate_num", &PhyRate::code_rate_num)
        .def_readonly("code_rate_den", &PhyRate::code_rate_den)
        .def_readonly("bits_per_symbol", &PhyRate::bits_per_symbol)
        .def("__eq__", [](const PhyRate& a, const PhyRate& b) { return a == b; })
        .def("__repr__", [](const PhyRate& r) {
            std::ostringstream out;
            out << "PhyRate(" << r.rate_mbps << " Mbit/s, " << to_string(r.modulation)
                << " " << r.code_rate_num << "/" << r.code_rate_den << ", "
                << r.bits_per_symbol << " bits/symbol)";
            return out.str();
        });

    m.def("rate_table", [] {
        const auto table = rate_table();
        return std::vector<PhyRate>(table.begin(), table.end());
    });
    m.def("find_rate", &find_rate, py::arg("rate_mbps"));
    m.def("symbols_for", &symbols_for, py::arg("total_bits"), py::arg("rate"));
    m.def("airtime_us", &airtime_us, py::arg("frame_octets"), py::arg("rate"),
          py::arg("signal_extension_us") = 0.0);
    m.def("pad_capacity_bits", &pad_capacity_bits, py::arg("frame_octets"),
          py::arg("rate"));
    m.def("max_pad_frame_length", &max_pad_frame_length, py::arg("alpha"));

    py::class_<PpduDataField>(m, "PpduDataField")
        .def_readonly("service_bits", &PpduDataField::service_bits)
        .def_readonly("tail_bits", &PpduDataField::tail_bits)
        .def_readonly("psdu_bits", &PpduDataField::psdu_bits)
        .def_readonly("n_symbols", &PpduDataField::n_symbols)
        .def_readonly("pad_bits", &PpduDataField::pad_bits)
        .def("total_bits", &PpduDataField::total_bits);
    m.def("ppdu_layout", &ppdu_layout, py::arg("frame_octets"), py::arg("rate"));

    py::class_<DcfParams>(m, "DcfParams")
        .def(py::init<>())
        .def_readwrite("n", &DcfParams::n)
        .def_readwrite("cw_min", &DcfParams::cw_min)
        .def_readwrite("cw_max", &DcfParams::cw_max)
        .def_readwrite("retry_limit", &DcfParams::retry_limit)
        .def_readwrite("sigma_us", &DcfParams::sigma_us)
        .def_readwrite("delta_us", &DcfParams::delta_us)
        .def_readwrite("t_sifs_us", &DcfParams::t_sifs_us)
        .def_readwrite("t_difs_us", &DcfParams::t_difs_us)
        .def_readwrite("t_eifs_us", &DcfParams::t_eifs_us)
        .def_readwrite("t_phyhdr_us", &DcfParams::t_phyhdr_us)
        .def_readwrite("t_signal_ext_us", &DcfParams::t_signal_ext_us)
        .def_readwrite("frame_octets", &DcfParams::frame_octets)
        .def_readwrite("mac_overhead_octets", &DcfParams::mac_overhead_octets)
        .def_readwrite("ack_octets", &DcfParams::ack_octets)
        .def_readwrite("bit_error_rate", &DcfParams::bit_error_rate)
        .def("w0", &DcfParams::w0)
        .def("max_doubling_stage", &DcfParams::max_doubling_stage)
        .def("payload_bits", &DcfParams::payload_bits)
        .def("validate", &DcfParams::validate);

    m.def("cw_schedule", &cw_schedule, py::arg("params"));
    m.def("tau_given", &tau_given, py::arg("p_f"), py::arg("p_coll"), py::arg("params"));
    m.def("tau_closed_form", &tau_closed_form, py::arg("p_f"), py::arg("p_coll"),
          py::arg("params"));

    py::class_<ErrorProbs>(m, "ErrorProbs")
        .def_readonly("data", &ErrorProbs::data)
        .def_readonly("ack", &ErrorProbs::ack)
        .def_readonly("any", &ErrorProbs::any);
    m.def("error_probs", &error_probs, py::arg("bit_error_rate"),
          py::arg("data_bits"), py::arg("ack_bits"));

    py::class_<FixedPoint>(m, "FixedPoint")
        .def_readonly("tau", &FixedPoint::tau)
        .def_readonly("p_coll", &FixedPoint::p_coll)
        .def_readonly("p_f", &FixedPoint::p_f)
        .def_readonly("iterations", &FixedPoint::iterations)
        .def_readonly("residual", &FixedPoint::residual);
    m.def("solve_fixed_point", &solve_fixed_point, py::arg("params"));

    py::class_<StateDurations>(m, "StateDurations")
        .def_readonly("idle_us", &StateDurations::idle_us)
        .def_readonly("success_us", &StateDurations::success_us)
        .def_readonly("collision_us", &StateDurations::collision_us)
        .def_readonly("data_error_us", &StateDurations::data_error_us)
        .def_readonly("ack_error_us", &StateDurations::ack_error_us);
    py::class_<StateProbs>(m, "StateProbs")
        .def_readonly("idle", &StateProbs::idle)
        .def_readonly("success", &StateProbs::success)
        .def_readonly("collision", &StateProbs::collision)
        .def_readonly("data_error", &StateProbs::data_error)
        .def_readonly("ack_error", &StateProbs::ack_error)
        .def("sum", &StateProbs::sum);
    py::class_<ChannelStateSet>(m, "ChannelStateSet")
        .def_readonly("t", &ChannelStateSet::t)
        .def_readonly("p", &ChannelStateSet::p)
        .def("mean_duration_us", &ChannelStateSet::mean_duration_us);
    m.def("state_durations", &state_durations, py::arg("params"), py::arg("rate"));
    m.def("state_probs", &state_probs, py::arg("tau"), py::arg("n"),
          py::arg("p_e_data"), py::arg("p_e_ack"));

    py::class_<ModelSolution>(m, "ModelSolution")
        .def_readonly("tau", &ModelSolution::tau)
        .def_readonly("p_coll", &ModelSolution::p_coll)
        .def_readonly("p_f", &ModelSolution::p_f)
        .def_readonly("p_e", &ModelSolution::p_e)
        .def_readonly("p_e_data", &ModelSolution::p_e_data)
        .def_readonly("p_e_ack", &ModelSolution::p_e_ack)
        .def_readonly("states", &ModelSolution::states)
        .def_readonly("s_mbps", &ModelSolution::s_mbps)
        .def_readonly("s_data_mbps", &ModelSolution::s_data_mbps)
        .def_readonly("s_ack_mbps", &ModelSolution::s_ack_mbps)
        .def_readonly("c_data_bits", &ModelSolution::c_data_bits)
        .def_readonly("c_ack_bits", &ModelSolution::c_ack_bits)
        .def_readonly("iterations", &ModelSolution::iterations)
        .def_readonly("residual", &ModelSolution::residual);
    m.def("throughputs", &throughputs, py::arg("params"), py::arg("rate"));

    py::class_<BackoffChainOracle>(m, "BackoffChainOracle")
        .def("window_schedule", &BackoffChainOracle::window_schedule)
        .def("state_count", &BackoffChainOracle::state_count)
        .def("stationary", &BackoffChainOracle::stationary, py::arg("stage"),
             py::arg("timer"))
        .def("transition", &BackoffChainOracle::transition, py::arg("from_state"),
             py::arg("to_state"))
        .def("row_sum", &BackoffChainOracle::row_sum, py::arg("from_state"))
        .def("tx_probability", &BackoffChainOracle::tx_probability);
    m.def("stationary_oracle", &stationary_oracle, py::arg("p_f"), py::arg("p_coll"),
          py::arg("params"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("params", &SimConfig::params)
        .def_readwrite("rate", &SimConfig::rate)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("horizon_events", &SimConfig::horizon_events)
        .def_readwrite("warmup_events", &SimConfig::warmup_events)
        .def_readwrite("batches", &SimConfig::batches)
        .def("validate", &SimConfig::validate);
    py::class_<SimStateCounts>(m, "SimStateCounts")
        .def_readonly("idle", &SimStateCounts::idle)
        .def_readonly("success", &SimStateCounts::success)
        .def_readonly("collision", &SimStateCounts::collision)
        .def_readonly("data_error", &SimStateCounts::data_error)
        .def_readonly("ack_error", &SimStateCounts::ack_error)
        .def("total", &SimStateCounts::total);
    py::class_<SimReport>(m, "SimReport")
        .def_readonly("seed", &SimReport::seed)
        .def_readonly("elapsed_us", &SimReport::elapsed_us)
        .def_readonly("counts", &SimReport::counts)
        .def_readonly("payload_bits_delivered", &SimReport::payload_bits_delivered)
        .def_readonly("covert_bits_data", &SimReport::covert_bits_data)
        .def_readonly("covert_bits_ack", &SimReport::covert_bits_ack)
        .def_readonly("frames_dropped", &SimReport::frames_dropped)
        .def_readonly("s_mbps", &SimReport::s_mbps)
        .def_readonly("s_data_mbps", &SimReport::s_data_mbps)
        .def_readonly("s_ack_mbps", &SimReport::s_ack_mbps)
        .def_readonly("observed_tau", &SimReport::observed_tau)
        .def_readonly("observed_p_coll", &SimReport::observed_p_coll)
        .def_readonly("ci_halfwidth_s", &SimReport::ci_halfwidth_s);
    m.def("run_sim", &run, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<BitString>(m, "BitString")
        .def(py::init<>())
        .def_static(
            "from_bytes",
            [](const py::bytes& data) {
                return BitString::from_bytes(to_byte_vector(data));
            },
            py::arg("data"))
        .def_static(
            "from_packed",
            [](const py::bytes& data, std::size_t nbits) {
                return BitString::from_packed(to_byte_vector(data), nbits);
            },
            py::arg("data"), py::arg("nbits"))
        .def("push_back", &BitString::push_back, py::arg("bit"))
        .def("append", &BitString::append, py::arg("other"))
        .def("bit", &BitString::bit, py::arg("index"))
        .def("any", &BitString::any)
        .def("slice", &BitString::slice, py::arg("pos"), py::arg("len"))
        .def("packed", [](const BitString& bs) { return to_py_bytes(bs.packed()); })
        .def("to_bytes", [](const BitString& bs) { return to_py_bytes(bs.to_bytes()); })
        .def("__len__", &BitString::size)
        .def("__eq__", [](const BitString& a, const BitString& b) { return a == b; });

    py::class_<FrameBits>(m, "FrameBits")
        .def_readonly("rate", &FrameBits::rate)
        .def_property_readonly(
            "psdu", [](const FrameBits& f) { return to_py_bytes(f.psdu); })
        .def_readonly("pad", &FrameBits::pad)
        .def("total_bits", &FrameBits::total_bits)
        .def("n_symbols", &FrameBits::n_symbols)
        .def("to_bit_layout", &FrameBits::to_bit_layout);

    m.def(
        "build_frame",
        [](const py::bytes& psdu, const PhyRate& rate, const BitString& covert) {
            return build_frame(to_byte_vector(psdu), rate, covert);
        },
        py::arg("psdu"), py::arg("rate"), py::arg("covert_bits") = BitString{});
    m.def("extract", &extract, py::arg("frame"), py::arg("rate"),
          py::arg("covert_len_bits"));
    m.def("zero_pad_check", &zero_pad_check, py::arg("frame"));
    m.def(
        "chunk_message",
        [](const py::bytes& payload, const std::vector<std::int64_t>& capacities) {
            return chunk_message(to_byte_vector(payload), capacities);
        },
        py::arg("payload"), py::arg("capacities"));
    m.def(
        "reassemble",
        [](const std::vector<BitString>& chunks) {
            return to_py_bytes(reassemble(chunks));
        },
        py::arg("chunks"));

    py::enum_<Engine>(m, "Engine")
        .value("MODEL", Engine::Model)
        .value("SIM", Engine::Sim)
        .value("BOTH", Engine::Both);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("n_list", &Scenario::n_list)
        .def_readwrite("ber_list", &Scenario::ber_list)
        .def_readwrite("frame_octets_list", &Scenario::frame_octets_list)
        .def_readwrite("rate_list", &Scenario::rate_list)
        .def_readwrite("base", &Scenario::base)
        .def_readwrite("engine", &Scenario::engine)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("sim_events", &Scenario::sim_events)
        .def_readwrite("sim_warmup", &Scenario::sim_warmup)
        .def_readwrite("sim_batches", &Scenario::sim_batches)
        .def("validate", &Scenario::validate);
    m.def("parse_scenario_text", &parse_scenario_text, py::arg("text"),
          py::arg("name_hint") = "scenario");
    m.def("parse_scenario_file", &parse_scenario_file, py::arg("path"));

    py::class_<ResultRow>(m, "ResultRow")
        .def_readonly("scenario", &ResultRow::scenario)
        .def_readonly("engine", &ResultRow::engine)
        .def_readonly("n", &ResultRow::n)
        .def_readonly("frame_octets", &ResultRow::frame_octets)
        .def_readonly("rate_mbps", &ResultRow::rate_mbps)
        .def_readonly("ber", &ResultRow::ber)
        .def_readonly("tau", &ResultRow::tau)
        .def_readonly("p_coll", &ResultRow::p_coll)
        .def_readonly("p_f", &ResultRow::p_f)
        .def_readonly("s_mbps", &ResultRow::s_mbps)
        .def_readonly("s_data_kbps", &ResultRow::s_data_kbps)
        .def_readonly("s_ack_kbps", &ResultRow::s_ack_kbps)
        .def_readonly("c_data_bits", &ResultRow::c_data_bits)
        .def_readonly("c_ack_bits", &ResultRow::c_ack_bits)
        .def_readonly("ci_halfwidth", &ResultRow::ci_halfwidth)
        .def_readonly("rel_gap_s", &ResultRow::rel_gap_s);
    m.def("run_sweep", &run_sweep, py::arg("scenario"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("render_csv", &render_csv, py::arg("rows"), py::arg("with_gap_column"));
}
