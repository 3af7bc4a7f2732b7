#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wipad/phy.hpp"

namespace wipad {

/// Fixed-point solver failed to converge.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Default EIFS: SIFS + ACK transmission at the 6 Mbit/s base rate
/// (PLCP preamble/header plus one OFDM symbol) + DIFS.
inline constexpr double kDefaultEifsUs = 10.0 + (20.0 + 24.0) + 28.0;

/// MAC/PHY timing and backoff parameters of one saturated DCF scenario.
/// Defaults are the ERP-OFDM ("g"-only) constants: slot 9 us, SIFS 10 us,
/// DIFS 28 us, PLCP preamble+header 20 us, CWmin 15, CWmax 1023, retry
/// limit 7. Propagation delay defaults to 1 us.
struct DcfParams {
    int n = 1;                      // contending stations
    int cw_min = 15;                // W_0 = cw_min + 1
    int cw_max = 1023;              // caps window doubling
    int retry_limit = 7;            // maximum backoff stage m
    double sigma_us = 9.0;          // idle slot
    double delta_us = 1.0;          // propagation delay
    double t_sifs_us = 10.0;
    double t_difs_us = 28.0;
    double t_eifs_us = kDefaultEifsUs;
    double t_phyhdr_us = 20.0;      // PLCP preamble + header
    double t_signal_ext_us = 0.0;   // optional trailing extension per frame
    int frame_octets = 214;         // data frame length L, MAC header + FCS included
    int mac_overhead_octets = 28;   // 24-octet MAC header + 4-octet FCS
    int ack_octets = kAckOctets;
    double bit_error_rate = 0.0;

    int w0() const { return cw_min + 1; }

    /// Backoff stage above which the window stops doubling (m'), from
    /// cw_max + 1 = 2^{m'} (cw_min + 1).
    int max_doubling_stage() const;

    std::int64_t payload_bits() const {
        return 8LL * (frame_octets - mac_overhead_octets);
    }

    /// Throws std::invalid_argument on any violated constraint.
    void validate() const;
};

/// Contention windows W_0..W_m: doubling up to stage m', flat afterwards.
std::vector<int> cw_schedule(const DcfParams& params);

/// Per-slot transmission probability given failure and collision
/// probabilities, evaluated as the ratio of geometric sums
///   tau = sum_i p_f^i / sum_i p_f^i (1 + (W_i - 1) / (2 (1 - p_coll))).
/// Exact for all p_f in [0, 1]; no removable singularity at p_f = 1/2.
double tau_given(double p_f, double p_coll, const DcfParams& params);

/// Same quantity through the closed-form branch expressions (window
/// doubling capped or not). Kept as an independent evaluation route for
/// tests; undefined at p_f = 1/2 and p_f = 1 where the branch formulas
/// have removable singularities.
double tau_closed_form(double p_f, double p_coll, const DcfParams& params);

struct ErrorProbs {
    double data;  // frame error probability of a data frame
    double ack;   // frame error probability of an ACK
    double any;   // either corrupted
};

/// Frame error probabilities from an i.i.d. bit error rate. Bit counts are
/// whole frame sizes in bits (MAC header and FCS included). Evaluated in
/// the log domain so small rates do not underflow.
ErrorProbs error_probs(double bit_error_rate, std::int64_t data_bits,
                       std::int64_t ack_bits);

struct FixedPoint {
    double tau;
    double p_coll;
    double p_f;
    int iterations;
    double residual;
};

/// Solves the coupled system
///   tau    = tau_given(p_f, p_coll)
///   p_coll = 1 - (1 - tau)^(n-1)
///   p_f    = 1 - (1 - p_coll)(1 - p_e)
/// by bisection on tau; the composed map is monotone. n = 1 is closed
/// form (p_coll = 0). Throws SolverError if the residual cannot be driven
/// below tolerance within the iteration cap.
FixedPoint solve_fixed_point(const DcfParams& params);

struct StateDurations {
    double idle_us;
    double success_us;
    double collision_us;
    double data_error_us;
    double ack_error_us;
};

struct StateProbs {
    double idle;
    double success;
    double collision;
    double data_error;
    double ack_error;

    double sum() const { return idle + success + collision + data_error + ack_error; }
};

struct ChannelStateSet {
    StateDurations t;
    StateProbs p;

    double mean_duration_us() const {
        return t.idle_us * p.idle + t.success_us * p.success +
               t.collision_us * p.collision + t.data_error_us * p.data_error +
               t.ack_error_us * p.ack_error;
    }
};

/// Durations of the five channel states. An ACK error occupies the channel
/// exactly as long as a success.
StateDurations state_durations(const DcfParams& params, const PhyRate& rate);

/// Probabilities of the five channel states for a slot where each of n
/// stations transmits independently with probability tau.
StateProbs state_probs(double tau, int n, double p_e_data, double p_e_ack);

struct ModelSolution {
    double tau;
    double p_coll;
    double p_f;
    double p_e;
    double p_e_data;
    double p_e_ack;
    ChannelStateSet states;
    double s_mbps;       // aggregate saturation throughput
    double s_data_mbps;  // covert throughput carried by data-frame padding
    double s_ack_mbps;   // covert throughput carried by ACK padding
    std::int64_t c_data_bits;
    std::int64_t c_ack_bits;
    int iterations;
    double residual;
};

/// Full analytical evaluation of one scenario: fixed point, channel
/// states, aggregate throughput S = P_S L_pld / E[T] and the covert
/// throughputs S_DATA = C_DATA S / (n L_pld), S_ACK = C_ACK S / (n L_pld).
/// All throughputs are in Mbit/s (= bits per microsecond).
ModelSolution throughputs(const DcfParams& params, const PhyRate& rate);

}  // namespace wipad
