#include "wipad/dcf_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wipad {

namespace {

// Clamps floating-point probability excursions; anything beyond the
// tolerance is a real arithmetic bug, not rounding.
double clamp_prob(double p) {
    constexpr double tol = 1e-15;
    if (p < 0.0) {
        if (p < -tol) throw std::logic_error("probability below 0 beyond tolerance");
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + tol) throw std::logic_error("probability above 1 beyond tolerance");
        return 1.0;
    }
    return p;
}

double pow_int(double base, int exp) {
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

int DcfParams::max_doubling_stage() const {
    const std::int64_t w_first = static_cast<std::int64_t>(cw_min) + 1;
    const std::int64_t w_last = static_cast<std::int64_t>(cw_max) + 1;
    int stage = 0;
    std::int64_t w = w_first;
    while (w < w_last && stage <= 30) {
        w *= 2;
        ++stage;
    }
    if (w != w_last) {
        throw std::invalid_argument(
            "DcfParams: cw_max + 1 must equal 2^k (cw_min + 1) for integer k >= 0");
    }
    return stage;
}

void DcfParams::validate() const {
    if (n < 1) throw std::invalid_argument("DcfParams: n must be >= 1");
    if (cw_min < 0 || cw_max < cw_min || cw_max >= (1 << 26)) {
        throw std::invalid_argument("DcfParams: need 0 <= cw_min <= cw_max < 2^26");
    }
    (void)max_doubling_stage();  // checks the power-of-two relation
    if (retry_limit < 0) throw std::invalid_argument("DcfParams: retry_limit must be >= 0");
    if (sigma_us <= 0 || t_sifs_us <= 0 || t_difs_us <= 0 || t_eifs_us <= 0 ||
        t_phyhdr_us <= 0) {
        throw std::invalid_argument("DcfParams: durations must be positive");
    }
    if (delta_us < 0 || t_signal_ext_us < 0) {
        throw std::invalid_argument("DcfParams: delays must be non-negative");
    }
    if (ack_octets < 0) throw std::invalid_argument("DcfParams: ack_octets must be >= 0");
    if (mac_overhead_octets < 0 || frame_octets <= mac_overhead_octets) {
        throw std::invalid_argument("DcfParams: frame_octets must exceed MAC overhead");
    }
    if (bit_error_rate < 0.0 || bit_error_rate > 1.0) {
        throw std::invalid_argument("DcfParams: bit_error_rate must be in [0, 1]");
    }
}

std::vector<int> cw_schedule(const DcfParams& params) {
    const int m_prime = params.max_doubling_stage();
    std::vector<int> schedule(static_cast<std::size_t>(params.retry_limit) + 1);
    for (int i = 0; i <= params.retry_limit; ++i) {
        schedule[static_cast<std::size_t>(i)] =
            params.w0() * (1 << std::min(i, m_prime));
    }
    return schedule;
}

double tau_given(double p_f, double p_coll, const DcfParams& params) {
    if (p_f < 0.0 || p_f > 1.0) throw std::invalid_argument("tau_given: p_f out of [0, 1]");
    if (p_coll < 0.0 || p_coll >= 1.0) {
        throw std::invalid_argument("tau_given: p_coll out of [0, 1)");
    }
    const auto windows = cw_schedule(params);
    const double freeze = 2.0 * (1.0 - p_coll);
    double num = 0.0;
    double den = 0.0;
    double pf_pow = 1.0;
    for (const int w : windows) {
        num += pf_pow;
        den += pf_pow * (1.0 + (w - 1) / freeze);
        pf_pow *= p_f;
    }
    return num / den;
}

double tau_closed_form(double p_f, double p_coll, const DcfParams& params) {
    const int m = params.retry_limit;
    const int m_prime = params.max_doubling_stage();
    const double w0 = params.w0();

    const double one_m_pf = 1.0 - p_f;
    const double one_m_2pf = 1.0 - 2.0 * p_f;
    const double stage_sum = (1.0 - pow_int(p_f, m + 1)) / one_m_pf;

    double head;  // sum of p_f^i W_i minus stage_sum, times (1-2p_f)(1-p_f)
    if (m <= m_prime) {
        head = one_m_pf * w0 * (1.0 - pow_int(2.0 * p_f, m + 1)) -
               one_m_2pf * (1.0 - pow_int(p_f, m + 1));
    } else {
        head = one_m_pf * w0 * (1.0 - pow_int(2.0 * p_f, m_prime + 1)) +
               one_m_2pf * pow_int(2.0, m_prime) * w0 * pow_int(p_f, m_prime + 1) *
                   (1.0 - pow_int(p_f, m - m_prime)) -
               one_m_2pf * (1.0 - pow_int(p_f, m + 1));
    }
    const double b00_inv =
        head / (2.0 * one_m_2pf * one_m_pf * (1.0 - p_coll)) + stage_sum;
    return stage_sum / b00_inv;
}

ErrorProbs error_probs(double bit_error_rate, std::int64_t data_bits,
                       std::int64_t ack_bits) {
    if (bit_error_rate < 0.0 || bit_error_rate > 1.0) {
        throw std::invalid_argument("error_probs: bit_error_rate out of [0, 1]");
    }
    if (data_bits < 0 || ack_bits < 0) {
        throw std::invalid_argument("error_probs: bit counts must be non-negative");
    }
    const auto frame_error = [bit_error_rate](std::int64_t bits) {
        if (bits == 0 || bit_error_rate == 0.0) return 0.0;
        if (bit_error_rate == 1.0) return 1.0;
        // 1 - (1 - p_b)^bits without cancellation for small p_b
        return -std::expm1(static_cast<double>(bits) * std::log1p(-bit_error_rate));
    };
    const double p_data = frame_error(data_bits);
    const double p_ack = frame_error(ack_bits);
    return ErrorProbs{p_data, p_ack,
                      clamp_prob(1.0 - (1.0 - p_data) * (1.0 - p_ack))};
}

FixedPoint solve_fixed_point(const DcfParams& params) {
    params.validate();
    const double p_e =
        error_probs(params.bit_error_rate, 8LL * params.frame_octets,
                    8LL * params.ack_octets)
            .any;

    if (params.n == 1) {
        const double tau = tau_given(p_e, 0.0, params);
        return FixedPoint{tau, 0.0, p_e, 0, 0.0};
    }

    const auto residual_at = [&](double tau) {
        const double p_coll = -std::expm1((params.n - 1) * std::log1p(-tau));
        // At trial points deep in the bracket p_coll can round to 1; the
        // freeze term then diverges and the chain's tau limit is 0.
        if (p_coll >= 1.0) return -tau;
        const double p_f = 1.0 - (1.0 - p_coll) * (1.0 - p_e);
        return tau_given(p_f, p_coll, params) - tau;
    };

    constexpr int kMaxIterations = 200;
    constexpr double kWidthTol = 1e-16;
    constexpr double kResidualTol = 1e-13;

    double lo = 0.0;  // residual_at(0+) > 0: an idle network still transmits
    double hi = 1.0 - 1e-12;
    double tau = 0.5 * (lo + hi);
    double res = residual_at(tau);
    int it = 0;
    while (++it <= kMaxIterations) {
        if (std::abs(res) < kResidualTol || (hi - lo) < kWidthTol) break;
        if (res > 0.0) {
            lo = tau;
        } else {
            hi = tau;
        }
        tau = 0.5 * (lo + hi);
        res = residual_at(tau);
    }
    if (std::abs(res) > 1e-12) {
        throw SolverError("fixed point did not converge: residual " +
                              std::to_string(res),
                          std::abs(res));
    }
    const double p_coll = -std::expm1((params.n - 1) * std::log1p(-tau));
    const double p_f = 1.0 - (1.0 - p_coll) * (1.0 - p_e);
    return FixedPoint{tau, p_coll, p_f, it, std::abs(res)};
}

StateDurations state_durations(const DcfParams& params, const PhyRate& rate) {
    const double t_data =
        airtime_us(params.frame_octets, rate, params.t_signal_ext_us);
    const double t_ack = airtime_us(params.ack_octets, rate, params.t_signal_ext_us);
    const double t_success = 2.0 * params.t_phyhdr_us + t_data + 2.0 * params.delta_us +
                             params.t_sifs_us + t_ack + params.t_difs_us;
    return StateDurations{
        .idle_us = params.sigma_us,
        .success_us = t_success,
        .collision_us = params.t_phyhdr_us + t_data + params.delta_us + params.t_eifs_us,
        .data_error_us =
            params.t_phyhdr_us + params.delta_us + t_data + params.t_eifs_us,
        .ack_error_us = t_success,
    };
}

StateProbs state_probs(double tau, int n, double p_e_data, double p_e_ack) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("state_probs: tau out of [0, 1]");
    if (n < 1) throw std::invalid_argument("state_probs: n must be >= 1");
    const double idle = pow_int(1.0 - tau, n);
    const double single = n * tau * pow_int(1.0 - tau, n - 1);
    return StateProbs{
        .idle = idle,
        .success = single * (1.0 - p_e_data) * (1.0 - p_e_ack),
        .collision = clamp_prob(1.0 - idle - single),
        .data_error = single * p_e_data,
        .ack_error = single * (1.0 - p_e_data) * p_e_ack,
    };
}

ModelSolution throughputs(const DcfParams& params, const PhyRate& rate) {
    const auto errors = error_probs(params.bit_error_rate, 8LL * params.frame_octets,
                                    8LL * params.ack_octets);
    const auto fp = solve_fixed_point(params);

    ChannelStateSet states{
        .t = state_durations(params, rate),
        .p = state_probs(fp.tau, params.n, errors.data, errors.ack),
    };

    const double payload_bits = static_cast<double>(params.payload_bits());
    const double s = states.p.success * payload_bits / states.mean_duration_us();

    const std::int64_t c_data = pad_capacity_bits(params.frame_octets, rate);
    const std::int64_t c_ack = pad_capacity_bits(params.ack_octets, rate);
    const double per_sender = s / (params.n * payload_bits);

    return ModelSolution{
        .tau = fp.tau,
        .p_coll = fp.p_coll,
        .p_f = fp.p_f,
        .p_e = errors.any,
        .p_e_data = errors.data,
        .p_e_ack = errors.ack,
        .states = states,
        .s_mbps = s,
        .s_data_mbps = static_cast<double>(c_data) * per_sender,
        .s_ack_mbps = static_cast<double>(c_ack) * per_sender,
        .c_data_bits = c_data,
        .c_ack_bits = c_ack,
        .iterations = fp.iterations,
        .residual = fp.residual,
    };
}

}  // namespace wipad
