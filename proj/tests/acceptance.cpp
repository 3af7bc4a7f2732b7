// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wipad/backoff_chain.hpp"
#include "wipad/dcf_model.hpp"
#include "wipad/dcf_sim.hpp"
#include "wipad/phy.hpp"
#include "wipad/steg_codec.hpp"

using namespace wipad;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s  %2d  %s%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 1. Pad capacities of the reference frames, exact integer equality.
void criterion_capacities() {
    const bool ok = pad_capacity_bits(214, *find_rate(54)) == 210 &&
                    pad_capacity_bits(14, *find_rate(54)) == 82 &&
                    pad_capacity_bits(14, *find_rate(24)) == 58 &&
                    pad_capacity_bits(14, *find_rate(36)) == 10;
    report(1, "pad capacities 210/82/58/10", ok);
}

// 2-4. Peak covert throughputs at n=1, BER=0, L=214, R=54.
void criterion_peak_throughputs() {
    DcfParams params;
    const auto sol = throughputs(params, *find_rate(54));
    report(2, "peak data-pad throughput in [1.06, 1.18] Mbit/s",
           sol.s_data_mbps >= 1.06 && sol.s_data_mbps <= 1.18,
           "S_DATA = " + fmt(sol.s_data_mbps));
    report(3, "peak ACK-pad throughput in [0.42, 0.46] Mbit/s",
           sol.s_ack_mbps >= 0.42 && sol.s_ack_mbps <= 0.46,
           "S_ACK = " + fmt(sol.s_ack_mbps));
    const double combined = sol.s_data_mbps + sol.s_ack_mbps;
    report(4, "combined covert channel >= 1.50 Mbit/s", combined >= 1.50,
           "S_DATA + S_ACK = " + fmt(combined));
}

// 5. Curve shapes: monotone decline in n, BER and L; the 24/36 ACK inversion.
void criterion_curve_shapes() {
    const PhyRate r54 = *find_rate(54);
    bool ok = true;
    std::string detail;

    // data-pad throughput falls with BER for fixed n and with n for fixed BER
    const std::vector<double> bers{0.0, 1e-5, 1e-4};
    std::vector<std::vector<double>> s_data(bers.size());
    for (std::size_t b = 0; b < bers.size(); ++b) {
        for (int n = 1; n <= 10; ++n) {
            DcfParams p;
            p.n = n;
            p.bit_error_rate = bers[b];
            s_data[b].push_back(throughputs(p, r54).s_data_mbps);
        }
        for (int n = 1; n < 10; ++n) {
            if (s_data[b][static_cast<std::size_t>(n)] >=
                s_data[b][static_cast<std::size_t>(n - 1)]) {
                ok = false;
                detail = "not decreasing in n at BER " + fmt(bers[b]);
            }
        }
    }
    for (int n = 0; n < 10; ++n) {
        if (!(s_data[0][static_cast<std::size_t>(n)] > s_data[1][static_cast<std::size_t>(n)] &&
              s_data[1][static_cast<std::size_t>(n)] > s_data[2][static_cast<std::size_t>(n)])) {
            ok = false;
            detail = "not decreasing in BER at n " + std::to_string(n + 1);
        }
    }

    // falls with frame length at every BER
    for (const double ber : bers) {
        for (int n = 1; n <= 10; ++n) {
            double prev = 1e18;
            for (int alpha = 1; alpha <= 7; ++alpha) {
                DcfParams p;
                p.n = n;
                p.bit_error_rate = ber;
                p.frame_octets = static_cast<int>(max_pad_frame_length(alpha));
                const double s = throughputs(p, r54).s_data_mbps;
                if (s >= prev) {
                    ok = false;
                    detail = "not decreasing in L";
                }
                prev = s;
            }
        }
    }

    // ACK channel: 24 Mbit/s beats 36 Mbit/s at every n (58 vs 10 pad bits)
    for (int n = 1; n <= 10; ++n) {
        DcfParams p;
        p.n = n;
        if (throughputs(p, *find_rate(24)).s_ack_mbps <=
            throughputs(p, *find_rate(36)).s_ack_mbps) {
            ok = false;
            detail = "no ACK inversion at n " + std::to_string(n);
        }
    }
    report(5, "figure shapes: declining curves and the 24/36 ACK inversion", ok, detail);
}

// 6. Explicit transition-matrix oracle vs the closed-form occupancies.
void criterion_chain_oracle() {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (int w0 : {4, 8, 16}) {
        for (int m : {1, 2, 3}) {
            for (int m_prime : {0, 1, 2}) {
                for (double p_f : {0.0, 0.3, 0.5, 0.7}) {
                    for (double p_coll : {0.0, 0.2, 0.5}) {
                        DcfParams p;
                        p.cw_min = w0 - 1;
                        p.cw_max = (w0 << m_prime) - 1;
                        p.retry_limit = m;

                        const auto oracle = stationary_oracle(p_f, p_coll, p);
                        const auto windows = cw_schedule(p);

                        // closed-form b00 via the normalization sum
                        double b00_inv = 0.0;
                        double pf_pow = 1.0;
                        for (const int w : windows) {
                            b00_inv += pf_pow * (1.0 + (w - 1) / (2.0 * (1.0 - p_coll)));
                            pf_pow *= p_f;
                        }
                        const double b00 = 1.0 / b00_inv;

                        pf_pow = 1.0;
                        for (int i = 0; i <= m; ++i) {
                            const int w = windows[static_cast<std::size_t>(i)];
                            for (int k = 0; k < w; ++k) {
                                const double expected =
                                    k == 0 ? pf_pow * b00
                                           : (w - k) / (w * (1.0 - p_coll)) * pf_pow * b00;
                                const double err =
                                    std::abs(oracle.stationary(i, k) - expected);
                                worst = std::max(worst, err);
                                if (err > 1e-9) ok = false;
                            }
                            pf_pow *= p_f;
                        }

                        const double tau_err =
                            std::abs(oracle.tx_probability() - tau_given(p_f, p_coll, p));
                        worst = std::max(worst, tau_err);
                        if (tau_err > 1e-9) ok = false;
                    }
                }
            }
        }
    }
    report(6, "Markov-chain oracle matches closed-form occupancies and tau", ok,
           "worst abs err " + fmt(worst));
}

// 7. Summation form vs closed-form branches on random tuples.
void criterion_closed_form() {
    std::mt19937_64 rng(2024);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    bool ok = true;
    double worst = 0.0;
    int checked = 0;
    while (checked < 1000) {
        const double p_f = uniform(0.0, 0.95);
        if (std::abs(p_f - 0.5) <= 1e-3) continue;
        const double p_coll = uniform(0.0, 0.9);
        const int w0 = 1 << (1 + static_cast<int>(rng() % 6));
        const int m = static_cast<int>(rng() % 9);
        const int m_prime = static_cast<int>(rng() % 9);

        DcfParams p;
        p.cw_min = w0 - 1;
        p.cw_max = (w0 << m_prime) - 1;
        p.retry_limit = m;

        const double a = tau_given(p_f, p_coll, p);
        const double b = tau_closed_form(p_f, p_coll, p);
        const double rel = std::abs(a - b) / a;
        worst = std::max(worst, rel);
        if (rel > 1e-10) ok = false;
        ++checked;
    }
    report(7, "summation tau equals closed-form branches (1000 tuples)", ok,
           "worst rel err " + fmt(worst));
}

// 8. Fixed point satisfies the coupled equations over the full sweep grid.
void criterion_fixed_point_grid() {
    bool ok = true;
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        for (const double ber : {0.0, 1e-5, 1e-4}) {
            for (int alpha = 1; alpha <= 7; ++alpha) {
                for (const auto& rate : rate_table()) {
                    DcfParams p;
                    p.n = n;
                    p.bit_error_rate = ber;
                    p.frame_octets = static_cast<int>(max_pad_frame_length(alpha));
                    const auto sol = throughputs(p, rate);
                    const auto errors = error_probs(ber, 8LL * p.frame_octets,
                                                    8LL * p.ack_octets);

                    const double r20 =
                        std::abs(sol.tau - tau_given(sol.p_f, sol.p_coll, p));
                    const double r25 =
                        std::abs(sol.p_coll - (1.0 - std::pow(1.0 - sol.tau, n - 1)));
                    const double r26 = std::abs(
                        sol.p_f - (1.0 - (1.0 - sol.p_coll) * (1.0 - errors.any)));
                    const double norm = std::abs(sol.states.p.sum() - 1.0);

                    worst = std::max({worst, r20, r25, r26, norm});
                    if (r20 > 1e-12 || r25 > 1e-12 || r26 > 1e-12 || norm > 1e-12 ||
                        !std::isfinite(sol.s_data_mbps) || sol.s_mbps <= 0.0) {
                        ok = false;
                    }
                }
            }
        }
    }
    report(8, "fixed point valid across the 10x3x7x8 sweep grid", ok,
           "worst residual " + fmt(worst));
}

// 9. Simulator agrees with the analytical model.
void criterion_sim_vs_model() {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (const int n : {1, 3, 5, 10}) {
        for (const double ber : {0.0, 1e-5}) {
            SimConfig config;
            config.params.n = n;
            config.params.bit_error_rate = ber;
            config.rate = *find_rate(54);
            config.seed = 1234;
            config.horizon_events = 1'000'000;
            config.warmup_events = 10'000;

            const auto sim = run(config);
            const auto model = throughputs(config.params, config.rate);
            const double tol = (n == 1 && ber == 0.0) ? 0.02 : 0.05;

            const double gap_s = std::abs(sim.s_mbps - model.s_mbps) / model.s_mbps;
            const double gap_data =
                std::abs(sim.s_data_mbps - model.s_data_mbps) / model.s_data_mbps;
            const double gap_tau =
                std::abs(sim.observed_tau - model.tau) / model.tau;
            worst = std::max({worst, gap_s, gap_data, gap_tau});
            if (gap_s > tol || gap_data > tol || gap_tau > tol) {
                ok = false;
                if (!detail.empty()) detail += "; ";
                detail += "n=" + std::to_string(n) + " ber=" + fmt(ber) +
                          " rel gaps S/S_DATA/tau " + fmt(gap_s) + "/" +
                          fmt(gap_data) + "/" + fmt(gap_tau) + " vs tol " + fmt(tol);
            }
        }
    }
    report(9, "simulator within tolerance of the model (1e6 events)", ok,
           detail.empty() ? "worst rel gap " + fmt(worst) : detail);
}

// 10. Codec roundtrip over randomized triples plus the 1 KiB chunking count.
void criterion_codec_roundtrip() {
    std::mt19937_64 rng(77);
    const auto table = rate_table();
    bool ok = true;
    for (int trial = 0; trial < 10'000 && ok; ++trial) {
        const PhyRate rate = table[rng() % table.size()];
        const auto psdu_len = static_cast<std::size_t>(rng() % 4097);
        std::vector<std::uint8_t> psdu(psdu_len);
        for (auto& b : psdu) b = static_cast<std::uint8_t>(rng() & 0xFF);

        const auto capacity = pad_capacity_bits(static_cast<std::int64_t>(psdu_len), rate);
        BitString covert;
        const auto covert_len = rng() % static_cast<std::uint64_t>(capacity + 1);
        for (std::uint64_t i = 0; i < covert_len; ++i) covert.push_back((rng() & 1) != 0);

        const auto frame = build_frame(psdu, rate, covert);
        if (extract(frame, rate, static_cast<std::int64_t>(covert.size())) != covert) {
            ok = false;
        }
        if (frame.total_bits() % rate.bits_per_symbol != 0) ok = false;
        if (frame.psdu != psdu) ok = false;
    }

    // 1 KiB across 214-octet frames at 54 Mbit/s: ceil((16 + 8192) / 210) frames
    std::vector<std::uint8_t> message(1024);
    for (auto& b : message) b = static_cast<std::uint8_t>(rng() & 0xFF);
    const std::vector<std::int64_t> capacities(64, 210);
    const auto chunks = chunk_message(message, capacities);
    std::size_t used = 0;
    for (const auto& chunk : chunks) {
        if (!chunk.empty()) ++used;
    }
    if (used != 40) ok = false;
    if (reassemble(chunks) != message) ok = false;

    report(10, "codec roundtrip (10000 triples) and 40-frame chunking", ok);
}

// 11. Collision-free freeze term reduces to the 2/(W_0+1) reference form.
void criterion_reference_limit() {
    bool ok = true;
    for (int cw_min : {7, 15, 31, 63, 127, 255}) {
        DcfParams p;
        p.cw_min = cw_min;
        p.cw_max = 1023;
        const double tau = tau_given(0.0, 0.0, p);
        const double reference = 2.0 / (p.w0() + 1.0);
        if (std::abs(tau - reference) > 1e-14) ok = false;
    }
    report(11, "collision-free limit matches tau = 2/(W_0+1)", ok);
}

}  // namespace

int main() {
    const auto started = std::chrono::steady_clock::now();
    criterion_capacities();
    criterion_peak_throughputs();
    criterion_curve_shapes();
    criterion_chain_oracle();
    criterion_closed_form();
    criterion_fixed_point_grid();
    criterion_sim_vs_model();
    criterion_codec_roundtrip();
    criterion_reference_limit();
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    std::printf("%d criterion(s) failed, %lld ms total\n", g_failures,
                static_cast<long long>(elapsed));
    return g_failures == 0 ? 0 : 1;
}
