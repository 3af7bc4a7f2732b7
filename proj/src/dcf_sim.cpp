#include "wipad/dcf_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace wipad {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Draw helpers on top of the engine's raw 64-bit output; std::*_distribution
// is not bit-reproducible across standard libraries.
int draw_timer(std::mt19937_64& rng, int window) {
    // multiply-shift bounded draw; bias is < 2^-53 for window <= 2^11
    const std::uint64_t x = rng();
    return static_cast<int>((static_cast<unsigned __int128>(x) *
                             static_cast<unsigned __int128>(window)) >>
                            64);
}

bool draw_bernoulli(std::mt19937_64& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return (rng() >> 11) * 0x1.0p-53 < p;
}

// Two-sided 97.5% Student-t quantiles for small degrees of freedom.
double t_quantile_975(int dof) {
    static constexpr double kTable[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) return 0.0;
    if (dof <= 30) return kTable[dof - 1];
    return 1.960;
}

struct Station {
    int stage = 0;
    int timer = 0;
    std::mt19937_64 rng;
};

}  // namespace

void SimConfig::validate() const {
    params.validate();
    if (rate.bits_per_symbol <= 0) {
        throw std::invalid_argument("SimConfig: rate.bits_per_symbol must be positive");
    }
    if (horizon_events <= 0 || warmup_events < 0 ||
        horizon_events <= warmup_events) {
        throw std::invalid_argument("SimConfig: need horizon_events > warmup_events >= 0");
    }
    if (batches < 2 || batches > horizon_events - warmup_events) {
        throw std::invalid_argument("SimConfig: batches must be in [2, counted events]");
    }
}

SimReport run(const SimConfig& config) {
    config.validate();
    const DcfParams& p = config.params;
    const int n = p.n;
    const auto windows = cw_schedule(p);
    const int max_stage = p.retry_limit;

    const auto durations = state_durations(p, config.rate);
    const auto errors =
        error_probs(p.bit_error_rate, 8LL * p.frame_octets, 8LL * p.ack_octets);
    const std::int64_t payload_per_frame = p.payload_bits();
    const std::int64_t c_data = pad_capacity_bits(p.frame_octets, config.rate);
    const std::int64_t c_ack = pad_capacity_bits(p.ack_octets, config.rate);

    std::vector<Station> stations(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        stations[static_cast<std::size_t>(s)].rng.seed(
            splitmix64(config.seed + static_cast<std::uint64_t>(s)));
        stations[static_cast<std::size_t>(s)].timer =
            draw_timer(stations[static_cast<std::size_t>(s)].rng, windows[0]);
    }
    // Separate stream for channel error draws.
    std::mt19937_64 channel_rng(splitmix64(config.seed ^ 0x5EEDC0DEULL));

    SimReport report;
    report.seed = config.seed;

    const std::int64_t counted = config.horizon_events - config.warmup_events;
    const std::int64_t batch_len = counted / config.batches;
    std::vector<double> batch_payload(static_cast<std::size_t>(config.batches), 0.0);
    std::vector<double> batch_elapsed(static_cast<std::size_t>(config.batches), 0.0);

    std::int64_t tx_attempts = 0;
    std::int64_t tx_collided = 0;

    std::vector<int> transmitters;
    transmitters.reserve(static_cast<std::size_t>(n));

    for (std::int64_t ev = 0; ev < config.horizon_events; ++ev) {
        transmitters.clear();
        for (int s = 0; s < n; ++s) {
            if (stations[static_cast<std::size_t>(s)].timer == 0) {
                transmitters.push_back(s);
            }
        }

        const bool counting = ev >= config.warmup_events;
        const std::int64_t batch =
            counting ? std::min<std::int64_t>((ev - config.warmup_events) / batch_len,
                                              config.batches - 1)
                     : 0;

        double duration = 0.0;
        std::int64_t payload_now = 0;

        if (transmitters.empty()) {
            duration = durations.idle_us;
            if (counting) ++report.counts.idle;
            for (auto& st : stations) --st.timer;
        } else if (transmitters.size() == 1) {
            auto& sender = stations[static_cast<std::size_t>(transmitters.front())];
            const bool data_bad = draw_bernoulli(channel_rng, errors.data);
            const bool ack_bad =
                !data_bad && draw_bernoulli(channel_rng, errors.ack);
            if (data_bad) {
                duration = durations.data_error_us;
                if (counting) ++report.counts.data_error;
            } else if (ack_bad) {
                duration = durations.ack_error_us;
                if (counting) ++report.counts.ack_error;
            } else {
                duration = durations.success_us;
                payload_now = payload_per_frame;
                if (counting) {
                    ++report.counts.success;
                    report.payload_bits_delivered += payload_per_frame;
                    report.covert_bits_data += c_data;
                    report.covert_bits_ack += c_ack;
                }
            }
            if (counting) ++tx_attempts;
            if (data_bad || ack_bad) {
                if (sender.stage == max_stage) {
                    sender.stage = 0;
                    if (counting) ++report.frames_dropped;
                } else {
                    ++sender.stage;
                }
            } else {
                sender.stage = 0;
            }
            sender.timer =
                draw_timer(sender.rng, windows[static_cast<std::size_t>(sender.stage)]);
            // everyone else freezes for the busy period
        } else {
            duration = durations.collision_us;
            if (counting) {
                ++report.counts.collision;
                tx_attempts += static_cast<std::int64_t>(transmitters.size());
                tx_collided += static_cast<std::int64_t>(transmitters.size());
            }
            for (const int s : transmitters) {
                auto& sender = stations[static_cast<std::size_t>(s)];
                if (sender.stage == max_stage) {
                    sender.stage = 0;
                    if (counting) ++report.frames_dropped;
                } else {
                    ++sender.stage;
                }
                sender.timer = draw_timer(
                    sender.rng, windows[static_cast<std::size_t>(sender.stage)]);
            }
        }

        if (counting) {
            report.elapsed_us += duration;
            batch_payload[static_cast<std::size_t>(batch)] +=
                static_cast<double>(payload_now);
            batch_elapsed[static_cast<std::size_t>(batch)] += duration;
        }
    }

    report.s_mbps = static_cast<double>(report.payload_bits_delivered) / report.elapsed_us;
    report.s_data_mbps =
        static_cast<double>(report.covert_bits_data) / (n * report.elapsed_us);
    report.s_ack_mbps =
        static_cast<double>(report.covert_bits_ack) / (n * report.elapsed_us);
    report.observed_tau = static_cast<double>(tx_attempts) /
                          (static_cast<double>(n) * static_cast<double>(counted));
    report.observed_p_coll =
        tx_attempts > 0
            ? static_cast<double>(tx_collided) / static_cast<double>(tx_attempts)
            : 0.0;

    // batch means confidence interval on the aggregate throughput
    double mean = 0.0;
    std::vector<double> batch_s(static_cast<std::size_t>(config.batches));
    for (int b = 0; b < config.batches; ++b) {
        batch_s[static_cast<std::size_t>(b)] =
            batch_payload[static_cast<std::size_t>(b)] /
            batch_elapsed[static_cast<std::size_t>(b)];
        mean += batch_s[static_cast<std::size_t>(b)];
    }
    mean /= config.batches;
    double var = 0.0;
    for (const double s : batch_s) var += (s - mean) * (s - mean);
    var /= (config.batches - 1);
    report.ci_halfwidth_s = t_quantile_975(config.batches - 1) *
                            std::sqrt(var / config.batches);
    return report;
}

std::vector<SimOutcome> sim_sweep(std::span<const SimConfig> configs, int workers) {
    std::vector<SimOutcome> outcomes(configs.size());
    if (configs.empty()) return outcomes;

    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = std::min<int>(workers, static_cast<int>(configs.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                outcomes[i].report = run(configs[i]);
                outcomes[i].ok = true;
            } catch (const std::exception& e) {
                outcomes[i].ok = false;
                outcomes[i].error = e.what();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return outcomes;
}

}  // namespace wipad
