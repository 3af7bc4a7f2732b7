#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wipad/dcf_model.hpp"

namespace wipad {

/// One simulation scenario. The horizon counts channel-state events
/// (idle slots, successes, collisions, error exchanges); the warmup
/// prefix is simulated but excluded from every reported statistic.
struct SimConfig {
    DcfParams params;
    PhyRate rate;
    std::uint64_t seed = 1;
    std::int64_t horizon_events = 1'000'000;
    std::int64_t warmup_events = 10'000;
    int batches = 20;

    void validate() const;
};

struct SimStateCounts {
    std::int64_t idle = 0;
    std::int64_t success = 0;
    std::int64_t collision = 0;
    std::int64_t data_error = 0;
    std::int64_t ack_error = 0;

    std::int64_t total() const {
        return idle + success + collision + data_error + ack_error;
    }
};

struct SimReport {
    std::uint64_t seed = 0;
    double elapsed_us = 0.0;
    SimStateCounts counts;
    std::int64_t payload_bits_delivered = 0;
    std::int64_t covert_bits_data = 0;  // pad bits of every delivered data frame
    std::int64_t covert_bits_ack = 0;   // pad bits of every delivered ACK
    std::int64_t frames_dropped = 0;    // retry limit exhausted
    double s_mbps = 0.0;                // aggregate payload throughput
    double s_data_mbps = 0.0;           // covert data-pad throughput per sender
    double s_ack_mbps = 0.0;            // covert ACK-pad throughput per sender
    double observed_tau = 0.0;
    double observed_p_coll = 0.0;
    double ci_halfwidth_s = 0.0;        // 95% batch-means half-width on s_mbps
};

/// Runs one slot-synchronous simulation of n saturated stations.
/// Deterministic: identical configs (seed included) produce identical
/// reports. A station that exhausts the retry limit discards the frame
/// and restarts at stage zero; the channel occupancy is the same either
/// way, only the drop counter distinguishes the two readings.
SimReport run(const SimConfig& config);

struct SimOutcome {
    bool ok = false;
    SimReport report;
    std::string error;
};

/// Runs independent simulations, optionally in parallel. Output order
/// matches input order; per-config failures are reported in place without
/// aborting the rest. workers == 0 picks the hardware concurrency.
std::vector<SimOutcome> sim_sweep(std::span<const SimConfig> configs,
                                  int workers = 0);

}  // namespace wipad
