#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wipad/dcf_model.hpp"
#include "wipad/dcf_sim.hpp"

namespace wipad {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Engine { Model, Sim, Both };

std::string_view to_string(Engine engine);
std::optional<Engine> parse_engine(std::string_view text);

/// A sweep grid plus the parameter overrides shared by every point.
/// Parsed from `key = value` scenario files; see parse_scenario_text.
struct Scenario {
    std::string name = "scenario";
    std::vector<int> n_list{1};
    std::vector<double> ber_list{0.0};
    std::vector<int> frame_octets_list{214};
    std::vector<int> rate_list{54};
    DcfParams base;  // n/frame/ber fields are overwritten per grid point
    Engine engine = Engine::Model;
    std::uint64_t seed = 1;
    std::int64_t sim_events = 1'000'000;
    std::int64_t sim_warmup = 10'000;
    int sim_batches = 20;

    void validate() const;  // throws ScenarioError
};

/// Scenario file syntax: one `key = value` per line, `#` comments, blank
/// lines ignored. List keys (n, ber, frame, rate) accept comma-separated
/// values; n/frame/rate also accept `a..b` ranges. Remaining keys override
/// single parameters (cw_min, cw_max, retry_limit, sigma_us, delta_us,
/// sifs_us, difs_us, eifs_us, phyhdr_us, signal_ext_us, mac_overhead,
/// ack_octets, engine, seed, events, warmup, batches, name).
Scenario parse_scenario_text(std::string_view text, std::string_view name_hint);
Scenario parse_scenario_file(const std::string& path);

/// One CSV row of a sweep. Column order is fixed:
/// scenario,engine,n,L_octets,rate_mbps,ber,tau,p_coll,p_f,s_mbps,
/// s_data_kbps,s_ack_kbps,c_data_bits,c_ack_bits,ci_halfwidth[,rel_gap_s]
struct ResultRow {
    std::string scenario;
    std::string engine;
    int n = 0;
    int frame_octets = 0;
    int rate_mbps = 0;
    double ber = 0.0;
    double tau = 0.0;
    double p_coll = 0.0;
    double p_f = 0.0;
    double s_mbps = 0.0;
    double s_data_kbps = 0.0;
    double s_ack_kbps = 0.0;
    std::int64_t c_data_bits = 0;
    std::int64_t c_ack_bits = 0;
    std::optional<double> ci_halfwidth;  // sim rows only
    std::optional<double> rel_gap_s;     // sim rows in `both` runs
};

std::string csv_header(bool with_gap_column);
std::string to_csv(const ResultRow& row, bool with_gap_column);

/// Locale-independent float formatting used for all CSV output.
std::string format_double(double value, int precision = 9);

/// Evaluates the full grid in deterministic (n, L, rate, ber, engine)
/// order. Model rows come from the analytical solution, sim rows from the
/// discrete-event simulator; `both` emits the pair per point and fills
/// rel_gap_s on the sim row. Points evaluate in parallel across workers
/// (0 = hardware concurrency); ordering of the output is unaffected.
std::vector<ResultRow> run_sweep(const Scenario& scenario, int workers = 0);

/// Renders rows to CSV text, header included.
std::string render_csv(const std::vector<ResultRow>& rows, bool with_gap_column);

}  // namespace wipad
