#include "wipad/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace wipad {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            break;
        }
        parts.push_back(trim(s.substr(start, end - start)));
        start = end + 1;
    }
    return parts;
}

long long parse_int(std::string_view s, std::string_view key) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ScenarioError("scenario: bad integer for '" + std::string(key) +
                            "': '" + std::string(s) + "'");
    }
    return value;
}

double parse_real(std::string_view s, std::string_view key) {
    try {
        std::size_t used = 0;
        const double value = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ScenarioError("scenario: bad number for '" + std::string(key) +
                            "': '" + std::string(s) + "'");
    }
}

// Comma-separated integers; each element may be an `a..b` inclusive range.
std::vector<int> parse_int_list(std::string_view s, std::string_view key) {
    std::vector<int> values;
    for (const auto part : split(s, ',')) {
        if (part.empty()) {
            throw ScenarioError("scenario: empty element in '" + std::string(key) + "'");
        }
        const auto dots = part.find("..");
        if (dots != std::string_view::npos) {
            const auto lo = parse_int(trim(part.substr(0, dots)), key);
            const auto hi = parse_int(trim(part.substr(dots + 2)), key);
            if (hi < lo) {
                throw ScenarioError("scenario: descending range in '" +
                                    std::string(key) + "'");
            }
            for (long long v = lo; v <= hi; ++v) values.push_back(static_cast<int>(v));
        } else {
            values.push_back(static_cast<int>(parse_int(part, key)));
        }
    }
    return values;
}

std::vector<double> parse_real_list(std::string_view s, std::string_view key) {
    std::vector<double> values;
    for (const auto part : split(s, ',')) {
        if (part.empty()) {
            throw ScenarioError("scenario: empty element in '" + std::string(key) + "'");
        }
        values.push_back(parse_real(part, key));
    }
    return values;
}

}  // namespace

std::string_view to_string(Engine engine) {
    switch (engine) {
        case Engine::Model: return "model";
        case Engine::Sim: return "sim";
        case Engine::Both: return "both";
    }
    return "?";
}

std::optional<Engine> parse_engine(std::string_view text) {
    if (text == "model") return Engine::Model;
    if (text == "sim") return Engine::Sim;
    if (text == "both") return Engine::Both;
    return std::nullopt;
}

void Scenario::validate() const {
    if (n_list.empty() || ber_list.empty() || frame_octets_list.empty() ||
        rate_list.empty()) {
        throw ScenarioError("scenario: every grid list must be non-empty");
    }
    for (const int r : rate_list) {
        if (!find_rate(r)) {
            throw ScenarioError("scenario: rate " + std::to_string(r) +
                                " Mbit/s is not in the rate table");
        }
    }
    for (const double b : ber_list) {
        if (b < 0.0 || b > 1.0) {
            throw ScenarioError("scenario: BER values must lie in [0, 1]");
        }
    }
    for (const int n : n_list) {
        if (n < 1) throw ScenarioError("scenario: station counts must be >= 1");
    }
    for (const int L : frame_octets_list) {
        if (L <= base.mac_overhead_octets) {
            throw ScenarioError("scenario: frame length must exceed MAC overhead");
        }
    }
    if (sim_events <= sim_warmup || sim_warmup < 0 || sim_batches < 2) {
        throw ScenarioError("scenario: need events > warmup >= 0 and batches >= 2");
    }
    DcfParams probe = base;
    probe.n = n_list.front();
    probe.frame_octets = frame_octets_list.front();
    probe.bit_error_rate = ber_list.front();
    try {
        probe.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
}

Scenario parse_scenario_text(std::string_view text, std::string_view name_hint) {
    Scenario sc;
    sc.name = name_hint;
    bool any_key = false;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string_view line = end == std::string_view::npos
                                    ? text.substr(start)
                                    : text.substr(start, end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ScenarioError("scenario line " + std::to_string(line_no) +
                                ": expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ScenarioError("scenario line " + std::to_string(line_no) +
                                ": empty key or value");
        }
        any_key = true;

        if (key == "name") {
            sc.name = value;
        } else if (key == "n") {
            sc.n_list = parse_int_list(value, key);
        } else if (key == "ber") {
            sc.ber_list = parse_real_list(value, key);
        } else if (key == "frame") {
            sc.frame_octets_list = parse_int_list(value, key);
        } else if (key == "rate") {
            sc.rate_list = parse_int_list(value, key);
        } else if (key == "engine") {
            const auto engine = parse_engine(value);
            if (!engine) {
                throw ScenarioError("scenario: engine must be model, sim or both");
            }
            sc.engine = *engine;
        } else if (key == "seed") {
            sc.seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "events") {
            sc.sim_events = parse_int(value, key);
        } else if (key == "warmup") {
            sc.sim_warmup = parse_int(value, key);
        } else if (key == "batches") {
            sc.sim_batches = static_cast<int>(parse_int(value, key));
        } else if (key == "cw_min") {
            sc.base.cw_min = static_cast<int>(parse_int(value, key));
        } else if (key == "cw_max") {
            sc.base.cw_max = static_cast<int>(parse_int(value, key));
        } else if (key == "retry_limit") {
            sc.base.retry_limit = static_cast<int>(parse_int(value, key));
        } else if (key == "sigma_us") {
            sc.base.sigma_us = parse_real(value, key);
        } else if (key == "delta_us") {
            sc.base.delta_us = parse_real(value, key);
        } else if (key == "sifs_us") {
            sc.base.t_sifs_us = parse_real(value, key);
        } else if (key == "difs_us") {
            sc.base.t_difs_us = parse_real(value, key);
        } else if (key == "eifs_us") {
            sc.base.t_eifs_us = parse_real(value, key);
        } else if (key == "phyhdr_us") {
            sc.base.t_phyhdr_us = parse_real(value, key);
        } else if (key == "signal_ext_us") {
            sc.base.t_signal_ext_us = parse_real(value, key);
        } else if (key == "mac_overhead") {
            sc.base.mac_overhead_octets = static_cast<int>(parse_int(value, key));
        } else if (key == "ack_octets") {
            sc.base.ack_octets = static_cast<int>(parse_int(value, key));
        } else {
            throw ScenarioError("scenario line " + std::to_string(line_no) +
                                ": unknown key '" + std::string(key) + "'");
        }
    }

    if (!any_key) throw ScenarioError("scenario: file defines no keys");
    sc.validate();
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("scenario: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string_view hint = path;
    if (const auto slash = hint.find_last_of('/'); slash != std::string_view::npos) {
        hint = hint.substr(slash + 1);
    }
    if (const auto dot = hint.find_last_of('.'); dot != std::string_view::npos && dot > 0) {
        hint = hint.substr(0, dot);
    }
    return parse_scenario_text(buffer.str(), hint);
}

std::string format_double(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    return buf;
}

std::string csv_header(bool with_gap_column) {
    std::string header =
        "scenario,engine,n,L_octets,rate_mbps,ber,tau,p_coll,p_f,s_mbps,"
        "s_data_kbps,s_ack_kbps,c_data_bits,c_ack_bits,ci_halfwidth";
    if (with_gap_column) header += ",rel_gap_s";
    return header;
}

std::string to_csv(const ResultRow& row, bool with_gap_column) {
    std::string out;
    out += row.scenario;
    out += ',';
    out += row.engine;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.frame_octets);
    out += ',';
    out += std::to_string(row.rate_mbps);
    out += ',';
    out += format_double(row.ber, 6);
    out += ',';
    out += format_double(row.tau, 9);
    out += ',';
    out += format_double(row.p_coll, 9);
    out += ',';
    out += format_double(row.p_f, 9);
    out += ',';
    out += format_double(row.s_mbps, 9);
    out += ',';
    out += format_double(row.s_data_kbps, 9);
    out += ',';
    out += format_double(row.s_ack_kbps, 9);
    out += ',';
    out += std::to_string(row.c_data_bits);
    out += ',';
    out += std::to_string(row.c_ack_bits);
    out += ',';
    if (row.ci_halfwidth) out += format_double(*row.ci_halfwidth, 6);
    if (with_gap_column) {
        out += ',';
        if (row.rel_gap_s) out += format_double(*row.rel_gap_s, 6);
    }
    return out;
}

std::string render_csv(const std::vector<ResultRow>& rows, bool with_gap_column) {
    std::string out = csv_header(with_gap_column);
    out += '\n';
    for (const auto& row : rows) {
        out += to_csv(row, with_gap_column);
        out += '\n';
    }
    return out;
}

namespace {

struct GridPoint {
    int n;
    int frame_octets;
    int rate_mbps;
    double ber;
};

std::vector<GridPoint> expand_grid(const Scenario& sc) {
    auto n_list = sc.n_list;
    auto frame_list = sc.frame_octets_list;
    auto rate_list = sc.rate_list;
    auto ber_list = sc.ber_list;
    std::sort(n_list.begin(), n_list.end());
    std::sort(frame_list.begin(), frame_list.end());
    std::sort(rate_list.begin(), rate_list.end());
    std::sort(ber_list.begin(), ber_list.end());

    std::vector<GridPoint> points;
    points.reserve(n_list.size() * frame_list.size() * rate_list.size() *
                   ber_list.size());
    for (const int n : n_list) {
        for (const int frame : frame_list) {
            for (const int rate : rate_list) {
                for (const double ber : ber_list) {
                    points.push_back(GridPoint{n, frame, rate, ber});
                }
            }
        }
    }
    return points;
}

DcfParams params_at(const Scenario& sc, const GridPoint& pt) {
    DcfParams params = sc.base;
    params.n = pt.n;
    params.frame_octets = pt.frame_octets;
    params.bit_error_rate = pt.ber;
    return params;
}

ResultRow model_row(const Scenario& sc, const GridPoint& pt) {
    const PhyRate rate = *find_rate(pt.rate_mbps);
    const ModelSolution sol = throughputs(params_at(sc, pt), rate);
    return ResultRow{
        .scenario = sc.name,
        .engine = std::string(to_string(Engine::Model)),
        .n = pt.n,
        .frame_octets = pt.frame_octets,
        .rate_mbps = pt.rate_mbps,
        .ber = pt.ber,
        .tau = sol.tau,
        .p_coll = sol.p_coll,
        .p_f = sol.p_f,
        .s_mbps = sol.s_mbps,
        .s_data_kbps = 1000.0 * sol.s_data_mbps,
        .s_ack_kbps = 1000.0 * sol.s_ack_mbps,
        .c_data_bits = sol.c_data_bits,
        .c_ack_bits = sol.c_ack_bits,
        .ci_halfwidth = std::nullopt,
        .rel_gap_s = std::nullopt,
    };
}

ResultRow sim_row(const Scenario& sc, const GridPoint& pt) {
    const PhyRate rate = *find_rate(pt.rate_mbps);
    SimConfig config{
        .params = params_at(sc, pt),
        .rate = rate,
        .seed = sc.seed,
        .horizon_events = sc.sim_events,
        .warmup_events = sc.sim_warmup,
        .batches = sc.sim_batches,
    };
    const SimReport report = run(config);
    const auto errors = error_probs(pt.ber, 8LL * pt.frame_octets,
                                    8LL * config.params.ack_octets);
    return ResultRow{
        .scenario = sc.name,
        .engine = std::string(to_string(Engine::Sim)),
        .n = pt.n,
        .frame_octets = pt.frame_octets,
        .rate_mbps = pt.rate_mbps,
        .ber = pt.ber,
        .tau = report.observed_tau,
        .p_coll = report.observed_p_coll,
        .p_f = 1.0 - (1.0 - report.observed_p_coll) * (1.0 - errors.any),
        .s_mbps = report.s_mbps,
        .s_data_kbps = 1000.0 * report.s_data_mbps,
        .s_ack_kbps = 1000.0 * report.s_ack_mbps,
        .c_data_bits = pad_capacity_bits(pt.frame_octets, rate),
        .c_ack_bits = pad_capacity_bits(config.params.ack_octets, rate),
        .ci_halfwidth = report.ci_halfwidth_s,
        .rel_gap_s = std::nullopt,
    };
}

}  // namespace

std::vector<ResultRow> run_sweep(const Scenario& scenario, int workers) {
    scenario.validate();
    const auto points = expand_grid(scenario);

    const bool want_model = scenario.engine != Engine::Sim;
    const bool want_sim = scenario.engine != Engine::Model;

    // one slot per point; each slot may hold a model row, a sim row or both
    struct Slot {
        std::optional<ResultRow> model;
        std::optional<ResultRow> sim;
        std::exception_ptr error;
    };
    std::vector<Slot> slots(points.size());

    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = std::min<int>(workers, std::max<int>(1, static_cast<int>(points.size())));

    std::atomic<std::size_t> cursor{0};
    auto evaluate = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            try {
                if (want_model) slots[i].model = model_row(scenario, points[i]);
                if (want_sim) slots[i].sim = sim_row(scenario, points[i]);
            } catch (...) {
                slots[i].error = std::current_exception();
            }
        }
    };

    if (workers == 1 || points.size() == 1) {
        evaluate();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(evaluate);
        for (auto& t : pool) t.join();
    }

    std::vector<ResultRow> rows;
    rows.reserve(points.size() * (want_model && want_sim ? 2 : 1));
    for (auto& slot : slots) {
        if (slot.error) std::rethrow_exception(slot.error);
        if (slot.model) rows.push_back(std::move(*slot.model));
        if (slot.sim) {
            if (scenario.engine == Engine::Both && slot.model) {
                const double model_s = rows.back().s_mbps;
                slot.sim->rel_gap_s =
                    model_s != 0.0 ? std::abs(slot.sim->s_mbps - model_s) / model_s : 0.0;
            }
            rows.push_back(std::move(*slot.sim));
        }
    }
    return rows;
}

}  // namespace wipad
