// wipad: OFDM padding covert-channel toolkit for 802.11a/g.
//
// Subcommands: rates, solve, sweep, simulate, embed, extract.
// Exit codes: 0 success, 1 usage/parse error, 2 numeric failure,
// 3 covert capacity error.

#include <clocale>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wipad/backoff_chain.hpp"
#include "wipad/dcf_model.hpp"
#include "wipad/dcf_sim.hpp"
#include "wipad/phy.hpp"
#include "wipad/scenario.hpp"
#include "wipad/steg_codec.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCapacity = 3;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::uint8_t> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

void write_binary(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

wipad::PhyRate rate_or_throw(int mbps) {
    const auto rate = wipad::find_rate(mbps);
    if (!rate) {
        throw CLI::ValidationError("--rate", std::to_string(mbps) +
                                                " Mbit/s is not in the rate table");
    }
    return *rate;
}

std::string rates_csv(std::optional<int> frame_octets) {
    std::string out = "rate_mbps,modulation,code_rate,n_bps";
    if (frame_octets) out += ",pad_capacity_bits";
    out += '\n';
    for (const auto& row : wipad::rate_table()) {
        out += std::to_string(row.rate_mbps);
        out += ',';
        out += std::string(wipad::to_string(row.modulation));
        out += ',';
        out += std::to_string(row.code_rate_num) + "/" + std::to_string(row.code_rate_den);
        out += ',';
        out += std::to_string(row.bits_per_symbol);
        if (frame_octets) {
            out += ',';
            out += std::to_string(wipad::pad_capacity_bits(*frame_octets, row));
        }
        out += '\n';
    }
    return out;
}

struct SolveOptions {
    int n = 1;
    double ber = 0.0;
    int frame_octets = 214;
    int rate_mbps = 54;
    wipad::DcfParams overrides;  // timing/backoff fields only
};

void add_param_flags(CLI::App* cmd, wipad::DcfParams& p) {
    cmd->add_option("--cw-min", p.cw_min, "Minimum contention window");
    cmd->add_option("--cw-max", p.cw_max, "Maximum contention window");
    cmd->add_option("--retry-limit", p.retry_limit, "Maximum backoff stage");
    cmd->add_option("--sigma", p.sigma_us, "Idle slot duration [us]");
    cmd->add_option("--delta", p.delta_us, "Propagation delay [us]");
    cmd->add_option("--sifs", p.t_sifs_us, "SIFS duration [us]");
    cmd->add_option("--difs", p.t_difs_us, "DIFS duration [us]");
    cmd->add_option("--eifs", p.t_eifs_us, "EIFS duration [us]");
    cmd->add_option("--phyhdr", p.t_phyhdr_us, "PLCP preamble+header duration [us]");
    cmd->add_option("--signal-ext", p.t_signal_ext_us, "Signal extension [us]");
    cmd->add_option("--mac-overhead", p.mac_overhead_octets,
                    "MAC header + FCS size [octets]");
    cmd->add_option("--ack-octets", p.ack_octets, "ACK frame size [octets]");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"OFDM padding covert-channel toolkit for 802.11a/g"};
    app.require_subcommand(1);

    // ---- rates ----
    auto* rates_cmd = app.add_subcommand(
        "rates", "Print the OFDM rate set, optionally with pad capacity");
    std::optional<int> rates_frame;
    std::string rates_out;
    rates_cmd->add_option("--frame", rates_frame, "Frame length [octets]");
    rates_cmd->add_option("--out", rates_out, "Output file (default stdout)");

    // ---- solve ----
    auto* solve_cmd =
        app.add_subcommand("solve", "Analytical evaluation of a single point");
    SolveOptions solve_opts;
    std::string solve_out;
    solve_cmd->add_option("--n", solve_opts.n, "Number of contending stations");
    solve_cmd->add_option("--ber", solve_opts.ber, "Bit error rate");
    solve_cmd->add_option("--frame", solve_opts.frame_octets, "Frame length [octets]");
    solve_cmd->add_option("--rate", solve_opts.rate_mbps, "Data rate [Mbit/s]");
    solve_cmd->add_option("--out", solve_out, "Output file (default stdout)");
    add_param_flags(solve_cmd, solve_opts.overrides);

    // ---- sweep ----
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Evaluate a scenario grid, write CSV");
    std::string sweep_scenario, sweep_out, sweep_engine;
    int sweep_workers = 0;
    std::optional<std::uint64_t> sweep_seed;
    sweep_cmd->add_option("--scenario", sweep_scenario, "Scenario file")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV file (default stdout)");
    sweep_cmd->add_option("--engine", sweep_engine,
                          "Override scenario engine: model, sim or both");
    sweep_cmd->add_option("--seed", sweep_seed, "Override scenario seed");
    sweep_cmd->add_option("--workers", sweep_workers,
                          "Parallel workers (0 = hardware)");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Run the discrete-event simulator over a scenario grid");
    std::string sim_scenario, sim_out;
    int sim_workers = 0;
    std::optional<std::uint64_t> sim_seed;
    sim_cmd->add_option("--scenario", sim_scenario, "Scenario file")->required();
    sim_cmd->add_option("--out", sim_out, "Output CSV file (default stdout)");
    sim_cmd->add_option("--seed", sim_seed, "Override scenario seed");
    sim_cmd->add_option("--workers", sim_workers, "Parallel workers (0 = hardware)");

    // ---- embed ----
    auto* embed_cmd = app.add_subcommand(
        "embed", "Embed a covert message into frame padding, write a frame dump");
    std::string embed_message, embed_in, embed_out;
    int embed_frame = 214, embed_rate = 54;
    embed_cmd->add_option("--message", embed_message, "Covert message file")->required();
    embed_cmd->add_option("--in", embed_in,
                          "Existing frame dump to embed into (otherwise frames "
                          "are generated)");
    embed_cmd->add_option("--frame", embed_frame,
                          "Generated frame length [octets]");
    embed_cmd->add_option("--rate", embed_rate, "Generated frame rate [Mbit/s]");
    embed_cmd->add_option("--out", embed_out, "Output frame dump")->required();

    // ---- extract ----
    auto* extract_cmd =
        app.add_subcommand("extract", "Recover the covert message from a frame dump");
    std::string extract_in, extract_out;
    extract_cmd->add_option("--in", extract_in, "Frame dump file")->required();
    extract_cmd->add_option("--out", extract_out, "Output message file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (rates_cmd->parsed()) {
        if (rates_frame && *rates_frame < 0) {
            throw CLI::ValidationError("--frame", "must be non-negative");
        }
        write_output(rates_out, rates_csv(rates_frame));
        return 0;
    }

    if (solve_cmd->parsed()) {
        wipad::Scenario sc;
        sc.name = "solve";
        sc.base = solve_opts.overrides;
        sc.n_list = {solve_opts.n};
        sc.ber_list = {solve_opts.ber};
        sc.frame_octets_list = {solve_opts.frame_octets};
        sc.rate_list = {solve_opts.rate_mbps};
        sc.engine = wipad::Engine::Model;
        const auto rows = wipad::run_sweep(sc, 1);
        write_output(solve_out, wipad::render_csv(rows, false));
        return 0;
    }

    if (sweep_cmd->parsed() || sim_cmd->parsed()) {
        const bool simulate_only = sim_cmd->parsed();
        wipad::Scenario sc = wipad::parse_scenario_file(
            simulate_only ? sim_scenario : sweep_scenario);
        if (simulate_only) {
            sc.engine = wipad::Engine::Sim;
            if (sim_seed) sc.seed = *sim_seed;
        } else {
            if (!sweep_engine.empty()) {
                const auto engine = wipad::parse_engine(sweep_engine);
                if (!engine) {
                    throw CLI::ValidationError("--engine", "must be model, sim or both");
                }
                sc.engine = *engine;
            }
            if (sweep_seed) sc.seed = *sweep_seed;
        }
        const int workers = simulate_only ? sim_workers : sweep_workers;
        const auto rows = wipad::run_sweep(sc, workers);
        write_output(simulate_only ? sim_out : sweep_out,
                     wipad::render_csv(rows, sc.engine == wipad::Engine::Both));
        return 0;
    }

    if (embed_cmd->parsed()) {
        const auto message = read_binary(embed_message);
        std::vector<wipad::FrameBits> frames;
        if (!embed_in.empty()) {
            std::ifstream in(embed_in, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open '" + embed_in + "'");
            frames = wipad::read_frame_dump(in);
        } else {
            const auto rate = rate_or_throw(embed_rate);
            const auto capacity = wipad::pad_capacity_bits(embed_frame, rate);
            if (capacity == 0) {
                throw wipad::CapacityError(16 + 8 * static_cast<std::int64_t>(message.size()), 0);
            }
            const std::int64_t needed = 16 + 8 * static_cast<std::int64_t>(message.size());
            const auto count = (needed + capacity - 1) / capacity;
            const std::vector<std::uint8_t> psdu(static_cast<std::size_t>(embed_frame), 0);
            frames.reserve(static_cast<std::size_t>(count));
            for (std::int64_t i = 0; i < count; ++i) {
                frames.push_back(wipad::build_frame(psdu, rate, wipad::BitString{}));
            }
        }

        std::vector<std::int64_t> capacities;
        capacities.reserve(frames.size());
        for (const auto& frame : frames) {
            capacities.push_back(static_cast<std::int64_t>(frame.pad.size()));
        }
        const auto chunks = wipad::chunk_message(message, capacities);
        for (std::size_t i = 0; i < frames.size(); ++i) {
            frames[i] = wipad::build_frame(frames[i].psdu, frames[i].rate, chunks[i]);
        }

        std::ofstream out(embed_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file '" + embed_out + "'");
        wipad::write_frame_dump(out, frames);
        std::cerr << "embedded " << message.size() << " bytes into " << frames.size()
                  << " frames\n";
        return 0;
    }

    if (extract_cmd->parsed()) {
        std::ifstream in(extract_in, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open '" + extract_in + "'");
        const auto frames = wipad::read_frame_dump(in);
        wipad::MessageAssembler assembler;
        for (const auto& frame : frames) {
            assembler.add_chunk(frame.pad);
            if (assembler.complete()) break;
        }
        const auto message = assembler.message();
        write_binary(extract_out, message);
        std::cerr << "extracted " << message.size() << " bytes from " << frames.size()
                  << " frames\n";
        return 0;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    try {
        return run_cli(argc, argv);
    } catch (const wipad::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const wipad::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const wipad::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
