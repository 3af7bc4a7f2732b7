#include <doctest.h>

#include <set>

#include "wipad/scenario.hpp"

using namespace wipad;

TEST_CASE("scenario parsing") {
    const char* text =
        "# peak throughput grid\n"
        "name = fig3\n"
        "n = 1..10\n"
        "ber = 1e-4, 1e-5, 0\n"
        "frame = 214\n"
        "rate = 54\n"
        "engine = model\n"
        "seed = 7\n";
    const auto sc = parse_scenario_text(text, "unused");
    CHECK(sc.name == "fig3");
    CHECK(sc.n_list == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    CHECK(sc.ber_list == std::vector<double>{1e-4, 1e-5, 0.0});
    CHECK(sc.frame_octets_list == std::vector<int>{214});
    CHECK(sc.rate_list == std::vector<int>{54});
    CHECK(sc.engine == Engine::Model);
    CHECK(sc.seed == 7);
}

TEST_CASE("scenario override keys reach the parameter set") {
    const auto sc = parse_scenario_text(
        "n = 2\nrate = 24\ndelta_us = 0\ncw_min = 31\ncw_max = 255\n"
        "retry_limit = 5\nack_octets = 20\nevents = 5000\nwarmup = 100\nbatches = 4\n",
        "t");
    CHECK(sc.base.delta_us == 0.0);
    CHECK(sc.base.cw_min == 31);
    CHECK(sc.base.cw_max == 255);
    CHECK(sc.base.retry_limit == 5);
    CHECK(sc.base.ack_octets == 20);
    CHECK(sc.sim_events == 5000);
    CHECK(sc.sim_warmup == 100);
    CHECK(sc.sim_batches == 4);
}

TEST_CASE("scenario rejections") {
    CHECK_THROWS_AS(parse_scenario_text("", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("   \n# only a comment\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("bogus_key = 3\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("n\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("rate = 11\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("ber = 1.5\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("n = 0\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("engine = magic\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("n = 5..2\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("frame = 20\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("ber = abc\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("n = 3x\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("ber = 1e-4,\n", "t"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("n = 2\nwarmup = 99999999\n", "t"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_file("/nonexistent/path.scn"), ScenarioError);
}

TEST_CASE("csv header and row formatting") {
    CHECK(csv_header(false) ==
          "scenario,engine,n,L_octets,rate_mbps,ber,tau,p_coll,p_f,s_mbps,"
          "s_data_kbps,s_ack_kbps,c_data_bits,c_ack_bits,ci_halfwidth");
    CHECK(csv_header(true) == csv_header(false) + ",rel_gap_s");

    ResultRow row;
    row.scenario = "t";
    row.engine = "model";
    row.n = 1;
    row.frame_octets = 214;
    row.rate_mbps = 54;
    row.ber = 1e-5;
    row.tau = 0.5;
    row.c_data_bits = 210;
    row.c_ack_bits = 82;
    const auto line = to_csv(row, false);
    CHECK(line == "t,model,1,214,54,1e-05,0.5,0,0,0,0,0,210,82,");
}

TEST_CASE("model sweep covers the grid in deterministic order") {
    Scenario sc;
    sc.name = "rates";
    sc.n_list = {3, 1, 2};  // deliberately unsorted
    sc.rate_list = {54, 6, 9, 12, 18, 24, 36, 48};
    const auto rows = run_sweep(sc, 2);
    REQUIRE(rows.size() == 24);  // 3 n x 8 rates

    int i = 0;
    for (int n : {1, 2, 3}) {
        for (int rate : {6, 9, 12, 18, 24, 36, 48, 54}) {
            CHECK(rows[static_cast<std::size_t>(i)].n == n);
            CHECK(rows[static_cast<std::size_t>(i)].rate_mbps == rate);
            CHECK_FALSE(rows[static_cast<std::size_t>(i)].ci_halfwidth.has_value());
            ++i;
        }
    }

    // identical re-run renders byte-identical CSV
    const auto again = run_sweep(sc, 4);
    CHECK(render_csv(rows, false) == render_csv(again, false));
}

TEST_CASE("solve point matches the reference results") {
    Scenario sc;
    sc.name = "point";
    const auto rows = run_sweep(sc, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].s_data_kbps == doctest::Approx(1120.0).epsilon(1e-9));
    CHECK(rows[0].s_ack_kbps == doctest::Approx(437.33).epsilon(1e-3));
    CHECK(rows[0].c_data_bits == 210);
    CHECK(rows[0].c_ack_bits == 82);

    Scenario sc36 = sc;
    sc36.rate_list = {36};
    CHECK(run_sweep(sc36, 1)[0].c_ack_bits == 10);
}

TEST_CASE("both engines emit paired rows with a relative gap") {
    Scenario sc;
    sc.engine = Engine::Both;
    sc.n_list = {1, 2};
    sc.sim_events = 60'000;
    sc.sim_warmup = 2'000;
    const auto rows = run_sweep(sc, 2);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        CHECK(rows[i].engine == "model");
        CHECK(rows[i + 1].engine == "sim");
        CHECK(rows[i].n == rows[i + 1].n);
        CHECK_FALSE(rows[i].rel_gap_s.has_value());
        REQUIRE(rows[i + 1].rel_gap_s.has_value());
        CHECK(*rows[i + 1].rel_gap_s ==
              doctest::Approx(std::abs(rows[i + 1].s_mbps - rows[i].s_mbps) /
                              rows[i].s_mbps));
        REQUIRE(rows[i + 1].ci_halfwidth.has_value());
        CHECK(*rows[i + 1].ci_halfwidth > 0.0);
    }
}

TEST_CASE("sim sweep rows are deterministic under a fixed seed") {
    Scenario sc;
    sc.engine = Engine::Sim;
    sc.n_list = {2};
    sc.seed = 5;
    sc.sim_events = 50'000;
    sc.sim_warmup = 1'000;
    const auto a = run_sweep(sc, 1);
    const auto b = run_sweep(sc, 3);
    CHECK(render_csv(a, false) == render_csv(b, false));
}

TEST_CASE("format_double is plain and locale independent") {
    CHECK(format_double(0.0, 6) == "0");
    CHECK(format_double(1120.0, 9) == "1120");
    CHECK(format_double(1e-5, 6) == "1e-05");
    CHECK(format_double(0.437333333, 6) == "0.437333");
}
