#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "codag/errors.hpp"
#include "codag/io.hpp"
#include "corpus.hpp"
#include "doctest.h"

using namespace codag;

TEST_CASE("network JSON round trip") {
    auto net = corpus::figure1();
    auto again = network_from_json(network_to_json(net));
    CHECK(again.num_nodes == net.num_nodes);
    CHECK(again.arcs.size() == net.arcs.size());
    CHECK(again.origin == net.origin);
    CHECK(again.destination == net.destination);
    CHECK(again.demand == doctest::Approx(net.demand));
    CHECK(again.node_labels == net.node_labels);
    for (std::size_t j = 0; j < net.arcs.size(); ++j) {
        CHECK(again.arcs[j].tail == net.arcs[j].tail);
        CHECK(again.arcs[j].head == net.arcs[j].head);
        CHECK(again.arcs[j].label == net.arcs[j].label);
        CHECK(again.arcs[j].latency.k0 == doctest::Approx(net.arcs[j].latency.k0));
        CHECK(again.arcs[j].latency.k1 == doctest::Approx(net.arcs[j].latency.k1));
    }
}

TEST_CASE("figure 1 fixture has the published parameters") {
    auto net = corpus::figure1();
    CHECK(net.num_nodes == 5);
    REQUIRE(net.arcs.size() == 9);
    CHECK(net.demand == doctest::Approx(1.0));
    std::vector<double> k0 = {0, 1, 0, 1, 1, 0, 1, 1, 1};
    std::vector<double> k1 = {2, 1, 1, 1, 1, 1, 2, 2, 2};
    for (std::size_t j = 0; j < 9; ++j) {
        CHECK(net.arcs[j].latency.k0 == doctest::Approx(k0[j]));
        CHECK(net.arcs[j].latency.k1 == doctest::Approx(k1[j]));
    }
}

TEST_CASE("network schema errors") {
    CHECK_THROWS_AS(network_from_json("not json"), SchemaError);
    CHECK_THROWS_AS(network_from_json("{}"), SchemaError);
    CHECK_THROWS_AS(network_from_json(R"({"nodes": ["o","d"], "arcs": [],
        "origin": "o", "destination": "d", "demand": 1.0})"),
                    SchemaError);  // no arcs -> d unreachable
    CHECK_THROWS_AS(network_from_json(R"({"nodes": ["o","o"], "arcs": [],
        "origin": "o", "destination": "o", "demand": 1.0})"),
                    SchemaError);  // duplicate node id
    CHECK_THROWS_AS(network_from_json(R"({"nodes": ["o","d"],
        "arcs": [{"id":"a","tail":"o","head":"x",
                  "latency":{"kind":"affine","k0":0,"k1":1}}],
        "origin": "o", "destination": "d", "demand": 1.0})"),
                    SchemaError);  // unknown head id
    CHECK_THROWS_AS(network_from_json(R"({"nodes": ["o","d"],
        "arcs": [{"id":"a","tail":"o","head":"d",
                  "latency":{"kind":"affine","k0":0,"k1":1}}],
        "origin": "o", "destination": "d", "demand": -1.0})"),
                    SchemaError);
}

TEST_CASE("codag JSON round trip preserves structure") {
    auto g = build_codag(corpus::figure1());
    auto text = codag_to_json(g);
    auto again = codag_from_json(text);
    CHECK(again.num_nodes == g.num_nodes);
    REQUIRE(again.arcs.size() == g.arcs.size());
    for (std::size_t j = 0; j < g.arcs.size(); ++j) {
        CHECK(again.arcs[j].tail == g.arcs[j].tail);
        CHECK(again.arcs[j].head == g.arcs[j].head);
        CHECK(again.arcs[j].original_arc == g.arcs[j].original_arc);
    }
    CHECK(again.origin == g.origin);
    CHECK(again.destination == g.destination);
    CHECK(again.table.arc_depth == g.table.arc_depth);
    CHECK(again.table.arc_height == g.table.arc_height);
    CHECK(again.network.arcs.size() == g.network.arcs.size());
    // Byte-stable serialization.
    CHECK(codag_to_json(again) == text);
}

TEST_CASE("codag JSON rejects tampered graphs") {
    auto g = build_codag(corpus::figure1());
    CHECK_THROWS_AS(codag_from_json("{}"), SchemaError);

    // Reverse one arc to create a cycle.
    auto broken = g;
    std::swap(broken.arcs[2].tail, broken.arcs[2].head);
    CHECK_THROWS_AS(codag_from_json(codag_to_json(broken)), SchemaError);
}

TEST_CASE("equilibrium JSON carries flows under both labelings") {
    auto g = build_codag(corpus::figure1());
    auto eq = solve_fixed_point(g, 10.0, 1.0);
    auto text = equilibrium_to_json(g, eq);
    CHECK(text.find("\"flows\"") != std::string::npos);
    CHECK(text.find("\"original_flows\"") != std::string::npos);
    CHECK(text.find("\"a1\"") != std::string::npos);
    CHECK(text.find("\"method\"") != std::string::npos);
}

TEST_CASE("trajectory CSV shape") {
    auto g = build_codag(corpus::figure1());
    SimulationConfig cfg;
    cfg.beta = 10.0;
    cfg.noise.seed = 3;
    cfg.rates = uniform_rates(g);
    cfg.steps = 5;
    auto eq = solve_fixed_point(g, 10.0, 1.0);
    auto traj = simulate(g, cfg, &eq);
    auto csv = trajectory_to_csv(g, traj);
    std::istringstream lines(csv);
    std::string line;
    int rows = 0;
    std::size_t cols = 0;
    while (std::getline(lines, line)) {
        std::size_t commas = 0;
        for (char c : line)
            if (c == ',') ++commas;
        if (rows == 0) {
            cols = commas + 1;
            CHECK(line.substr(0, 5) == "step,");
            CHECK(line.find("F,dist_sq") != std::string::npos);
        } else {
            CHECK(commas + 1 == cols);
        }
        ++rows;
    }
    CHECK(rows == 7);  // header + 6 samples
    CHECK(cols == 1 + 2 * g.arcs.size() + 2);
}

TEST_CASE("toml parser handles the supported subset") {
    auto vals = parse_toml(
        "# comment\n"
        "top = 3\n"
        "[alpha]\n"
        "name = \"hello # not a comment\"  # trailing\n"
        "flag = true\n"
        "ratio = 2.5e-1\n"
        "seeds = [1, 2, 3]\n"
        "\n"
        "[beta]\n"
        "empty = []\n");
    CHECK(vals.at("top").num == doctest::Approx(3.0));
    CHECK(vals.at("alpha.name").str == "hello # not a comment");
    CHECK(vals.at("alpha.flag").boolean);
    CHECK(vals.at("alpha.ratio").num == doctest::Approx(0.25));
    REQUIRE(vals.at("alpha.seeds").array.size() == 3);
    CHECK(vals.at("alpha.seeds").array[1].num == doctest::Approx(2.0));
    CHECK(vals.at("beta.empty").array.empty());

    CHECK_THROWS_AS(parse_toml("key \"no equals\"\n"), SchemaError);
    CHECK_THROWS_AS(parse_toml("[unclosed\n"), SchemaError);
}

TEST_CASE("scenario parsing") {
    auto cfg = load_scenario(corpus::data_path("figure1_scenario.toml"));
    CHECK(cfg.network_path == "figure1_network.json");
    CHECK(cfg.beta == doctest::Approx(10.0));
    CHECK(cfg.demand == doctest::Approx(1.0));
    CHECK(cfg.steps == 300);
    CHECK(cfg.burn_in == 150);
    CHECK(cfg.noise_lower == doctest::Approx(1e-6));
    CHECK(cfg.noise_upper == doctest::Approx(0.1));
    CHECK(cfg.noise_kind == "uniform");
    CHECK(cfg.rates_mode == "uniform");
    CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(cfg.output_dir == "scenario_out");

    CHECK_THROWS_AS(scenario_from_toml("[scenario]\nbeta = 1.0\n"), SchemaError);
}

TEST_CASE("structure and kkt reports serialize") {
    auto g = build_codag(corpus::figure1());
    auto rep = verify_structure(g.digraph(), g.origin, g.destination, g.table);
    auto text = structure_report_to_json(rep);
    CHECK(text.find("depth_one_iff_origin_tail") != std::string::npos);
    CHECK(text.find("true") != std::string::npos);

    auto eq = solve_fixed_point(g, 10.0, 1.0, 0.5, 1e-12);
    auto kkt = kkt_check(g, eq.w, 10.0, 1.0, 1e-7);
    auto ktext = kkt_report_to_json(kkt);
    CHECK(ktext.find("max_stationarity") != std::string::npos);
    CHECK(ktext.find("multipliers") != std::string::npos);
}
