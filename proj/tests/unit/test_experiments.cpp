#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "achlab/experiments.hpp"

using namespace ach;

namespace {

int count_rows(const std::string& csv) {
    int rows = 0;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') ++rows;
    return rows - 1;  // header
}

}  // namespace

TEST_CASE("config parsing, sections and validation") {
    ExperimentConfig cfg = parse_config(
        "# comment\n"
        "[experiment]\n"
        "name = gamma-1d\n"
        "seed = 11\n"
        "\n"
        "[run]\n"
        "eps = 0.04, 0.02\n"
        "volume = 0.3\n"
        "grid = 1024\n"
        "tau = auto\n");
    CHECK(cfg.name == "gamma-1d");
    CHECK(cfg.seed == 11);
    CHECK(cfg.eps == std::vector<double>{0.04, 0.02});
    CHECK(cfg.volume == std::vector<double>{0.3});
    CHECK(cfg.grid == "1024");

    CHECK_THROWS_WITH_AS(parse_config("epsilonn = 3\n"),
                         doctest::Contains("epsilonn"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("eps = banana\n"),
                         doctest::Contains("eps"), ConfigError);
    CHECK_THROWS_AS(parse_config("just a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[unterminated\n"), ConfigError);

    // missing required key surfaces its name
    ExperimentConfig m = parse_config("name = minimize\nvolume = 0.3\n");
    CHECK_THROWS_WITH_AS(run(m), doctest::Contains("eps"), ConfigError);
    ExperimentConfig u;
    CHECK_THROWS_WITH_AS(run(u), doctest::Contains("name"), ConfigError);
    ExperimentConfig b = parse_config("name = frobnicate\n");
    CHECK_THROWS_WITH_AS(run(b), doctest::Contains("frobnicate"), ConfigError);
}

TEST_CASE("gamma-1d recipe: decreasing gaps and byte-identical reruns") {
    ExperimentConfig cfg = parse_config(
        "name = gamma-1d\n"
        "eps = 0.04,0.02\n"
        "volume = 0.3\n"
        "grid = 1024\n"
        "tau = auto\n"
        "nodes = 48\n");
    ReportBundle r1 = run(cfg);
    CHECK(r1.passed);
    CHECK(count_rows(r1.csv) == 2);
    CHECK(r1.csv.find("eps,tau,energy,perimeter,gap") != std::string::npos);
    CHECK(r1.csv.find("# volume = 0.3") != std::string::npos);

    ReportBundle r2 = run(cfg);
    CHECK(r1.csv == r2.csv);
    CHECK(r1.json == r2.json);

    // emitted numbers carry at least 12 significant digits
    std::stringstream ss(r1.csv);
    std::string line;
    while (std::getline(ss, line) && (line.empty() || line[0] == '#')) {
    }
    REQUIRE(std::getline(ss, line));
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // eps, short by value
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');  // energy
    CHECK(cell.size() >= 13);
}

TEST_CASE("degeneracy recipe lists the closed-form threshold") {
    ExperimentConfig cfg = parse_config(
        "name = degeneracy\n"
        "eps = 0.01,0.2\n"
        "volume = 0.5\n"
        "grid = 64x64\n");
    ReportBundle rep = run(cfg);
    CHECK(rep.passed);
    bool found = false;
    std::stringstream ss(rep.csv);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#' || !std::isdigit(line[0])) continue;
        if (std::fabs(std::stod(line) - 1 / (2 * M_PI)) <= 1e-6) found = true;
    }
    CHECK(found);
}

TEST_CASE("tension recipe emits the pair table") {
    ExperimentConfig cfg = parse_config(
        "name = tension\n"
        "potential = triple-well\n"
        "nodes = 24\n"
        "seed = 5\n");
    ReportBundle rep = run(cfg);
    CHECK(rep.passed);
    CHECK(count_rows(rep.csv) == 3);
    CHECK(rep.csv.find("i,j,omega,margin_to_triangle,iterations") !=
          std::string::npos);
    CHECK(rep.json.find("\"immiscible\": true") != std::string::npos);
}

TEST_CASE("minimize recipe converges on a small line") {
    ExperimentConfig cfg = parse_config(
        "name = minimize\n"
        "eps = 0.05\n"
        "volume = 0.4\n"
        "grid = 256\n"
        "tol = 1e-8\n"
        "seed = 3\n");
    ReportBundle rep = run(cfg);
    CHECK(rep.passed);
    CHECK(count_rows(rep.csv) == 1);
}

TEST_CASE("isoperimetric recipe reaches a disk") {
    ExperimentConfig cfg = parse_config(
        "name = isoperimetric\n"
        "volume = 0.05\n"
        "grid = 128x128\n");
    ReportBundle rep = run(cfg);
    CHECK(rep.passed);
    // perimeter_isotropic column close to the disk value
    std::stringstream ss(rep.csv);
    std::string line, last;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') last = line;
    std::stringstream row(last);
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) ==
          doctest::Approx(2 * std::sqrt(M_PI * 0.05)).epsilon(0.05));
}

TEST_CASE("homotopy recipe on a coarse lattice") {
    ExperimentConfig cfg = parse_config(
        "name = homotopy\n"
        "eps = 0.03\n"
        "volume = 0.02\n"
        "grid = 128x128\n"
        "samples = 2x2\n"
        "nodes = 48\n");
    ReportBundle rep = run(cfg);
    CHECK(rep.passed);
    CHECK(count_rows(rep.csv) == 4);
}

TEST_CASE("recover recipe writes reloadable snapshots") {
    std::string dir = "exp_test_out";
    std::remove((dir + ".csv").c_str());
    ExperimentConfig cfg = parse_config(
        "name = recover\n"
        "eps = 0.02\n"
        "volume = 0.3\n"
        "grid = 1024\n"
        "tau = auto\n"
        "nodes = 48\n"
        "out = exp_test_out.csv\n"
        "field_out = exp_test_out.achf\n");
    ReportBundle rep = run(cfg);
    CHECK(rep.passed);

    Field u = load_field("exp_test_out.achf");
    TorusGrid g = TorusGrid::line(1024);
    ConformalMetric M = ConformalMetric::flat(g);
    Vec vol = volume(u, M);
    CHECK(std::fabs(vol[0] - 0.3) <= 1e-12 * 1.3);

    std::ifstream fc("exp_test_out.csv");
    REQUIRE(fc.good());
    std::stringstream buf;
    buf << fc.rdbuf();
    CHECK(buf.str() == rep.csv);
    std::ifstream fj("exp_test_out.csv.json");
    CHECK(fj.good());
    std::remove("exp_test_out.csv");
    std::remove("exp_test_out.csv.json");
    std::remove("exp_test_out.achf");
}
