#include "achlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "achlab/rng.hpp"
#include "json.hpp"

namespace ach {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad number in '" + key + "': " + tok);
        }
    }
    return out;
}

double parse_num(const std::string& key, const std::string& v) {
    auto l = parse_list(key, v);
    if (l.size() != 1) throw ConfigError("'" + key + "' expects one number");
    return l[0];
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

Potential make_potential(const ExperimentConfig& cfg) {
    if (cfg.potential == "double-well") return build_double_well();
    if (cfg.potential == "triple-well")
        return build_product_triple_well(Vec{1, 0}, Vec{0, 1});
    return load_potential(cfg.potential);
}

TorusGrid make_grid(const ExperimentConfig& cfg) {
    std::string s = cfg.grid;
    std::size_t x = s.find('x');
    try {
        if (x == std::string::npos) return TorusGrid::line(std::stoi(s));
        return TorusGrid::square(std::stoi(s.substr(0, x)),
                                 std::stoi(s.substr(x + 1)));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad 'grid' spec: " + s);
    }
}

void require(const ExperimentConfig& cfg, const char* key) {
    if (!cfg.raw.count(key))
        throw ConfigError(std::string("missing required key '") + key + "'");
}

std::string config_comment(const ExperimentConfig& cfg) {
    std::string out = "# recipe = " + cfg.name + "\n";
    for (const auto& [k, v] : cfg.raw)
        if (k != "name") out += "# " + k + " = " + v + "\n";
    if (!cfg.raw.count("seed"))
        out += "# seed = " + std::to_string(cfg.seed) + "\n";
    return out;
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["recipe"] = cfg.name;
    j["seed"] = cfg.seed;
    for (const auto& [k, v] : cfg.raw) j["config"][k] = v;
    return j;
}

TensionMatrix make_tensions(const ExperimentConfig& cfg, const Potential& P) {
    OptimizeOptions opts;
    opts.seed = cfg.seed;
    return tension_matrix(P, cfg.nodes, opts);
}

Cluster droplet_cluster(const ExperimentConfig& cfg, const TorusGrid& g) {
    if (!cfg.cluster.empty()) return load_cluster(cfg.cluster);
    if (cfg.volume.empty()) throw ConfigError("missing required key 'volume'");
    if (g.n == 1) return digital_interval(g, 0.5 * g.lengths[0], cfg.volume[0]);
    return digital_disk(g, 0.5 * g.lengths[0], 0.5 * g.lengths[1], cfg.volume[0]);
}

ReportBundle run_tension(const ExperimentConfig& cfg) {
    Potential P = make_potential(cfg);
    TensionMatrix T = make_tensions(cfg, P);
    ReportBundle rep;
    rep.csv = config_comment(cfg) + "i,j,omega,margin_to_triangle,iterations\n";
    for (int i = 0; i < T.N; ++i)
        for (int j = i + 1; j < T.N; ++j) {
            double margin = std::numeric_limits<double>::infinity();
            for (int l = 0; l < T.N; ++l) {
                if (l == i || l == j) continue;
                margin = std::min(margin, T.at(i, l) + T.at(l, j) - T.at(i, j));
            }
            rep.csv += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                       fmt(T.at(i, j)) + "," + fmt(margin) + "," +
                       std::to_string(T.iterations[TensionMatrix::pair_index(
                           i, j, T.N)]) +
                       "\n";
        }
    rep.passed = T.immiscible || T.N < 3;  // no triples to violate for N = 2
    nlohmann::json j = config_json(cfg);
    j["immiscible"] = T.immiscible;
    j["worst_margin"] = T.worst_margin;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

Field noisy_constant(const ExperimentConfig& cfg, const Potential& P,
                     const ConformalMetric& g, const Vec& v) {
    Field u(g.grid, P.m(), 0.0);
    Rng rng(cfg.seed);
    for (int c = 0; c < P.m(); ++c)
        for (long cell = 0; cell < g.grid.cells(); ++cell)
            u.at(c, cell) = v[c] / g.vol_b + 0.1 * (rng.uniform() - 0.5);
    return project_volume(u, v, g);
}

void emit_point(std::string& csv, int idx, const CriticalPoint& cp) {
    csv += std::to_string(idx) + "," + fmt(cp.epsilon) + "," + fmt(cp.energy) +
           "," + fmt(cp.residual_norm);
    for (double l : cp.lambda) csv += "," + fmt(l);
    for (double v : cp.volume) csv += "," + fmt(v);
    csv += "," + std::to_string(cp.iterations) + "," +
           (cp.converged ? "1" : "0") + "\n";
}

ReportBundle run_minimize(const ExperimentConfig& cfg) {
    require(cfg, "eps");
    require(cfg, "volume");
    Potential P = make_potential(cfg);
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    Vec v(cfg.volume.begin(), cfg.volume.end());
    FlowOptions fo;
    fo.tol = cfg.tol;
    fo.throw_on_fail = false;
    CriticalPoint cp = constrained_flow(noisy_constant(cfg, P, M, v), cfg.eps[0],
                                        v, P, M, fo);
    ReportBundle rep;
    rep.csv = config_comment(cfg) +
              "idx,eps,energy,residual,lambda...,volume...,iterations,converged\n";
    emit_point(rep.csv, 0, cp);
    rep.passed = cp.converged;
    if (!cfg.field_out.empty()) save_field(cp.u, cfg.field_out);
    nlohmann::json j = config_json(cfg);
    j["energy"] = cp.energy;
    j["residual"] = cp.residual_norm;
    j["converged"] = cp.converged;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

ReportBundle run_hunt(const ExperimentConfig& cfg) {
    require(cfg, "eps");
    require(cfg, "volume");
    Potential P = make_potential(cfg);
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    TensionMatrix T = make_tensions(cfg, P);
    Vec v(cfg.volume.begin(), cfg.volume.end());
    double eps = cfg.eps[0];

    Rng rng(cfg.seed);
    std::vector<Field> seeds;
    for (int s = 0; s < cfg.seeds; ++s) {
        std::vector<double> x{rng.uniform(0, grid.lengths[0])};
        if (grid.n == 2) x.push_back(rng.uniform(0, grid.lengths[1]));
        seeds.push_back(photo(TorusPoint::reduced(grid, x), v, eps, P, T, M));
    }
    HuntOptions ho;
    ho.flow.tol = cfg.tol;
    ho.flow.throw_on_fail = false;
    HuntReport hr = hunt(P, M, eps, v, seeds, ho);

    ReportBundle rep;
    rep.csv = config_comment(cfg) +
              "idx,eps,energy,residual,lambda...,volume...,iterations,converged\n";
    rep.passed = hr.dropped == 0;
    for (std::size_t i = 0; i < hr.points.size(); ++i) {
        const CriticalPoint& cp = hr.points[i];
        emit_point(rep.csv, (int)i, cp);
        if (cp.residual_norm > cfg.tol) rep.passed = false;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (std::fabs(cp.volume[c] - v[c]) > 1e-12 * (1 + std::fabs(v[c])))
                rep.passed = false;
    }
    int prediction = grid.n + 2;  // cat(T^n) + 1 with cat(T^n) = n + 1
    rep.notes.push_back("eta = " + std::to_string(hr.eta) +
                        " vs predicted >= " + std::to_string(prediction) +
                        " (soft)");
    nlohmann::json j = config_json(cfg);
    j["eta"] = hr.eta;
    j["dropped"] = hr.dropped;
    j["prediction"] = prediction;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

ReportBundle run_degeneracy(const ExperimentConfig& cfg) {
    require(cfg, "eps");
    require(cfg, "volume");
    if (cfg.eps.size() < 2)
        throw ConfigError("'eps' must give a lo,hi range for the scan");
    Potential P = make_potential(cfg);
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    Vec v(cfg.volume.begin(), cfg.volume.end());
    double lo = *std::min_element(cfg.eps.begin(), cfg.eps.end());
    double hi = *std::max_element(cfg.eps.begin(), cfg.eps.end());
    std::vector<double> eps = degeneracy_scan(P, v, M, lo, hi, cfg.modes);
    ReportBundle rep;
    rep.csv = config_comment(cfg) + "eps_degenerate\n";
    for (double e : eps) rep.csv += fmt(e) + "\n";
    nlohmann::json j = config_json(cfg);
    j["count"] = eps.size();
    j["eps_degenerate"] = eps;
    j["passed"] = true;
    rep.json = j.dump(2);
    return rep;
}

ReportBundle run_isoperimetric(const ExperimentConfig& cfg) {
    require(cfg, "volume");
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    Vec v(cfg.volume.begin(), cfg.volume.end());
    int N = (int)v.size() + 1;
    TensionMatrix T;
    if (cfg.omega == "unit") {
        T = unit_tensions(N);
    } else {
        std::ifstream in(cfg.omega);
        if (!in) throw ConfigError("cannot read 'omega' matrix: " + cfg.omega);
        T.N = N;
        T.omega.assign(N * N, 0.0);
        for (double& x : T.omega)
            if (!(in >> x)) throw ConfigError("'omega' matrix needs NxN numbers");
        auto [ok, margin] = check_immiscible(T.omega, N);
        T.immiscible = ok;
        T.worst_margin = margin;
    }
    MboOptions mo;
    mo.dt = cfg.dt;
    MboResult r = mbo_minimize(v, T, M, mo);
    double iso = isotropic_perimeter(r.cluster, M);
    double wper = multi_perimeter(r.cluster, T, M);
    Vec vols = volumes(r.cluster, M);
    ReportBundle rep;
    rep.csv = config_comment(cfg) +
              "sweeps,converged,perimeter_isotropic,perimeter_weighted";
    for (int i = 1; i < N; ++i) rep.csv += ",v" + std::to_string(i);
    rep.csv += "\n" + std::to_string(r.sweeps) + "," +
               (r.converged ? "1" : "0") + "," + fmt(iso) + "," + fmt(wper);
    for (int i = 0; i + 1 < N; ++i) rep.csv += "," + fmt(vols[i]);
    rep.csv += "\n";
    rep.passed = r.converged;
    if (!cfg.cluster_out.empty()) save_cluster(r.cluster, cfg.cluster_out);
    nlohmann::json j = config_json(cfg);
    j["perimeter_isotropic"] = iso;
    j["perimeter_weighted"] = wper;
    j["sweeps"] = r.sweeps;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

ReportBundle run_gamma(const ExperimentConfig& cfg) {
    require(cfg, "eps");
    Potential P = make_potential(cfg);
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    TensionMatrix T = make_tensions(cfg, P);
    Cluster c = droplet_cluster(cfg, grid);
    GammaTable tab = gamma_sweep(c, P, T, M, cfg.eps, cfg.tau);
    ReportBundle rep;
    rep.csv = config_comment(cfg) + "eps,tau,energy,perimeter,gap\n";
    for (const GammaRow& row : tab.rows)
        rep.csv += fmt(row.eps) + "," + fmt(row.tau) + "," + fmt(row.energy) +
                   "," + fmt(row.perimeter) + "," + fmt(row.gap) + "\n";
    rep.passed = tab.gaps_decreasing;
    nlohmann::json j = config_json(cfg);
    j["gaps_decreasing"] = tab.gaps_decreasing;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

ReportBundle run_homotopy(const ExperimentConfig& cfg) {
    require(cfg, "eps");
    require(cfg, "volume");
    Potential P = make_potential(cfg);
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    TensionMatrix T = make_tensions(cfg, P);
    Vec v(cfg.volume.begin(), cfg.volume.end());

    int k0 = 4, k1 = 4;
    std::size_t x = cfg.samples.find('x');
    try {
        if (x == std::string::npos) {
            k0 = k1 = std::stoi(cfg.samples);
        } else {
            k0 = std::stoi(cfg.samples.substr(0, x));
            k1 = std::stoi(cfg.samples.substr(x + 1));
        }
    } catch (const std::exception&) {
        throw ConfigError("bad 'samples' spec: " + cfg.samples);
    }
    std::vector<TorusPoint> pts;
    for (int a = 0; a < k0; ++a) {
        if (grid.n == 1) {
            pts.push_back(TorusPoint::reduced(
                grid, {(a + 0.5) / k0 * grid.lengths[0]}));
            continue;
        }
        for (int b = 0; b < k1; ++b)
            pts.push_back(TorusPoint::reduced(
                grid, {(a + 0.5) / k0 * grid.lengths[0],
                       (b + 0.5) / k1 * grid.lengths[1]}));
    }
    HomotopyReport hr = homotopy_check(v, cfg.eps[0], P, T, M, pts);
    ReportBundle rep;
    rep.csv = config_comment(cfg) + "x1,x2,back1,back2,dist,defined\n";
    for (const HomotopyRow& row : hr.table) {
        rep.csv += fmt(row.x.x[0]) + "," +
                   fmt(grid.n == 2 ? row.x.x[1] : 0.0) + ",";
        if (row.defined)
            rep.csv += fmt(row.back.x[0]) + "," +
                       fmt(grid.n == 2 ? row.back.x[1] : 0.0) + "," +
                       fmt(row.dist) + ",1\n";
        else
            rep.csv += "nan,nan,inf,0\n";
    }
    double threshold = 3 * grid.h(0);
    rep.passed = hr.all_defined && hr.max_dist < threshold;
    nlohmann::json j = config_json(cfg);
    j["max_dist"] = hr.max_dist;
    j["threshold"] = threshold;
    j["all_defined"] = hr.all_defined;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

ReportBundle run_recover(const ExperimentConfig& cfg) {
    require(cfg, "eps");
    Potential P = make_potential(cfg);
    TorusGrid grid = make_grid(cfg);
    ConformalMetric M = metric_from_expr(grid, cfg.rho);
    TensionMatrix T = make_tensions(cfg, P);
    Cluster c = droplet_cluster(cfg, grid);
    double eps = cfg.eps[0];
    double tau = tau_from_rule(cfg.tau, eps);
    Vec target = cfg.volume.empty() ? cluster_phase_volume(c, P, M)
                                    : Vec(cfg.volume.begin(), cfg.volume.end());
    RecoveryResult r = modica_baldo(c, P, T, eps, tau, M, target);
    double E = energy(r.u, eps, P, M);
    double per = multi_perimeter(c, T, M);
    Vec vol = volume(r.u, M);
    ReportBundle rep;
    rep.csv = config_comment(cfg) +
              "eps,tau,energy,perimeter,gap,cone_patched,resolution_ok\n" +
              fmt(eps) + "," + fmt(tau) + "," + fmt(E) + "," + fmt(per) + "," +
              fmt(E - per) + "," + (r.cone_patched ? "1" : "0") + "," +
              (r.resolution_ok ? "1" : "0") + "\n";
    rep.passed = true;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (std::fabs(vol[i] - target[i]) > 1e-12 * (1 + std::fabs(target[i])))
            rep.passed = false;
    if (!cfg.field_out.empty()) save_field(r.u, cfg.field_out);
    nlohmann::json j = config_json(cfg);
    j["energy"] = E;
    j["perimeter"] = per;
    j["cone_patched"] = r.cone_patched;
    j["resolution_ok"] = r.resolution_ok;
    j["passed"] = rep.passed;
    rep.json = j.dump(2);
    return rep;
}

}  // namespace

std::string artifact_version() { return "achlab 0.1.0 (spec 1)"; }

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
    if (key == "name" || key == "experiment" || key == "recipe")
        cfg.name = value;
    else if (key == "potential")
        cfg.potential = value;
    else if (key == "grid" || key == "shape")
        cfg.grid = value;
    else if (key == "rho")
        cfg.rho = value;
    else if (key == "eps")
        cfg.eps = parse_list(key, value);
    else if (key == "volume" || key == "volumes")
        cfg.volume = parse_list(key, value);
    else if (key == "tau")
        cfg.tau = value;
    else if (key == "omega")
        cfg.omega = value;
    else if (key == "cluster")
        cfg.cluster = value;
    else if (key == "samples")
        cfg.samples = value;
    else if (key == "out")
        cfg.out = value;
    else if (key == "field_out")
        cfg.field_out = value;
    else if (key == "cluster_out")
        cfg.cluster_out = value;
    else if (key == "tol")
        cfg.tol = parse_num(key, value);
    else if (key == "dt")
        cfg.dt = parse_num(key, value);
    else if (key == "nodes")
        cfg.nodes = (int)parse_num(key, value);
    else if (key == "modes")
        cfg.modes = (int)parse_num(key, value);
    else if (key == "seeds")
        cfg.seeds = (int)parse_num(key, value);
    else if (key == "seed")
        cfg.seed = (std::uint64_t)parse_num(key, value);
    else
        throw ConfigError("unknown key '" + key + "'");
    cfg.raw[key == "experiment" || key == "recipe" ? "name" : key] = value;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int ln = 0;
    while (std::getline(ss, line)) {
        ++ln;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("unterminated section at line " +
                                  std::to_string(ln));
            continue;  // sections group keys for readability only
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(ln));
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ReportBundle run(const ExperimentConfig& cfg) {
    if (cfg.name.empty()) throw ConfigError("missing required key 'name'");
    ReportBundle rep;
    if (cfg.name == "tension")
        rep = run_tension(cfg);
    else if (cfg.name == "minimize")
        rep = run_minimize(cfg);
    else if (cfg.name == "hunt")
        rep = run_hunt(cfg);
    else if (cfg.name == "degeneracy-scan" || cfg.name == "degeneracy")
        rep = run_degeneracy(cfg);
    else if (cfg.name == "isoperimetric")
        rep = run_isoperimetric(cfg);
    else if (cfg.name == "gamma-sweep" || cfg.name == "gamma-1d")
        rep = run_gamma(cfg);
    else if (cfg.name == "homotopy")
        rep = run_homotopy(cfg);
    else if (cfg.name == "recover")
        rep = run_recover(cfg);
    else
        throw ConfigError("unknown recipe '" + cfg.name + "'");

    if (!cfg.out.empty()) {
        std::ofstream fc(cfg.out);
        if (!fc) throw IoError("cannot write report: " + cfg.out);
        fc << rep.csv;
        std::ofstream fj(cfg.out + ".json");
        fj << rep.json << "\n";
    }
    return rep;
}

}  // namespace ach
