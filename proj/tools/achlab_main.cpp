#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "achlab/experiments.hpp"

namespace {

struct SubState {
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

void add_keys(CLI::App* app, SubState& st, const std::vector<std::string>& keys) {
    app->add_option("--config", st.config_path, "config file (key = value)");
    for (const std::string& key : keys) {
        auto setter = [&st, key](const std::string& v) {
            st.overrides[key] = v;
            return true;
        };
        app->add_option_function<std::string>("--" + key, setter);
    }
}

int run_recipe(const std::string& name, const SubState& st) {
    try {
        ach::ExperimentConfig cfg;
        if (!st.config_path.empty()) cfg = ach::load_config(st.config_path);
        cfg.name = name;
        for (const auto& [k, v] : st.overrides) {
            // CLI flag aliases onto config keys
            std::string key = k;
            if (key == "volumes") key = "volume";
            if (key == "field-out") key = "field_out";
            if (key == "cluster-out") key = "cluster_out";
            ach::apply_override(cfg, key, v);
        }
        ach::ReportBundle rep = ach::run(cfg);
        for (const std::string& n : rep.notes) std::printf("%s\n", n.c_str());
        if (cfg.out.empty()) std::fputs(rep.csv.c_str(), stdout);
        std::printf("%s: %s\n", name.c_str(), rep.passed ? "pass" : "FAIL");
        return rep.passed ? 0 : 1;
    } catch (const ach::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for multiphase transition energies"};
    app.set_version_flag("--version", ach::artifact_version());
    app.require_subcommand(0, 1);

    std::map<std::string, std::vector<std::string>> recipes = {
        {"tension", {"potential", "nodes", "seed", "out"}},
        {"minimize",
         {"eps", "volume", "grid", "rho", "seed", "tol", "out", "field-out",
          "potential"}},
        {"hunt",
         {"eps", "volume", "grid", "rho", "seed", "tol", "out", "seeds",
          "potential", "nodes"}},
        {"degeneracy-scan",
         {"eps", "volume", "grid", "rho", "seed", "tol", "out", "modes",
          "potential"}},
        {"isoperimetric",
         {"volumes", "omega", "grid", "rho", "dt", "out", "cluster-out"}},
        {"gamma-sweep",
         {"cluster", "eps", "tau", "out", "grid", "volume", "potential",
          "nodes"}},
        {"homotopy",
         {"volume", "eps", "samples", "out", "grid", "rho", "potential",
          "nodes"}},
        {"recover",
         {"cluster", "eps", "tau", "out", "field-out", "grid", "volume",
          "potential", "nodes"}},
    };
    std::map<std::string, SubState> states;
    for (auto& [name, keys] : recipes)
        add_keys(app.add_subcommand(name), states[name], keys);

    CLI11_PARSE(app, argc, argv);
    for (auto& [name, st] : states)
        if (app.get_subcommand(name)->parsed()) return run_recipe(name, st);
    std::fputs(app.help().c_str(), stdout);
    return 0;
}
