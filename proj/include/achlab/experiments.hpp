#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "achlab/photography.hpp"

namespace ach {

// flat key = value configuration; bracket sections group keys for
// readability only, key names stay globally unique
struct ExperimentConfig {
    std::string name;                 // recipe
    std::string potential = "double-well";
    std::string grid = "256x256";
    std::string rho = "1";
    std::vector<double> eps;
    std::vector<double> volume;
    std::string tau = "auto";
    std::string omega = "unit";
    std::string cluster;              // input snapshot path
    std::string samples = "4x4";
    std::string out;
    std::string field_out;
    std::string cluster_out;
    double tol = 1e-8;
    double dt = -1;
    int nodes = 64;
    int modes = 3;
    int seeds = 32;
    std::uint64_t seed = 7;

    std::map<std::string, std::string> raw;  // as parsed, embedded in reports
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

struct ReportBundle {
    std::string csv;
    std::string json;
    bool passed = true;
    std::vector<std::string> notes;
};

// dispatches on cfg.name; writes cfg.out and cfg.out + ".json" when set
ReportBundle run(const ExperimentConfig& cfg);

std::string artifact_version();

}  // namespace ach
