#pragma once

#include <string>
#include <vector>

#include "achlab/cluster.hpp"
#include "achlab/field.hpp"

namespace ach {

// sampled 1-D transition profiles, one per unordered well pair
struct ProfileTable {
    int N = 0;
    double eps = 0, tau = 0;
    int K = 0;
    std::vector<std::vector<Vec>> q;  // pair -> K points along the path
    std::vector<double> eta;          // pair -> transition width
    double C1 = 0;  // max over pairs of tau^{-1/2} * path length
    double C2 = 0;  // sup |q|
    double C3 = 0;  // Lipschitz scale: eps * max |q'|

    // profile for the ordered pair (i,j): p_i for t <= 0, p_j beyond eta;
    // i > j evaluates the stored (j,i) table mirrored
    Vec eval(int i, int j, double t) const;
    double width(int i, int j) const;

    // densified path nodes and their cumulative argument, used by eval so
    // the evaluation does not depend on the K reporting resolution
    std::vector<std::vector<Vec>> nodes;
    std::vector<std::vector<double>> psi;
};

ProfileTable build_profile(const Potential& P, const TensionMatrix& T, double eps,
                           double tau, int K = 256);

// signed distance per interior chamber, negative inside
struct SignedDistanceSet {
    TorusGrid grid;
    std::vector<std::vector<double>> d;  // N-1 fields
    bool exact = true;
};

SignedDistanceSet signed_distances(const Cluster& c);

// signed distance to one chamber's boundary, negative inside the chamber
std::vector<double> signed_distance_to_chamber(const Cluster& c, int label);

struct RecoveryOptions {
    double tau = -1;    // default sqrt(eps)
    int profile_K = 256;
};

struct RecoveryResult {
    Field u;
    Vec zeta;            // per interior chamber layer shift
    Vec nu;              // volume mismatch before the exact correction
    bool cone_patched = false;
    Vec xi;              // cone patch amplitude per component
    bool resolution_ok = true;  // h <= eps/8
};

// profile-composed approximation of the cluster's limit field with the
// volume made exact by a cone patch plus constant shift
RecoveryResult modica_baldo(const Cluster& c, const Potential& P,
                            const TensionMatrix& T, double eps, double tau,
                            const ConformalMetric& g, const Vec& v_target,
                            int profile_K = 256);

// componentwise volume of the limit field sum_i p_i * chi_i
Vec cluster_phase_volume(const Cluster& c, const Potential& P,
                         const ConformalMetric& g);

struct GammaRow {
    double eps = 0, tau = 0, energy = 0, perimeter = 0, gap = 0, gap_over_eps = 0;
};

struct GammaTable {
    std::vector<GammaRow> rows;
    bool gaps_decreasing = false;
};

// tau_rule: "sqrt" -> sqrt(eps), "auto"/"linear" -> eps, or a numeric constant
double tau_from_rule(const std::string& rule, double eps);

GammaTable gamma_sweep(const Cluster& c, const Potential& P, const TensionMatrix& T,
                       const ConformalMetric& g, const std::vector<double>& eps_list,
                       const std::string& tau_rule);

// compares twice the sup-of-boundary-measures of the well distance fields
// against the multi-perimeter of the labeled cluster
std::pair<double, double> sup_measure_check(const Field& u, const Potential& P,
                                            const TensionMatrix& T,
                                            const ConformalMetric& g);

}  // namespace ach
