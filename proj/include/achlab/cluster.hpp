#pragma once

#include <string>
#include <vector>

#include "achlab/grid.hpp"
#include "achlab/tension.hpp"

namespace ach {

// chamber labels in 1..N per cell; chamber N is the exterior
struct Cluster {
    TorusGrid grid;
    int N = 2;
    std::vector<int> labels;

    Cluster() = default;
    Cluster(const TorusGrid& g, int chambers, int fill_label)
        : grid(g), N(chambers), labels(g.cells(), fill_label) {}
    int label(long cell) const { return labels[cell]; }
    void validate() const {
        for (int l : labels)
            if (l < 1 || l > N) throw ShapeError("cluster label out of range");
    }
};

std::string cluster_to_text(const Cluster& c);
Cluster cluster_from_text(const std::string& text);
void save_cluster(const Cluster& c, const std::string& path);
Cluster load_cluster(const std::string& path);

// b-weighted volume per chamber, length N
Vec volumes(const Cluster& c, const ConformalMetric& g);

// symmetric N x N matrix of weighted interface areas between chambers,
// counted over shared grid faces (the l^1 estimator)
Mat interface_measure(const Cluster& c, const ConformalMetric& g);

// sum over ordered pairs (i,j), i != j, of omega_ij * area(interface_ij);
// equals twice the sum over unordered pairs
double multi_perimeter(const Cluster& c, const TensionMatrix& omega,
                       const ConformalMetric& g);

// sum over interior chambers of the volume of the symmetric difference
double flat_distance(const Cluster& c1, const Cluster& c2, const ConformalMetric& g);

struct DiameterResult {
    double value = 0;
    bool exact = true;
};

// largest periodic distance between interior cell centers
DiameterResult interior_diameter(const Cluster& c);

// label each cell by the nearest well in the degenerate path metric,
// memoized on a lookup grid over the sampled value range
Cluster from_field(const Field& u, const Potential& P, const TensionMatrix& T);

// per-well distance fields Phi_i(x) = d_W(p_i, u(x)), same memoization
std::vector<std::vector<double>> phase_distances(const Field& u, const Potential& P);

struct IsoBounds {
    double lower = 0, upper = 0;
    double C0 = 0, C0_tilde = 0;
};

// two-sided perimeter bounds for interior volumes v (length N-1)
IsoBounds isoperimetric_bounds(const Vec& v, const TensionMatrix& omega, int n);

// Euclidean isoperimetric constant: perimeter >= c_n * volume^{(n-1)/n}
double isoperimetric_constant(int n);

struct MboOptions {
    double dt = -1;       // default (4h)^2
    int max_sweeps = 500;
    int stall = 0;        // stop when label changes per sweep <= stall
};

struct MboResult {
    Cluster cluster;
    bool converged = false;
    int sweeps = 0;
};

// tension-weighted threshold dynamics with exact volume restoration
MboResult mbo_minimize(const Vec& v, const TensionMatrix& omega,
                       const ConformalMetric& g, const MboOptions& opts = {});

// smoothed-indicator boundary measure; isotropic counterpart to
// interface_measure, counting each interface once
double isotropic_perimeter(const Cluster& c, const ConformalMetric& g);

struct SubdomainReport {
    double diameter = 0;
    bool diameter_exact = true;
    double interior_volume = 0;
    double ratio = 0;  // diameter / volume^{1/n}
    int components = 0;
};

SubdomainReport large_subdomain_report(const Cluster& c, const ConformalMetric& g);

// canonical shapes used by tests and the photography map
Cluster digital_disk(const TorusGrid& g, double cx, double cy, double area);
Cluster digital_interval(const TorusGrid& g, double center, double length);
// equal-weight standard double bubble (two lobes bounded by circular arcs
// meeting at 120 degrees), discretized; volumes are approximate
Cluster double_bubble(const TorusGrid& g, double cx, double cy, double v1, double v2);

}  // namespace ach
