#pragma once

#include <string>
#include <vector>

#include "achlab/recovery.hpp"

namespace ach {

// point on the torus, coordinates reduced modulo the side lengths
struct TorusPoint {
    std::vector<double> x;

    static TorusPoint reduced(const TorusGrid& g, std::vector<double> coords) {
        TorusPoint p;
        for (int k = 0; k < g.n; ++k) {
            double L = g.lengths[k];
            double c = std::fmod(coords[k], L);
            if (c < 0) c += L;
            p.x.push_back(c);
        }
        return p;
    }
};

// canonical small cluster centered at x; shape_rule: "auto", "disk",
// "bubble", or "tangent" (two tangent disks for N = 3)
Cluster canonical_cluster(const TorusPoint& x, const Vec& v, int N,
                          const TorusGrid& grid,
                          const std::string& shape_rule = "auto");

// recovery field of the canonical cluster at x with exact volume v
Field photo(const TorusPoint& x, const Vec& v, double eps, const Potential& P,
            const TensionMatrix& T, const ConformalMetric& g,
            const std::string& shape_rule = "auto", int profile_K = 256);

struct BarycenterResult {
    std::vector<double> embedded;  // (cos, sin) pair per axis
    bool defined = false;
    TorusPoint projected;
};

// mass-weighted average under the flat torus embedding in R^{2n},
// projected back by angle; undefined when a pair lands at its circle center
BarycenterResult barycenter(const Field& u, const ConformalMetric& g);

struct HomotopyRow {
    TorusPoint x;
    TorusPoint back;
    double dist = 0;
    bool defined = false;
};

struct HomotopyReport {
    double max_dist = 0;   // +inf when any barycenter is undefined
    bool all_defined = true;
    std::vector<HomotopyRow> table;
};

HomotopyReport homotopy_check(const Vec& v, double eps, const Potential& P,
                              const TensionMatrix& T, const ConformalMetric& g,
                              const std::vector<TorusPoint>& sample,
                              const std::string& shape_rule = "auto");

struct ConcentrationReport {
    TorusPoint x_star;
    double mass_fraction = 0;
};

// cell-centered box window of half-width r/2 per axis as the ball surrogate
ConcentrationReport concentration_report(const Field& u, const ConformalMetric& g,
                                         double r);

}  // namespace ach
