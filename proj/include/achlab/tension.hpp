#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "achlab/potential.hpp"

namespace ach {

struct OptimizeOptions {
    int max_iters = 100000;
    double tol = 1e-10;       // relative decrease threshold
    int patience = 50;        // iterations without improvement before stopping
    int multistart = 3;
    std::uint64_t seed = 1;
    bool throw_on_stall = true;
};

struct GeodesicResult {
    double distance = 0;
    std::vector<Vec> path;  // K+1 nodes from a to b, all in R^m_+
    int iterations = 0;
    bool converged = false;
};

// discrete minimization of int W^{1/2}(c)|c'| over polylines in R^m_+
GeodesicResult geodesic_distance(const Potential& P, const Vec& a, const Vec& b,
                                 int K, const OptimizeOptions& opts = {});

struct TensionMatrix {
    int N = 0;
    Mat omega;                               // N x N, symmetric, zero diagonal
    std::vector<std::vector<Vec>> paths;     // per unordered pair, index pair_index(i,j)
    std::vector<int> iterations;             // per unordered pair
    bool immiscible = false;
    double worst_margin = 0;

    double at(int i, int j) const { return omega[i * N + j]; }
    static int pair_index(int i, int j, int N);
    const std::vector<Vec>& path(int i, int j) const {
        return paths[pair_index(i, j, N)];
    }
};

TensionMatrix tension_matrix(const Potential& P, int K,
                             const OptimizeOptions& opts = {});

// strict triangle inequality test; also returns the worst margin
// min_{i,j,l} (omega[i][l] + omega[l][j] - omega[i][j])
std::pair<bool, double> check_immiscible(const Mat& omega, int N);

// unit-weight matrix alpha_ij = 1 - delta_ij, useful as a neutral tension
TensionMatrix unit_tensions(int N);

}  // namespace ach
