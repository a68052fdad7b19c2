#pragma once

#include <optional>
#include <vector>

#include "achlab/grid.hpp"
#include "achlab/potential.hpp"

namespace ach {

// vectorial ACH energy: sum over cells of (eps*a*|grad u|^2 + b*W(u)/eps) * cell measure
double energy(const Field& u, double eps, const Potential& P, const ConformalMetric& g);

// componentwise b-weighted integral of u
Vec volume(const Field& u, const ConformalMetric& g);

// componentwise b-weighted mean
Vec mean_b(const Field& u, const ConformalMetric& g);

double inner_b(const Field& x, const Field& y, const ConformalMetric& g);
double norm_b(const Field& x, const ConformalMetric& g);

// b^{-1} div(a grad u), adjoint pairing with the forward-difference gradient
Field weighted_laplacian(const Field& u, const ConformalMetric& g);

// exact L^2(b) gradient of the discrete energy: -2 eps Lap_g u + eps^{-1} grad W(u)
Field energy_gradient(const Field& u, double eps, const Potential& P,
                      const ConformalMetric& g);

// affine shift making the volume constraint exact
Field project_volume(const Field& u, const Vec& v, const ConformalMetric& g);

struct FlowOptions {
    double tol = 1e-8;
    long max_iters = 400000;
    bool throw_on_fail = true;
};

struct CriticalPoint {
    Field u;
    double epsilon = 0;
    Vec lambda;
    double energy = 0;
    double residual_norm = 0;
    Vec volume;
    bool converged = false;
    long iterations = 0;
    std::optional<bool> nondegenerate;
    double sigma_min = 0;
};

// volume-constrained projected gradient descent with backtracking
CriticalPoint constrained_flow(const Field& u0, double eps, const Vec& v,
                               const Potential& P, const ConformalMetric& g,
                               const FlowOptions& opts = {});

// linearized operator -eps Lap_g w + eps^{-1} Hess W(u) w
Field linearized_apply(const Field& u, const Field& w, double eps,
                       const Potential& P, const ConformalMetric& g);

// second variation of the discrete energy itself (twice the Dirichlet part)
Field energy_hessian_apply(const Field& u, const Field& w, double eps,
                           const Potential& P, const ConformalMetric& g);

struct NondegReport {
    bool nondegenerate = false;
    double sigma_min = 0;
    bool stalled = false;
};

// smallest-magnitude eigenvalue of the linearized operator on zero-b-mean fields,
// estimated with k Lanczos steps in the b inner product
NondegReport nondegeneracy_check(const CriticalPoint& cp, const Potential& P,
                                 const ConformalMetric& g, int k,
                                 double degeneracy_floor = -1,
                                 std::uint64_t seed = 5);

// epsilons in [eps_lo, eps_hi] at which the constant candidate v / vol_b(M)
// is degenerate on a flat torus: eps^2 = -mu_l / alpha_j
std::vector<double> degeneracy_scan(const Potential& P, const Vec& v,
                                    const ConformalMetric& g, double eps_lo,
                                    double eps_hi, int modes);

// L2(b) distance, minimized over cyclic grid shifts when the metric is flat
double aligned_distance(const Field& A, const Field& B, const ConformalMetric& g);

struct HuntOptions {
    FlowOptions flow;
    double dedup_tol = -1;  // default 1e-3 * sqrt(vol_b)
};

struct HuntReport {
    std::vector<CriticalPoint> points;  // distinct, sorted by energy
    int eta = 0;
    int dropped = 0;  // seeds that failed to converge
};

HuntReport hunt(const Potential& P, const ConformalMetric& g, double eps,
                const Vec& v, const std::vector<Field>& seeds,
                const HuntOptions& opts = {});

}  // namespace ach
