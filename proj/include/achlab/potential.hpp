#pragma once

#include <optional>
#include <string>
#include <vector>

#include "achlab/errors.hpp"
#include "achlab/linalg.hpp"

namespace ach {

enum class PotentialForm { ScalarDoubleWell, ProductTripleWell, Spliced };

std::string form_name(PotentialForm f);
PotentialForm form_from_name(const std::string& s);

// exponents and constants of the sampled growth bounds k3|z|^p1 < W < k4|z|^p2
struct GrowthRecord {
    double p1 = 0, p2 = 0, k3 = 0, k4 = 0, R = 0;
};

// |z|^{2+tau} tail blended in over the shell [radius, 2*radius]
struct SpliceRecord {
    double radius = 0;
    double tau = 0;
};

struct EvalResult {
    double value = 0;
    Vec grad;   // m
    Mat hess;   // m x m row-major
};

class Potential {
public:
    Potential(PotentialForm form, int m, int N, std::vector<Vec> minima,
              GrowthRecord growth, std::optional<SpliceRecord> splice = {});

    int m() const { return m_; }
    int N() const { return N_; }
    PotentialForm form() const { return form_; }
    const std::vector<Vec>& minima() const { return minima_; }
    const Vec& minimum(int i) const { return minima_[i]; }
    const GrowthRecord& growth() const { return growth_; }
    const std::optional<SpliceRecord>& splice() const { return splice_; }

    EvalResult evaluate(const Vec& z) const;
    double value(const Vec& z) const;
    void gradient(const Vec& z, Vec& out) const;

private:
    EvalResult eval_core(const Vec& z) const;  // polynomial part

    PotentialForm form_;
    int m_, N_;
    std::vector<Vec> minima_;
    GrowthRecord growth_;
    std::optional<SpliceRecord> splice_;
};

Potential build_double_well();
Potential build_product_triple_well(const Vec& p1, const Vec& p2,
                                    std::optional<SpliceRecord> splice = {});

struct ConditionReport {
    bool minima_vanish = false;
    bool hessians_pd = false;
    bool positive_away = false;
    bool w1_ok = false;
    bool w2_ok = false;
    bool w3_ok = false;
    std::string w0 = "pending";  // delegated to the tension module
    double p1_fit = 0, p2_fit = 0;
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0;
    bool subcritical = false;  // p1 < 2# = (2n-1)/(n-1) for the given dim
    std::vector<std::string> notes;
    bool all_pass() const {
        return minima_vanish && hessians_pd && positive_away && w1_ok && w2_ok && w3_ok;
    }
};

// dim <= 0 selects the desk-scale default: 1 for scalar potentials, 2 otherwise
ConditionReport verify_class(const Potential& P, int sample_count, double radius,
                             int dim = 0, std::uint64_t seed = 7);

std::string potential_to_text(const Potential& P);
Potential potential_from_text(const std::string& text);
void save_potential(const Potential& P, const std::string& path);
Potential load_potential(const std::string& path);

}  // namespace ach
