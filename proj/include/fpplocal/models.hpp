#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fpplocal/rng.hpp"

namespace fpplocal {

// Finite-support law of the vertex degree D. Power-law degrees are
// truncated at a configurable cutoff so that generating-function
// arithmetic stays exact; the truncation is part of the model's
// description and surfaces in describe().
class DegreeModel {
public:
    enum class Kind { Deterministic, Pmf, PowerLaw };

    static DegreeModel deterministic(std::uint32_t k);
    static DegreeModel from_pmf(const std::map<std::uint32_t, double>& atoms);
    // pmf(k) proportional to k^-exponent on {1, ..., k_max}.
    static DegreeModel power_law(double exponent, std::uint32_t k_max = 1'000'000);

    Kind kind() const { return kind_; }
    double pmf(std::uint32_t k) const { return k < pmf_.size() ? pmf_[k] : 0.0; }
    std::uint32_t max_support() const { return std::uint32_t(pmf_.size()) - 1; }
    const std::vector<double>& pmf_table() const { return pmf_; }

    double mean() const { return mean_; }
    // E[D (D-1)]
    double falling_second_moment() const { return falling_second_; }
    // E[D^2 log_+ D]; finite for every truncated model.
    double second_moment_log() const;
    // Regularity in the E[D^2 log D] sense; always true for finite support.
    bool regular() const { return true; }

    // Probability generating function E[s^D], exact over the support.
    double pgf(double s) const;

    std::uint32_t sample(RngStream& rng) const;

    std::string describe() const;

private:
    DegreeModel(Kind kind, std::vector<double> pmf, std::string desc);

    Kind kind_;
    std::vector<double> pmf_;   // index k -> P(D = k)
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double falling_second_ = 0.0;
    std::string desc_;
};

// Offspring law of D* - 1 where D* is the size-biased degree.
class OffspringModel {
public:
    OffspringModel(std::vector<double> pmf, bool infinite_mean = false);

    double pmf(std::uint32_t k) const { return k < pmf_.size() ? pmf_[k] : 0.0; }
    std::uint32_t max_support() const { return std::uint32_t(pmf_.size()) - 1; }
    double mean() const;
    bool infinite_mean() const { return infinite_mean_; }

    // E[s^{D*-1}]
    double pgf(double s) const;

    std::uint32_t sample(RngStream& rng) const;

private:
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    bool infinite_mean_ = false;
};

// Atomless edge-weight law with all mass on (0, infinity).
class WeightModel {
public:
    enum class Kind { Exponential, Uniform, Weibull };

    static WeightModel exponential(double rate);
    static WeightModel uniform(double a, double b);
    static WeightModel weibull(double shape, double scale);

    Kind kind() const { return kind_; }
    double sample(RngStream& rng) const;
    double cdf(double x) const;
    // Laplace transform E[exp(-lambda X)] to absolute accuracy 1e-12.
    double laplace(double lambda) const;

    std::string describe() const;

    double param_a() const { return a_; }
    double param_b() const { return b_; }

private:
    WeightModel(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_;
    double a_;  // rate / lower bound / shape
    double b_;  // unused / upper bound / scale
};

struct SurvivalProbs {
    double zeta_star;  // survival prob. of the pure D*-1 branching process
    double zeta;       // survival prob. of the limit tree (root offspring D)
    double q_star;     // extinction prob. of the D*-1 process (smallest fixed point)
};

OffspringModel size_biased(const DegreeModel& d);

// nu = E[D(D-1)] / E[D]; equals the mean of size_biased(d).
double offspring_mean(const DegreeModel& d);

SurvivalProbs survival_probs(const OffspringModel& off, const DegreeModel& d, double tol = 1e-12);

double laplace_transform(const WeightModel& w, double lambda);

// Unique lambda > 0 with mean(off) * laplace(w, lambda) = 1.
double malthusian_lambda(const OffspringModel& off, const WeightModel& w, double tol = 1e-12);

} // namespace fpplocal
