#include "fpplocal/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace fpplocal {

namespace {

std::vector<double> build_cdf(const std::vector<double>& pmf) {
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        acc += pmf[k];
        cdf[k] = acc;
    }
    if (!cdf.empty()) cdf.back() = 1.0;
    return cdf;
}

std::uint32_t sample_from_cdf(const std::vector<double>& cdf, RngStream& rng) {
    double u = rng.next_double();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return std::uint32_t(it - cdf.begin());
}

void check_normalized(const std::vector<double>& pmf) {
    double s = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("pmf does not sum to 1 within 1e-12");
    for (double p : pmf)
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("pmf value outside [0,1]");
}

// E[s^X] with early exit once the remaining tail cannot contribute.
double pgf_eval(const std::vector<double>& pmf, double s) {
    double acc = 0.0;
    double spow = 1.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        acc += pmf[k] * spow;
        spow *= s;
        if (spow < 1e-18 && s >= 0.0) break;
    }
    return acc;
}

} // namespace

DegreeModel::DegreeModel(Kind kind, std::vector<double> pmf, std::string desc)
    : kind_(kind), pmf_(std::move(pmf)), desc_(std::move(desc)) {
    check_normalized(pmf_);
    if (!pmf_.empty() && pmf_[0] >= 1.0 - 1e-15)
        throw std::invalid_argument("degenerate degree law: P(D=0) = 1");
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
        mean_ += double(k) * pmf_[k];
        falling_second_ += double(k) * double(k - 1) * pmf_[k];
    }
    cdf_ = build_cdf(pmf_);
}

DegreeModel DegreeModel::deterministic(std::uint32_t k) {
    std::vector<double> pmf(k + 1, 0.0);
    pmf[k] = 1.0;
    std::ostringstream os;
    os << "deterministic(" << k << ")";
    return DegreeModel(Kind::Deterministic, std::move(pmf), os.str());
}

DegreeModel DegreeModel::from_pmf(const std::map<std::uint32_t, double>& atoms) {
    if (atoms.empty()) throw std::invalid_argument("empty pmf");
    std::uint32_t kmax = atoms.rbegin()->first;
    std::vector<double> pmf(kmax + 1, 0.0);
    for (auto [k, p] : atoms) pmf[k] = p;
    return DegreeModel(Kind::Pmf, std::move(pmf), "pmf");
}

DegreeModel DegreeModel::power_law(double exponent, std::uint32_t k_max) {
    if (k_max < 1) throw std::invalid_argument("power law needs k_max >= 1");
    if (exponent <= 0.0) throw std::invalid_argument("power law exponent must be positive");
    std::vector<double> pmf(std::size_t(k_max) + 1, 0.0);
    double z = 0.0;
    for (std::uint32_t k = 1; k <= k_max; ++k) z += std::pow(double(k), -exponent);
    for (std::uint32_t k = 1; k <= k_max; ++k) pmf[k] = std::pow(double(k), -exponent) / z;
    // renormalize exactly against accumulated rounding
    double s = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    for (double& p : pmf) p /= s;
    std::ostringstream os;
    os << "power_law(alpha=" << exponent << ", k_max=" << k_max << ")";
    return DegreeModel(Kind::PowerLaw, std::move(pmf), os.str());
}

double DegreeModel::second_moment_log() const {
    double acc = 0.0;
    for (std::size_t k = 2; k < pmf_.size(); ++k)
        acc += double(k) * double(k) * std::log(double(k)) * pmf_[k];
    return acc;
}

double DegreeModel::pgf(double s) const { return pgf_eval(pmf_, s); }

std::uint32_t DegreeModel::sample(RngStream& rng) const { return sample_from_cdf(cdf_, rng); }

std::string DegreeModel::describe() const { return desc_; }

OffspringModel::OffspringModel(std::vector<double> pmf, bool infinite_mean)
    : pmf_(std::move(pmf)), infinite_mean_(infinite_mean) {
    check_normalized(pmf_);
    for (std::size_t k = 0; k < pmf_.size(); ++k) mean_ += double(k) * pmf_[k];
    cdf_ = build_cdf(pmf_);
}

double OffspringModel::mean() const {
    if (infinite_mean_) return std::numeric_limits<double>::infinity();
    return mean_;
}

double OffspringModel::pgf(double s) const { return pgf_eval(pmf_, s); }

std::uint32_t OffspringModel::sample(RngStream& rng) const { return sample_from_cdf(cdf_, rng); }

WeightModel WeightModel::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
    return WeightModel(Kind::Exponential, rate, 0.0);
}

WeightModel WeightModel::uniform(double a, double b) {
    if (!(0.0 <= a && a < b)) throw std::invalid_argument("uniform needs 0 <= a < b");
    return WeightModel(Kind::Uniform, a, b);
}

WeightModel WeightModel::weibull(double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw std::invalid_argument("weibull needs positive shape and scale");
    return WeightModel(Kind::Weibull, shape, scale);
}

double WeightModel::sample(RngStream& rng) const {
    double x = 0.0;
    do {
        switch (kind_) {
            case Kind::Exponential: x = rng.exponential(a_); break;
            case Kind::Uniform: x = rng.uniform(a_, b_); break;
            case Kind::Weibull: x = rng.weibull(a_, b_); break;
        }
    } while (x <= 0.0);
    return x;
}

double WeightModel::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::Exponential: return -std::expm1(-a_ * x);
        case Kind::Uniform:
            if (x <= a_) return 0.0;
            if (x >= b_) return 1.0;
            return (x - a_) / (b_ - a_);
        case Kind::Weibull: return -std::expm1(-std::pow(x / b_, a_));
    }
    return 0.0;
}

double WeightModel::laplace(double lambda) const {
    if (lambda < 0.0) throw std::invalid_argument("laplace transform needs lambda >= 0");
    if (lambda == 0.0) return 1.0;
    switch (kind_) {
        case Kind::Exponential:
            return a_ / (a_ + lambda);
        case Kind::Uniform:
            return (std::exp(-lambda * a_) - std::exp(-lambda * b_)) / (lambda * (b_ - a_));
        case Kind::Weibull: {
            double shape = a_, scale = b_;
            if (shape == 1.0) return 1.0 / (1.0 + lambda * scale);
            // substitute u = (x/scale)^shape, then t = exp(-u):
            // L(lambda) = int_0^1 exp(-lambda * scale * (-log t)^{1/shape}) dt
            boost::math::quadrature::tanh_sinh<double> integrator;
            auto f = [&](double t) {
                if (t <= 0.0) return 0.0;
                if (t >= 1.0) return 1.0;
                return std::exp(-lambda * scale * std::pow(-std::log(t), 1.0 / shape));
            };
            return integrator.integrate(f, 0.0, 1.0, 1e-13);
        }
    }
    return 0.0;
}

std::string WeightModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Exponential: os << "exponential(rate=" << a_ << ")"; break;
        case Kind::Uniform: os << "uniform(" << a_ << ", " << b_ << ")"; break;
        case Kind::Weibull: os << "weibull(shape=" << a_ << ", scale=" << b_ << ")"; break;
    }
    return os.str();
}

OffspringModel size_biased(const DegreeModel& d) {
    if (d.mean() <= 0.0) throw std::invalid_argument("zero-mean degree law");
    const auto& pmf = d.pmf_table();
    // P(D*-1 = k) = (k+1) P(D = k+1) / E[D]
    std::vector<double> off(pmf.size() > 1 ? pmf.size() - 1 : 1, 0.0);
    for (std::size_t k = 1; k < pmf.size(); ++k)
        off[k - 1] = double(k) * pmf[k] / d.mean();
    double s = std::accumulate(off.begin(), off.end(), 0.0);
    for (double& p : off) p /= s;
    return OffspringModel(std::move(off));
}

double offspring_mean(const DegreeModel& d) {
    if (d.mean() <= 0.0) throw std::invalid_argument("zero-mean degree law");
    return d.falling_second_moment() / d.mean();
}

SurvivalProbs survival_probs(const OffspringModel& off, const DegreeModel& d, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    // smallest fixed point of f*(s) = E[s^{D*-1}]; monotone iteration from 0
    const std::size_t cap = 1'000'000;
    double q = 0.0;
    double next = off.pgf(q);
    std::size_t it = 0;
    while (next - q > tol) {
        q = next;
        next = off.pgf(q);
        if (++it >= cap) {
            std::ostringstream os;
            os << "survival fixed point did not converge; residual " << (next - q);
            throw std::runtime_error(os.str());
        }
    }
    double q_star = std::min(next, 1.0);
    return SurvivalProbs{1.0 - q_star, 1.0 - d.pgf(q_star), q_star};
}

double laplace_transform(const WeightModel& w, double lambda) { return w.laplace(lambda); }

double malthusian_lambda(const OffspringModel& off, const WeightModel& w, double tol) {
    if (off.infinite_mean())
        throw std::invalid_argument("infinite-mean offspring: Malthusian regime inapplicable");
    double m = off.mean();
    if (m <= 1.0)
        throw std::invalid_argument("no Malthusian parameter (not supercritical or explosive regime)");
    double hi = 1.0;
    while (m * w.laplace(hi) >= 1.0) {
        hi *= 2.0;
        if (hi > 1e18) throw std::runtime_error("Malthusian bracket search failed");
    }
    double lo = 0.0;
    for (int i = 0; i < 400; ++i) {
        double mid = 0.5 * (lo + hi);
        double g = m * w.laplace(mid) - 1.0;
        if (std::abs(g) < tol) return mid;
        (g > 0.0 ? lo : hi) = mid;
    }
    double mid = 0.5 * (lo + hi);
    if (std::abs(m * w.laplace(mid) - 1.0) < 1e-9) return mid;
    throw std::runtime_error("Malthusian bisection did not reach tolerance");
}

} // namespace fpplocal
