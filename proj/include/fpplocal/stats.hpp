#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fpplocal::stats {

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

inline double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("sd needs at least two values");
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(xs.size() - 1));
}

// p in [0,1]; linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    if (p <= 0.0) return xs.front();
    if (p >= 1.0) return xs.back();
    double pos = p * double(xs.size() - 1);
    std::size_t lo = std::size_t(pos);
    double frac = pos - double(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks on empty sample");
    std::sort(xs.begin(), xs.end());
    double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - double(i) / n));
        d = std::max(d, std::abs(double(i + 1) / n - f));
    }
    return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks on empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
    }
    return d;
}

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
        s += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

inline double ks_one_sample_pvalue(double d, std::size_t n) {
    double sn = std::sqrt(double(n));
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

inline double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
    double ne = double(n) * double(m) / double(n + m);
    double sn = std::sqrt(ne);
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

// Pearson chi-square statistic for observed counts vs expected probabilities.
// Cells with p == 0 must have zero observations (throws otherwise).
inline double chi_square_statistic(const std::vector<std::uint64_t>& observed,
                                   const std::vector<double>& probs) {
    if (observed.size() != probs.size()) throw std::invalid_argument("chi-square size mismatch");
    std::uint64_t total = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = probs[i] * double(total);
        if (e == 0.0) {
            if (observed[i] != 0) throw std::invalid_argument("observation in zero-probability cell");
            continue;
        }
        double diff = double(observed[i]) - e;
        stat += diff * diff / e;
    }
    return stat;
}

double chi_square_quantile(double p, double dof);

// Ordinary least squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols needs paired data");
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate regressor");
    return sxy / sxx;
}

} // namespace fpplocal::stats
