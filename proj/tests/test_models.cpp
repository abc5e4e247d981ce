#include "doctest.h"

#include "fpplocal/models.hpp"
#include "fpplocal/rng.hpp"
#include "fpplocal/stats.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace fpplocal;

namespace {

DegreeModel uniform_13() {
    return DegreeModel::from_pmf({{1, 0.5}, {3, 0.5}});
}

} // namespace

TEST_CASE("size-biasing a point mass is the identity") {
    auto off = size_biased(DegreeModel::deterministic(3));
    CHECK(off.pmf(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(off.mean() == doctest::Approx(2.0).epsilon(1e-12));

    auto off1 = size_biased(DegreeModel::deterministic(1));
    CHECK(off1.pmf(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("size-biased law for D uniform on {1,3}") {
    auto off = size_biased(uniform_13());
    // kP(D=k)/E[D] with E[D]=2: P(D*=1)=1/4, P(D*=3)=3/4
    CHECK(off.pmf(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(off.pmf(2) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(off.pmf(1) == doctest::Approx(0.0));
}

TEST_CASE("offspring mean nu = E[D(D-1)]/E[D]") {
    CHECK(offspring_mean(DegreeModel::deterministic(3)) == doctest::Approx(2.0).epsilon(1e-12));
    auto u123 = DegreeModel::from_pmf({{1, 1.0 / 3}, {2, 1.0 / 3}, {3, 1.0 / 3}});
    CHECK(offspring_mean(u123) == doctest::Approx(4.0 / 3).epsilon(1e-12));
    CHECK(offspring_mean(DegreeModel::deterministic(1)) == doctest::Approx(0.0));
}

TEST_CASE("mean of the size-biased law agrees with nu") {
    std::vector<DegreeModel> models;
    models.push_back(DegreeModel::deterministic(3));
    models.push_back(uniform_13());
    models.push_back(DegreeModel::from_pmf({{0, 0.2}, {1, 0.3}, {4, 0.5}}));
    models.push_back(DegreeModel::power_law(2.5, 2000));
    for (const auto& d : models)
        CHECK(size_biased(d).mean() == doctest::Approx(offspring_mean(d)).epsilon(1e-12));
}

TEST_CASE("survival probabilities") {
    SUBCASE("deterministic supercritical tree survives surely") {
        auto d = DegreeModel::deterministic(3);
        auto sp = survival_probs(size_biased(d), d);
        CHECK(sp.zeta_star == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(sp.zeta == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("D uniform on {1,3}: roots of 3q^2-4q+1") {
        auto d = uniform_13();
        auto sp = survival_probs(size_biased(d), d);
        CHECK(sp.q_star == doctest::Approx(1.0 / 3).epsilon(1e-9));
        CHECK(sp.zeta_star == doctest::Approx(2.0 / 3).epsilon(1e-9));
        CHECK(sp.zeta == doctest::Approx(22.0 / 27).epsilon(1e-9));
    }
    SUBCASE("subcritical line graph dies out") {
        auto d = DegreeModel::deterministic(1);
        auto sp = survival_probs(size_biased(d), d);
        CHECK(sp.zeta_star == doctest::Approx(0.0));
        CHECK(sp.zeta == doctest::Approx(0.0));
    }
}

TEST_CASE("q* is a fixed point and the smallest one") {
    auto d = uniform_13();
    auto off = size_biased(d);
    auto sp = survival_probs(off, d, 1e-13);
    CHECK(std::abs(off.pgf(sp.q_star) - sp.q_star) < 1e-10);
    for (double s = 0.0; s < sp.q_star - 1e-6; s += sp.q_star / 64)
        CHECK(off.pgf(s) > s);
}

TEST_CASE("Laplace transforms against closed forms") {
    CHECK(laplace_transform(WeightModel::exponential(1.0), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    double expect = (1.0 - std::exp(-2.0)) / 2.0;
    CHECK(laplace_transform(WeightModel::uniform(0.0, 1.0), 2.0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(laplace_transform(WeightModel::exponential(3.0), 0.0) == doctest::Approx(1.0));
    CHECK(laplace_transform(WeightModel::weibull(2.0, 1.0), 0.0) == doctest::Approx(1.0));
    // shape 1 Weibull is Exponential(1/scale)
    CHECK(laplace_transform(WeightModel::weibull(1.0, 0.5), 2.0) ==
          doctest::Approx(laplace_transform(WeightModel::exponential(2.0), 2.0)).epsilon(1e-12));
}

TEST_CASE("Weibull Laplace transform agrees with a Monte Carlo route") {
    auto w = WeightModel::weibull(2.0, 1.5);
    double lambda = 0.8;
    RngStream rng(2024);
    const int n = 2000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = std::exp(-lambda * w.sample(rng));
        sum += v;
        sumsq += v * v;
    }
    double mc = sum / n;
    double se = std::sqrt((sumsq / n - mc * mc) / n);
    CHECK(std::abs(w.laplace(lambda) - mc) < 4 * se + 1e-9);
}

TEST_CASE("Laplace transform decreases strictly in lambda") {
    for (auto w : {WeightModel::exponential(1.3), WeightModel::uniform(0.2, 2.0),
                   WeightModel::weibull(0.7, 1.0)}) {
        double prev = w.laplace(0.0);
        CHECK(prev == doctest::Approx(1.0));
        for (double lam : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            double cur = w.laplace(lam);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("Malthusian parameter") {
    SUBCASE("m=2 with Exponential(1): closed form lambda=1") {
        auto d = DegreeModel::deterministic(3); // offspring = 2 surely
        double lam = malthusian_lambda(size_biased(d), WeightModel::exponential(1.0));
        CHECK(lam == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("D uniform {1,3} with Exponential(1): 1.5/(1+lambda)=1") {
        auto d = uniform_13();
        double lam = malthusian_lambda(size_biased(d), WeightModel::exponential(1.0));
        CHECK(lam == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("m=2 with Uniform(0,1): bisection oracle") {
        // independent oracle for 2(1-e^-x)=x frozen from a hand bisection
        auto d = DegreeModel::deterministic(3);
        double lam = malthusian_lambda(size_biased(d), WeightModel::uniform(0.0, 1.0));
        CHECK(lam == doctest::Approx(1.59362).epsilon(1e-5));
        CHECK(std::abs(2.0 * WeightModel::uniform(0.0, 1.0).laplace(lam) - 1.0) < 1e-10);
    }
    SUBCASE("defining equation holds for a quadrature-backed weight law") {
        auto d = uniform_13();
        auto w = WeightModel::weibull(2.0, 1.0);
        double lam = malthusian_lambda(size_biased(d), w);
        CHECK(std::abs(1.5 * w.laplace(lam) - 1.0) < 1e-10);
    }
    SUBCASE("critical and subcritical offspring are rejected") {
        auto line = size_biased(DegreeModel::deterministic(2)); // offspring = 1 surely
        CHECK_THROWS_WITH_AS(malthusian_lambda(line, WeightModel::exponential(1.0)),
                             "no Malthusian parameter (not supercritical or explosive regime)",
                             std::invalid_argument);
    }
    SUBCASE("infinite-mean offspring is rejected") {
        OffspringModel heavy({0.5, 0.5}, true);
        CHECK_THROWS_WITH_AS(malthusian_lambda(heavy, WeightModel::exponential(1.0)),
                             "infinite-mean offspring: Malthusian regime inapplicable",
                             std::invalid_argument);
    }
}

TEST_CASE("model validation errors") {
    CHECK_THROWS_AS(DegreeModel::from_pmf({{1, 0.5}, {3, 0.6}}), std::invalid_argument);
    CHECK_THROWS_AS(DegreeModel::from_pmf({{0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(WeightModel::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightModel::uniform(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightModel::uniform(-0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightModel::weibull(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("power-law degree model is a normalized truncated zeta law") {
    auto d = DegreeModel::power_law(2.5, 1000);
    double sum = 0.0;
    for (std::uint32_t k = 0; k <= d.max_support(); ++k) sum += d.pmf(k);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.pmf(0) == 0.0);
    // ratio check: pmf(2)/pmf(1) = 2^-2.5
    CHECK(d.pmf(2) / d.pmf(1) == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-12));
    CHECK(d.regular());
    CHECK(std::isfinite(d.second_moment_log()));
}

TEST_CASE("1e6 degree samples match the pmf within 4 standard errors per atom") {
    auto check_model = [](const DegreeModel& d, std::uint64_t seed) {
        const int n = 1000000;
        std::map<std::uint32_t, int> counts;
        RngStream rng(seed);
        for (int i = 0; i < n; ++i) ++counts[d.sample(rng)];
        for (std::uint32_t k = 0; k <= d.max_support(); ++k) {
            double p = d.pmf(k);
            if (p < 1e-5) continue; // atoms too thin to resolve at this sample size
            double se = std::sqrt(p * (1 - p) / n);
            CHECK(std::abs(counts[k] / double(n) - p) < 4 * se + 1e-12);
        }
    };
    check_model(uniform_13(), 11);
    check_model(DegreeModel::from_pmf({{0, 0.1}, {2, 0.5}, {5, 0.4}}), 12);
    check_model(DegreeModel::power_law(3.0, 50), 13);
}

TEST_CASE("weight samples land in (0,inf) and match the cdf") {
    RngStream rng(77);
    for (auto w : {WeightModel::exponential(0.7), WeightModel::uniform(0.0, 3.0),
                   WeightModel::weibull(1.7, 2.0)}) {
        const int n = 100000;
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = w.sample(rng);
            REQUIRE(xs[i] > 0.0);
        }
        double d = fpplocal::stats::ks_statistic(xs, [&](double x) { return w.cdf(x); });
        CHECK(fpplocal::stats::ks_one_sample_pvalue(d, n) > 1e-4);
    }
}
