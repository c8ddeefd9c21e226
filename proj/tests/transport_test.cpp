#include "wfisher/transport.hpp"

#include "oracle_helpers.hpp"
#include "wfisher/adjust.hpp"

#include <doctest.h>

#include <cmath>

using namespace wfisher;

namespace {

// Corollary-1 route: Var(X) + Var(Y) + (EX - EY)^2 - 2 Cov_pi.
double w2sq_by_moments(const DiscreteDist& d, const ContinuousTarget& y) {
    const double de = d.mean() - y.mean();
    return d.variance() + y.variance() + de * de - 2.0 * coupling_covariance(d, y);
}

}  // namespace

TEST_CASE("wasserstein of a single atom against the uniform") {
    const DiscreteDist atom({0.5}, {1.0});
    const double w2sq = wasserstein_p_pow(atom, ContinuousTarget::uniform01(), 2.0);
    CHECK(w2sq == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
    CHECK(wasserstein_p(atom, ContinuousTarget::uniform01(), 2.0) ==
          doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-9));
    CHECK_THROWS_AS(wasserstein_p(atom, ContinuousTarget::uniform01(), 1.0), std::domain_error);
}

TEST_CASE("wasserstein on the step grid reproduces the published distance") {
    const AdjustmentSet set(oracle::step_grid_dist());
    const double w2sq =
        wasserstein_p_pow(set.mean_chi2_table().as_dist(), ContinuousTarget::chisq2(), 2.0);
    CHECK(std::fabs(w2sq - 1.2479) <= 1e-3);
}

TEST_CASE("quadrature agrees with the covariance identity") {
    CounterRng rng(31337, 0);
    const ContinuousTarget y = ContinuousTarget::gamma(2.3, 1.7);
    for (int rep = 0; rep < 5; ++rep) {
        const DiscreteDist d = oracle::random_dist(rng, 8.0);
        CHECK(std::fabs(wasserstein_p_pow(d, y, 2.0) - w2sq_by_moments(d, y)) <= 1e-7);
    }
}

TEST_CASE("coupling covariance") {
    SUBCASE("constant X") {
        const DiscreteDist atom({2.0}, {1.0});
        CHECK(std::fabs(coupling_covariance(atom, ContinuousTarget::chisq2())) <= 1e-12);
    }
    SUBCASE("identity against quadrature for the p-value grid") {
        const DiscreteDist p = left_pvalue_dist(make_binomial(5, 0.5));
        const ContinuousTarget u = ContinuousTarget::uniform01();
        CHECK(std::fabs(wasserstein_p_pow(p, u, 2.0) - w2sq_by_moments(p, u)) <= 1e-7);
    }
    SUBCASE("optimal table has Cov equal to its variance") {
        const AdjustmentSet set(make_binomial(6, 0.35));
        const DiscreteDist z = set.midp_table().as_dist();
        CHECK(std::fabs(coupling_covariance(z, ContinuousTarget::uniform01()) - z.variance()) <=
              1e-9);
    }
}

TEST_CASE("optimal adjustment closed forms") {
    SUBCASE("uniform target gives the mid-p") {
        const DiscreteDist p = left_pvalue_dist(make_binomial(5, 0.3));
        const AdjustedTable t = optimal_adjust(p, ContinuousTarget::uniform01(), 2.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(t.values[i] ==
                  doctest::Approx(0.5 * (p.cdf_before(i) + p.cdf_at(i))).epsilon(1e-12));
        }
    }
    SUBCASE("single cell, cubic order") {
        const DiscreteDist atom({0.4}, {1.0});
        const AdjustedTable t = optimal_adjust(atom, ContinuousTarget::uniform01(), 3.0);
        CHECK(t.values[0] == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-10));
    }
    SUBCASE("order restriction") {
        const DiscreteDist atom({0.4}, {1.0});
        CHECK_THROWS_AS(optimal_adjust(atom, ContinuousTarget::uniform01(), 1.0),
                        std::domain_error);
        CHECK_THROWS_AS(optimal_adjust(atom, ContinuousTarget::uniform01(), 9.0),
                        std::domain_error);
    }
}

TEST_CASE("cell membership and unbiasedness") {
    CounterRng rng(777, 0);
    for (int rep = 0; rep < 15; ++rep) {
        const DiscreteDist d = oracle::random_dist(rng);
        const ContinuousTarget y = oracle::random_target(rng);
        const AdjustedTable t = optimal_adjust(d, y, 2.0);
        const Partition part = make_partition(d, y);
        double mean = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(t.values[i] >= part.cells[i].first);
            CHECK(t.values[i] <= part.cells[i].second);
            if (i > 0) CHECK(t.values[i] > t.values[i - 1]);
            mean += t.values[i] * d.mass_at(i);
        }
        CHECK(std::fabs(mean - y.mean()) <= 1e-9);
    }
}

TEST_CASE("partition carries the discrete masses") {
    const DiscreteDist d = make_binomial(7, 0.25);
    for (const ContinuousTarget& y : {ContinuousTarget::uniform01(), ContinuousTarget::chisq2(),
                                      ContinuousTarget::gamma(1.8, 0.9)}) {
        const Partition part = make_partition(d, y);
        REQUIRE(part.cells.size() == d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto [a, b] = part.cells[i];
            if (i > 0) CHECK(a == doctest::Approx(part.cells[i - 1].second));
            CHECK(std::fabs((y.cdf(b) - y.cdf(a)) - d.mass_at(i)) <= 1e-9);
        }
    }
}

TEST_CASE("bias directions away from order two") {
    CounterRng rng(2024, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const DiscreteDist d = oracle::random_dist(rng);
        const ContinuousTarget y = oracle::random_target(rng);
        if (d.size() < 2) continue;
        const AdjustedTable low = optimal_adjust(d, y, 1.5);
        const AdjustedTable high = optimal_adjust(d, y, 3.0);
        CHECK(low.mean() < y.mean());
        CHECK(high.mean() > y.mean());
    }
}

TEST_CASE("variance contraction of the adjusted power") {
    CounterRng rng(555, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const DiscreteDist d = oracle::random_dist(rng);
        const ContinuousTarget y = oracle::random_target(rng);
        if (d.size() < 2) continue;
        for (double p : {1.5, 2.0, 3.0}) {
            const AdjustedTable t = optimal_adjust(d, y, p);
            // Var(Z^{p-1}) against Var(Y^{p-1}); the latter via partial
            // moments of order p-1 and 2(p-1).
            double mz = 0.0, m2z = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const double zp = std::pow(t.values[i], p - 1.0);
                mz += zp * d.mass_at(i);
                m2z += zp * zp * d.mass_at(i);
            }
            const double my = y.partial_moment(p - 1.0, 0.0, y.support_hi());
            const double m2y = y.partial_moment(2.0 * (p - 1.0), 0.0, y.support_hi());
            CHECK(m2z - mz * mz < m2y - my * my);
        }
    }
}

TEST_CASE("optimum beats jittered candidates") {
    CounterRng rng(4242, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const DiscreteDist d = oracle::random_dist(rng);
        const ContinuousTarget y = oracle::random_target(rng);
        const AdjustedTable t = optimal_adjust(d, y, 2.0);
        const Partition part = make_partition(d, y);
        auto w2sq_of_values = [&](const std::vector<double>& values) {
            double total = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const auto [a, b] = part.cells[i];
                total += values[i] * values[i] * d.mass_at(i) -
                         2.0 * values[i] * y.partial_moment1(a, b) + y.partial_moment2(a, b);
            }
            return total;
        };
        const double best = w2sq_of_values(t.values);
        for (int jitter = 0; jitter < 20; ++jitter) {
            std::vector<double> v = t.values;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto [a, b] = part.cells[i];
                const double hi = std::isfinite(b) ? b : t.values[i] + 5.0;
                v[i] = a + (hi - a) * rng.next_unit();
            }
            CHECK(w2sq_of_values(v) >= best - 1e-12);
        }
    }
}

TEST_CASE("w2 gap") {
    SUBCASE("mean-value table against chisq2") {
        const AdjustmentSet set(make_binomial(5, 0.1));
        CHECK(std::fabs(w2_gap(set.mean_chi2_table(), ContinuousTarget::chisq2()) - 2.39) <=
              0.01);
    }
    SUBCASE("mid-p variance display") {
        const DiscreteDist d = make_binomial(6, 0.3);
        const AdjustmentSet set(d);
        double series = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            series += d.cdf_at(i) * d.cdf_before(i) * d.mass_at(i) / 4.0;
        }
        CHECK(std::fabs(w2_gap(set.midp_table(), ContinuousTarget::uniform01()) -
                        (1.0 / 12.0 - series)) <= 1e-12);
    }
    SUBCASE("gap shrinks on finer grids") {
        double prev = 1.0;
        for (int K : {10, 100, 1000}) {
            std::vector<double> support, masses;
            for (int i = 1; i <= K; ++i) {
                support.push_back(i);
                masses.push_back(1.0 / K);
            }
            const DiscreteDist p = left_pvalue_dist(DiscreteDist(support, masses));
            const AdjustedTable t = optimal_adjust(p, ContinuousTarget::uniform01(), 2.0);
            const double gap = w2_gap(t, ContinuousTarget::uniform01());
            CHECK(gap >= 0.0);
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev < 1e-5);
    }
    SUBCASE("mismatched target is a contract error") {
        const AdjustmentSet set(make_binomial(5, 0.1));
        CHECK_THROWS_AS(w2_gap(set.mean_chi2_table(), ContinuousTarget::uniform01()),
                        std::invalid_argument);
    }
}

TEST_CASE("distance identity for optimal tables") {
    CounterRng rng(31415, 0);
    for (int rep = 0; rep < 8; ++rep) {
        const DiscreteDist d = oracle::random_dist(rng);
        const ContinuousTarget y = oracle::random_target(rng);
        const AdjustedTable t = optimal_adjust(d, y, 2.0);
        const DiscreteDist z = t.as_dist();
        const double quad = wasserstein_p_pow(z, y, 2.0);
        CHECK(std::fabs(quad - w2_gap(t, y)) <= 1e-7);
        CHECK(std::fabs(quad - w2sq_by_moments(z, y)) <= 1e-7);
    }
}

TEST_CASE("general lower bound") {
    SUBCASE("published step-grid value") {
        const AdjustmentSet set(oracle::step_grid_dist());
        const double bound =
            lower_bound_general(set.mean_chi2_table().as_dist(), ContinuousTarget::chisq2());
        CHECK(std::fabs(bound - 1.2436) <= 1e-3);
    }
    SUBCASE("single atom at the target mean") {
        for (const ContinuousTarget& y :
             {ContinuousTarget::chisq2(), ContinuousTarget::gamma(3.0, 0.5)}) {
            const DiscreteDist atom({y.mean()}, {1.0});
            CHECK(lower_bound_general(atom, y) == doctest::Approx(y.variance()).epsilon(1e-10));
        }
    }
    SUBCASE("dominated by the squared distance") {
        CounterRng rng(161803, 0);
        for (int rep = 0; rep < 20; ++rep) {
            const DiscreteDist d = oracle::random_dist(rng);
            const ContinuousTarget y = oracle::random_target(rng);
            CHECK(lower_bound_general(d, y) <= wasserstein_p_pow(d, y, 2.0) + 1e-9);
        }
    }
}

TEST_CASE("mean-value lower bound") {
    SUBCASE("published value") {
        const DiscreteDist pvals = left_pvalue_dist(oracle::step_grid_dist());
        CHECK(std::fabs(lower_bound_meanchi(pvals) - 1.2436) <= 1e-4);
    }
    SUBCASE("vanishes on uniform grids") {
        double prev = 10.0;
        for (int K : {4, 16, 64}) {
            std::vector<double> support, masses;
            for (int i = 1; i <= K; ++i) {
                support.push_back(static_cast<double>(i) / K);
                masses.push_back(1.0 / K);
            }
            const double bound = lower_bound_meanchi(DiscreteDist(support, masses));
            CHECK(bound < prev);
            prev = bound;
        }
    }
    SUBCASE("matches the general bound on the adjusted pair") {
        const DiscreteDist two({0.5, 1.0}, {0.5, 0.5});
        const AdjustmentSet set(DiscreteDist({1.0, 2.0}, {0.5, 0.5}));
        const double general =
            lower_bound_general(set.mean_chi2_table().as_dist(), ContinuousTarget::chisq2());
        CHECK(std::fabs(lower_bound_meanchi(two) - general) <= 1e-9);
    }
    SUBCASE("requires a p-value support") {
        CHECK_THROWS_AS(lower_bound_meanchi(DiscreteDist({1.0, 2.0}, {0.5, 0.5})),
                        std::domain_error);
    }
}

TEST_CASE("median-value lower bound") {
    const DiscreteDist pvals = left_pvalue_dist(oracle::step_grid_dist());
    CHECK(std::fabs(lower_bound_medianchi(pvals) - 1.32) <= 5e-3);
    CHECK(lower_bound_medianchi(pvals) >= lower_bound_meanchi(pvals));

    // On a fine uniform grid the extra c_i^2 term dies out.
    std::vector<double> support, masses;
    const int K = 10000;
    for (int i = 1; i <= K; ++i) {
        support.push_back(static_cast<double>(i) / K);
        masses.push_back(1.0 / K);
    }
    const DiscreteDist fine(support, masses);
    CHECK(std::fabs(lower_bound_medianchi(fine) - lower_bound_meanchi(fine)) < 1e-3);
}
