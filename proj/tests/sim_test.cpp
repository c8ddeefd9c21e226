#include "wfisher/sim.hpp"

#include "oracle_helpers.hpp"
#include "wfisher/counter_rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace wfisher;

namespace {

SimConfig binomial_null_config(int K, double theta0, std::size_t n, std::size_t reps,
                               std::uint64_t seed) {
    SimConfig cfg;
    cfg.scenario = IIDBinomialScenario{K, theta0, theta0};
    cfg.n_tests = n;
    cfg.n_reps = reps;
    cfg.seed = seed;
    return cfg;
}

double rate_of(const SimResult& r, StatisticKind stat, NullKind null, double alpha) {
    for (const auto& e : r.entries) {
        if (e.statistic == stat && e.null == null && e.alpha == alpha) return e.rate;
    }
    REQUIRE(false);
    return -1.0;
}

}  // namespace

TEST_CASE("identical configs give identical results") {
    const SimConfig cfg = binomial_null_config(5, 0.3, 20, 3000, 99);
    const SimResult a = simulate_type1(cfg);
    const SimResult b = simulate_type1(cfg);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].rate == b.entries[i].rate);
        CHECK(a.entries[i].se == b.entries[i].se);
    }
}

TEST_CASE("thread count does not change results") {
    SimConfig cfg = binomial_null_config(5, 0.3, 50, 20000, 4242);
    cfg.max_threads = 1;
    const SimResult serial = simulate_type1(cfg);
    cfg.max_threads = 4;
    const SimResult parallel = simulate_type1(cfg);
    for (std::size_t i = 0; i < serial.entries.size(); ++i) {
        CHECK(serial.entries[i].rate == parallel.entries[i].rate);
    }
}

TEST_CASE("seeded halves pool to the full run") {
    SimConfig full = binomial_null_config(5, 0.5, 30, 2000, 7);
    const SimResult whole = simulate_type1(full);

    SimConfig first = full;
    first.n_reps = 1000;
    SimConfig second = full;
    second.n_reps = 1000;
    second.rep_offset = 1000;
    const SimResult a = simulate_type1(first);
    const SimResult b = simulate_type1(second);
    for (std::size_t i = 0; i < whole.entries.size(); ++i) {
        const double pooled = 0.5 * (a.entries[i].rate + b.entries[i].rate);
        CHECK(std::fabs(pooled - whole.entries[i].rate) <= 1e-12);
    }
}

TEST_CASE("single replicate yields a 0/1 rate") {
    const SimResult r = simulate_type1(binomial_null_config(5, 0.5, 10, 1, 3));
    for (const auto& e : r.entries) {
        CHECK((e.rate == 0.0 || e.rate == 1.0));
    }
}

TEST_CASE("type1 validates null parameters") {
    SimConfig cfg = binomial_null_config(5, 0.5, 10, 10, 3);
    cfg.scenario = IIDBinomialScenario{5, 0.5, 0.3};
    CHECK_THROWS_AS(simulate_type1(cfg), std::domain_error);
    cfg.scenario = IIDHypergeometricScenario{50, 50, 5, 2.0};
    CHECK_THROWS_AS(simulate_type1(cfg), std::domain_error);
    cfg.scenario = NonIIDBinomialScenario{{{5, 0.1}}, 0.5};
    CHECK_THROWS_AS(simulate_type1(cfg), std::domain_error);
    cfg.scenario = IIDBinomialScenario{5, 0.5, 0.5};
    cfg.alpha_levels = {1.5};
    CHECK_THROWS_AS(simulate_type1(cfg), std::domain_error);
}

TEST_CASE("discrete sampling matches the masses") {
    const DiscreteDist d = make_binomial(5, 0.3);
    const std::size_t n = 1'000'000;
    std::vector<std::size_t> counts(d.size());
    CounterRng rng(123456, 0);
    const auto cdf = d.cdf();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        const auto idx = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        ++counts[idx];
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double expected = d.mass_at(i) * static_cast<double>(n);
        const double sigma = std::sqrt(expected * (1.0 - d.mass_at(i)));
        CHECK(std::fabs(static_cast<double>(counts[i]) - expected) <= 4.0 * sigma);
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    // chi-squared goodness of fit at alpha = 0.001, df = size - 1.
    const GammaParams chi{0.5 * static_cast<double>(d.size() - 1), 2.0};
    CHECK(chi2 < gamma_quantile(0.999, chi));
}

TEST_CASE("type1 rates near nominal under the gamma null") {
    SimConfig cfg = binomial_null_config(5, 0.5, 100, 20000, 11);
    const SimResult r = simulate_type1(cfg);
    const double se3 = 3.0 * std::sqrt(0.05 * 0.95 / 20000.0);
    CHECK(std::fabs(rate_of(r, StatisticKind::MeanChi, NullKind::OptimalGamma, 0.05) - 0.05) <=
          se3);
    CHECK(std::fabs(rate_of(r, StatisticKind::MedianChi, NullKind::OptimalGamma, 0.05) - 0.05) <=
          se3);
    // The chi-squared null is conservative for the median statistic.
    CHECK(rate_of(r, StatisticKind::MedianChi, NullKind::ChiSq2n, 0.05) < 0.05 - se3);
}

TEST_CASE("power at the null equals the type I rate") {
    SUBCASE("binomial") {
        SimConfig cfg = binomial_null_config(5, 0.2, 25, 4000, 5);
        const SimResult t1 = simulate_type1(cfg);
        const SimResult pw = simulate_power(cfg);
        for (std::size_t i = 0; i < t1.entries.size(); ++i) {
            CHECK(t1.entries[i].rate == pw.entries[i].rate);
        }
        CHECK(pw.has_exact_power);
        REQUIRE(pw.exact_power.size() == 1);
        CHECK(pw.exact_power[0].second <= 0.05);
    }
    SUBCASE("hypergeometric at log omega zero") {
        SimConfig cfg;
        cfg.scenario = IIDHypergeometricScenario{200, 200, 5, 1.0};
        cfg.n_tests = 20;
        cfg.n_reps = 4000;
        cfg.seed = 17;
        const SimResult t1 = simulate_type1(cfg);
        const SimResult pw = simulate_power(cfg);
        for (std::size_t i = 0; i < t1.entries.size(); ++i) {
            CHECK(t1.entries[i].rate == pw.entries[i].rate);
        }
    }
}

TEST_CASE("gamma null beats chi-squared on power") {
    SimConfig cfg;
    cfg.scenario = IIDBinomialScenario{5, 0.1, 0.05};
    cfg.n_tests = 40;
    cfg.n_reps = 10000;
    cfg.seed = 23;
    const SimResult r = simulate_power(cfg);
    for (StatisticKind stat : {StatisticKind::MeanChi, StatisticKind::MedianChi}) {
        const double gamma_rate = rate_of(r, stat, NullKind::OptimalGamma, 0.05);
        const double chisq_rate = rate_of(r, stat, NullKind::ChiSq2n, 0.05);
        CHECK(gamma_rate > chisq_rate);
    }
}

TEST_CASE("non-iid scenario cycles the settings") {
    SimConfig cfg;
    cfg.scenario = NonIIDBinomialScenario{{{5, 0.1}, {10, 0.5}, {20, 0.01}}, 1.0};
    cfg.n_tests = 30;
    cfg.n_reps = 2000;
    cfg.seed = 31;
    const SimResult r = simulate_type1(cfg);
    REQUIRE(!r.entries.empty());
    for (const auto& e : r.entries) {
        CHECK(e.rate >= 0.0);
        CHECK(e.rate <= 1.0);
        CHECK(e.se == doctest::Approx(std::sqrt(e.rate * (1.0 - e.rate) / 2000.0)));
    }
}

TEST_CASE("histogram table") {
    SimConfig cfg = binomial_null_config(5, 0.1, 1000, 100000, 2718);
    const HistogramTable t = simulate_histogram(cfg, 60);
    REQUIRE(t.bin_lo.size() == 60);

    const AdjustMoments m = adjust_moments(make_binomial(5, 0.1));
    const double n = 1000.0;
    const double sigma_mean = std::sqrt(n * m.var_meanchi / 100000.0);
    CHECK(std::fabs(t.mean_sn - 2.0 * n) <= 3.0 * sigma_mean);
    CHECK(std::fabs(t.var_sn - n * m.var_meanchi) <= 0.05 * n * m.var_meanchi);

    double total_s = 0.0, total_st = 0.0;
    for (std::size_t i = 0; i < t.bin_lo.size(); ++i) {
        const double w = t.bin_hi[i] - t.bin_lo[i];
        total_s += t.density_sn[i] * w;
        total_st += t.density_stilde[i] * w;
    }
    CHECK(std::fabs(total_s - 1.0) <= 1e-6);
    CHECK(std::fabs(total_st - 1.0) <= 1e-6);

    CHECK_THROWS_AS(simulate_histogram(cfg, 5), std::domain_error);
}

TEST_CASE("gamma approximation fits the hypergeometric histogram better") {
    SimConfig cfg;
    cfg.scenario = IIDHypergeometricScenario{4000, 4000, 5, 1.0};
    cfg.n_tests = 100;
    cfg.n_reps = 100000;
    cfg.seed = 1618;
    const HistogramTable t = simulate_histogram(cfg, 60);
    double err_gamma_s = 0.0, err_chisq_s = 0.0, err_gamma_st = 0.0, err_chisq_st = 0.0;
    for (std::size_t i = 0; i < t.bin_lo.size(); ++i) {
        const double mid = 0.5 * (t.bin_lo[i] + t.bin_hi[i]);
        err_gamma_s += std::fabs(t.density_sn[i] - t.gamma_pdf[i]);
        err_chisq_s += std::fabs(t.density_sn[i] - t.chisq_pdf[i]);
        err_gamma_st += std::fabs(t.density_stilde[i] - gamma_pdf(mid, t.gamma_stilde));
        err_chisq_st += std::fabs(t.density_stilde[i] - t.chisq_pdf[i]);
    }
    CHECK(err_gamma_s < err_chisq_s);
    CHECK(err_gamma_st < err_chisq_st);
}

TEST_CASE("gamma CDF of the combination converges to uniform") {
    // Kolmogorov-Smirnov distance of G(S_n) from Uniform(0,1) at
    // n = 1000 over 1e5 replicates.
    const DiscreteDist d = make_binomial(5, 0.5);
    const AdjustmentSet set(d);
    const std::size_t n = 1000, reps = 100000;
    const GammaParams g = iid_null(StatisticKind::MeanChi, set.moments(), n);
    std::vector<double> u(reps);
    const auto cdf = d.cdf();
    const auto& z = set.mean_chi2_values();
    for (std::size_t r = 0; r < reps; ++r) {
        CounterRng rng(90210, r);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto idx = static_cast<std::size_t>(
                std::upper_bound(cdf.begin(), cdf.end(), rng.next_unit()) - cdf.begin());
            s += z[idx];
        }
        u[r] = gamma_cdf(s, g);
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const double hi = static_cast<double>(i + 1) / static_cast<double>(reps) - u[i];
        const double lo = u[i] - static_cast<double>(i) / static_cast<double>(reps);
        ks = std::max(ks, std::max(hi, lo));
    }
    CHECK(ks <= 0.01);
}

TEST_CASE("csv serialization shapes") {
    const SimResult r = simulate_type1(binomial_null_config(5, 0.5, 10, 50, 1));
    std::istringstream csv(r.to_csv());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "statistic,null,alpha,rate,se");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 4);
    CHECK(r.to_json().find("\"rates\"") != std::string::npos);

    const HistogramTable t = simulate_histogram(binomial_null_config(5, 0.5, 10, 200, 1), 12);
    std::istringstream hist_csv(t.to_csv());
    std::getline(hist_csv, header);
    CHECK(header == "bin_lo,bin_hi,density_Sn,density_Stilde,gamma_pdf,chisq_pdf");
}
