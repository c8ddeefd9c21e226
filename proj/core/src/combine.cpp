#include "wfisher/combine.hpp"

#include "wfisher/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfisher {

double gamma_cdf(double x, const GammaParams& g) {
    if (x <= 0.0) return 0.0;
    return special::reg_lower_gamma(g.shape, x / g.scale);
}

double gamma_pdf(double x, const GammaParams& g) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (g.shape < 1.0) return std::numeric_limits<double>::infinity();
        return g.shape == 1.0 ? 1.0 / g.scale : 0.0;
    }
    return std::exp((g.shape - 1.0) * std::log(x / g.scale) - x / g.scale -
                    special::log_gamma(g.shape) - std::log(g.scale));
}

double gamma_quantile(double p, const GammaParams& g) {
    return g.scale * special::inv_reg_lower_gamma(g.shape, p);
}

double fisher_raw(std::span<const double> pvalues) {
    double sum = 0.0;
    for (double p : pvalues) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw std::domain_error("fisher_raw: p-values must lie in (0, 1]");
        }
        sum -= 2.0 * std::log(p);
    }
    return sum;
}

double combine_adjusted(std::span<const AdjustedTable> tables,
                        std::span<const std::size_t> observed) {
    if (tables.size() != observed.size()) {
        throw std::invalid_argument("combine_adjusted: one observed index per table required");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < tables.size(); ++j) {
        if (observed[j] >= tables[j].values.size()) {
            throw std::out_of_range("combine_adjusted: observed index " +
                                    std::to_string(observed[j]) + " out of range for table " +
                                    std::to_string(j));
        }
        sum += tables[j].values[observed[j]];
    }
    return sum;
}

GammaParams optimal_gamma(double mean, double variance) {
    if (!(mean > 0.0) || !(variance > 0.0)) {
        throw std::domain_error("optimal_gamma: mean and variance must be positive");
    }
    return {mean * mean / variance, variance / mean};
}

GammaParams iid_null(StatisticKind kind, const AdjustMoments& moments, std::size_t n) {
    if (n == 0) {
        throw std::domain_error("iid_null: n must be >= 1");
    }
    const double dn = static_cast<double>(n);
    switch (kind) {
        case StatisticKind::MeanChi:
            return {4.0 * dn / moments.var_meanchi, moments.var_meanchi / 2.0};
        case StatisticKind::MedianChi:
            return {dn * moments.mean_medchi * moments.mean_medchi / moments.var_medchi,
                    moments.var_medchi / moments.mean_medchi};
        case StatisticKind::RawFisher:
            return {dn, 2.0};
    }
    throw std::logic_error("iid_null: unknown statistic kind");
}

GammaParams noniid_null(StatisticKind kind, std::span<const AdjustMoments> moments,
                        std::size_t n) {
    if (moments.empty()) {
        throw std::domain_error("noniid_null: moments list must be non-empty");
    }
    AdjustMoments avg;
    avg.mean_meanchi = avg.var_meanchi = avg.mean_medchi = avg.var_medchi = 0.0;
    for (const auto& m : moments) {
        avg.mean_meanchi += m.mean_meanchi;
        avg.var_meanchi += m.var_meanchi;
        avg.mean_medchi += m.mean_medchi;
        avg.var_medchi += m.var_medchi;
    }
    const double k = static_cast<double>(moments.size());
    avg.mean_meanchi /= k;
    avg.var_meanchi /= k;
    avg.mean_medchi /= k;
    avg.var_medchi /= k;
    return iid_null(kind, avg, n);
}

TestReport run_test(double statistic_value, const GammaParams& null_params, double alpha,
                    StatisticKind kind, NullKind null_kind) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("run_test: alpha must lie in (0, 1)");
    }
    TestReport r;
    r.statistic_kind = kind;
    r.value = statistic_value;
    r.null_kind = null_kind;
    r.null_params = null_params;
    r.pvalue_lower = gamma_cdf(statistic_value, null_params);
    r.pvalue = 1.0 - r.pvalue_lower;
    r.alpha = alpha;
    r.reject = statistic_value >= gamma_quantile(1.0 - alpha, null_params);
    return r;
}

double exact_binomial_power(std::size_t n, int K, double theta0, double theta, double alpha) {
    if (n == 0 || K < 1) {
        throw std::domain_error("exact_binomial_power: n and K must be >= 1");
    }
    if (!(theta0 > 0.0 && theta0 < 1.0) || !(theta > 0.0 && theta < 1.0) ||
        !(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("exact_binomial_power: parameters out of range");
    }
    const long nk = static_cast<long>(n) * K;
    const double lg_nk = special::log_gamma(static_cast<double>(nk) + 1.0);
    auto log_pmf = [nk, lg_nk](long k, double th) {
        return lg_nk - special::log_gamma(static_cast<double>(k) + 1.0) -
               special::log_gamma(static_cast<double>(nk - k) + 1.0) +
               static_cast<double>(k) * std::log(th) +
               static_cast<double>(nk - k) * std::log1p(-th);
    };

    // Largest k with P(Binomial(nK, theta0) <= k) <= alpha; -1 if none.
    long k_alpha = -1;
    double cdf0 = 0.0;
    for (long k = 0; k <= nk; ++k) {
        cdf0 += std::exp(log_pmf(k, theta0));
        if (cdf0 <= alpha) {
            k_alpha = k;
        } else {
            break;
        }
    }
    if (k_alpha < 0) return 0.0;

    double power = 0.0;
    for (long k = 0; k <= k_alpha; ++k) {
        power += std::exp(log_pmf(k, theta));
    }
    return std::min(power, 1.0);
}

double lyapunov_ratio(StatisticKind kind, std::span<const AdjustmentSet> sets, double delta) {
    if (!(delta > 0.0)) {
        throw std::domain_error("lyapunov_ratio: delta must be positive");
    }
    if (kind == StatisticKind::RawFisher) {
        throw std::domain_error("lyapunov_ratio: defined for the adjusted statistics only");
    }
    double numer = 0.0;
    double total_var = 0.0;
    for (const auto& set : sets) {
        const auto& values =
            kind == StatisticKind::MeanChi ? set.mean_chi2_values() : set.median_chi2_values();
        const auto& d = set.input();
        double mu = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) mu += d.mass_at(i) * values[i];
        double var = 0.0;
        double abs_moment = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double dev = std::fabs(values[i] - mu);
            var += d.mass_at(i) * dev * dev;
            abs_moment += d.mass_at(i) * std::pow(dev, 2.0 + delta);
        }
        numer += abs_moment;
        total_var += var;
    }
    if (!(total_var > 0.0)) {
        throw std::domain_error("lyapunov_ratio: total variance must be positive");
    }
    return numer / std::pow(total_var, 1.0 + 0.5 * delta);
}

}  // namespace wfisher
