#pragma once

#include "wfisher/adjust.hpp"
#include "wfisher/transport.hpp"

#include <cstddef>
#include <span>

namespace wfisher {

/// Shape/scale parameterization; mean = shape * scale.
struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;
};

enum class StatisticKind { RawFisher, MeanChi, MedianChi };
enum class NullKind { ChiSq2n, OptimalGamma };

/// One testing decision: statistic value, null used, both tail
/// probabilities, and the rejection indicator at level alpha.
struct TestReport {
    StatisticKind statistic_kind = StatisticKind::MeanChi;
    double value = 0.0;
    NullKind null_kind = NullKind::OptimalGamma;
    GammaParams null_params;
    double pvalue = 1.0;        // upper tail, 1 - G(value)
    double pvalue_lower = 0.0;  // lower tail, G(value)
    double alpha = 0.05;
    bool reject = false;
};

double gamma_cdf(double x, const GammaParams& g);
double gamma_pdf(double x, const GammaParams& g);
double gamma_quantile(double p, const GammaParams& g);

/// Fisher's statistic T_n = -2 sum log P_j; every value must lie in (0, 1].
double fisher_raw(std::span<const double> pvalues);

/// Sum of table values at the observed indices (one index per table).
double combine_adjusted(std::span<const AdjustedTable> tables,
                        std::span<const std::size_t> observed);

/// Moment-matched gamma: shape = mean^2/var, scale = var/mean.
GammaParams optimal_gamma(double mean, double variance);

/// Null approximation for an i.i.d. combination of n statistics:
/// MeanChi -> Gamma(4n/nu, nu/2); MedianChi -> Gamma(n m^2/v, v/m);
/// RawFisher -> Gamma(n, 2), i.e. chi-squared with 2n df.
GammaParams iid_null(StatisticKind kind, const AdjustMoments& moments, std::size_t n);

/// Non-identical combination: the per-test moments are averaged with
/// equal weight over the given list, then matched as in the i.i.d.
/// case with the stated n.
GammaParams noniid_null(StatisticKind kind, std::span<const AdjustMoments> moments,
                        std::size_t n);

/// Applies the rejection rule value >= q_{1-alpha} and fills in both
/// tail probabilities.
TestReport run_test(double statistic_value, const GammaParams& null_params, double alpha,
                    StatisticKind kind, NullKind null_kind);

/// Power of the exact test on T = sum X_j ~ Binomial(nK, theta):
/// rejection region {T <= K_theta0} with
/// K_theta0 = max{k : P(Binomial(nK, theta0) <= k) <= alpha}.
double exact_binomial_power(std::size_t n, int K, double theta0, double theta, double alpha);

/// Lyapunov diagnostic for non-identical combinations:
/// sum_j E|Z_j - mu_j|^{2+delta} / (sum_j Var Z_j)^{1+delta/2},
/// summed exactly over each finite support. kind selects which
/// adjustment column of each set enters.
double lyapunov_ratio(StatisticKind kind, std::span<const AdjustmentSet> sets,
                      double delta = 1.0);

}  // namespace wfisher
