#pragma once

#include "wfisher/continuous_target.hpp"
#include "wfisher/discrete_dist.hpp"

#include <utility>
#include <vector>

namespace wfisher {

/// Quantile image of the discrete CDF grid: cell i is
/// [G^{-1}(F_{i-1}), G^{-1}(F_i)] and carries target probability p_i.
struct Partition {
    std::vector<std::pair<double, double>> cells;
};

Partition make_partition(const DiscreteDist& d, const ContinuousTarget& y);

/// Per-support-point adjusted values z_i aligned with a base
/// distribution, together with the target they were built against and
/// the Wasserstein order used.
struct AdjustedTable {
    DiscreteDist base;
    ContinuousTarget target;
    std::vector<double> values;
    double order = 2.0;

    /// The adjusted law itself (support = values, masses from base).
    DiscreteDist as_dist() const;
    double mean() const;
    double variance() const;
};

/// W_p(d, y) by per-cell adaptive Gauss-Kronrod quadrature of
/// |x_i - y|^p against the target density. Absolute error on W_p^p is
/// kept below ~1e-8; the unbounded top cell is truncated at the
/// 1 - 1e-12 target quantile.
double wasserstein_p(const DiscreteDist& d, const ContinuousTarget& y, double p);
/// Same computation, returning W_p^p.
double wasserstein_p_pow(const DiscreteDist& d, const ContinuousTarget& y, double p);

/// Cov_pi(X, Y) under the quantile coupling, via closed-form partial
/// moments of the target per cell.
double coupling_covariance(const DiscreteDist& d, const ContinuousTarget& y);

/// Wasserstein-optimal adjustment: z_i = (E[Y^{p-1} | Y in A_i])^{1/(p-1)}.
/// p is restricted to (1, 8].
AdjustedTable optimal_adjust(const DiscreteDist& d, const ContinuousTarget& y, double p);

/// Var(Y) - Var(Z) for a table produced by optimal_adjust at p = 2
/// against the same target; equals W_2^2(Z, Y).
double w2_gap(const AdjustedTable& adjusted, const ContinuousTarget& y);

/// sup_i E((x_i - Y)^2 | A_i) * (F_i - F_{i-1}), the largest single-cell
/// contribution to W_2^2(d, y).
double lower_bound_general(const DiscreteDist& d, const ContinuousTarget& y);

/// Closed-form single-cell bound on W_2^2(mean-value-chi2, chisq2),
/// driven by the p-value grid alone (support of d_pvals = attainable
/// CDF values).
double lower_bound_meanchi(const DiscreteDist& d_pvals);

/// As lower_bound_meanchi with the (1 + c_i^2) factor for the
/// median-value-chi2 statistic.
double lower_bound_medianchi(const DiscreteDist& d_pvals);

}  // namespace wfisher
