#pragma once

#include "wfisher/discrete_dist.hpp"
#include "wfisher/transport.hpp"

#include <vector>

namespace wfisher {

/// Exact moments of the two chi-squared-targeted adjustments under the
/// null: nu = Var(mean-value-chi2), m / v = mean / variance of the
/// median-value-chi2. The mean of the mean-value statistic is 2 up to
/// floating-point error.
struct AdjustMoments {
    double mean_meanchi = 2.0;
    double var_meanchi = 0.0;   // nu
    double mean_medchi = 0.0;   // m
    double var_medchi = 0.0;    // v
};

/// Lancaster's mid-p: (F_prev + F_cur) / 2.
double midp(double F_prev, double F_cur);

/// Mean-value-chi2 on the cell (F_prev, F_cur]:
/// 2 - 2 (F_cur log F_cur - F_prev log F_prev) / (F_cur - F_prev),
/// with 0 log 0 = 0.
double mean_value_chi2(double F_prev, double F_cur);

/// Median-value-chi2: -2 log((F_prev + F_cur) / 2).
double median_value_chi2(double F_prev, double F_cur);

/// Exact moment summary over the CDF grid of an input statistic.
AdjustMoments adjust_moments(const DiscreteDist& d);

/// Per-distribution cache of the three adjustments, indexed by the
/// input statistic's support. Built once; the simulation loop only does
/// index lookups.
class AdjustmentSet {
  public:
    explicit AdjustmentSet(DiscreteDist input);

    const DiscreteDist& input() const { return input_; }
    const std::vector<double>& midp_values() const { return midp_; }
    const std::vector<double>& mean_chi2_values() const { return mean_chi2_; }
    const std::vector<double>& median_chi2_values() const { return median_chi2_; }
    const AdjustMoments& moments() const { return moments_; }

    /// Mid-p as an AdjustedTable over the p-value distribution
    /// (target Uniform(0,1), order 2).
    AdjustedTable midp_table() const;
    /// Mean-value-chi2 over the -2 log P distribution (target chisq2).
    AdjustedTable mean_chi2_table() const;
    /// Median-value-chi2 over the same base; not a Wasserstein optimum,
    /// packaged for combination lookups.
    AdjustedTable median_chi2_table() const;

  private:
    DiscreteDist input_;
    std::vector<double> midp_;
    std::vector<double> mean_chi2_;
    std::vector<double> median_chi2_;
    AdjustMoments moments_;
};

}  // namespace wfisher
