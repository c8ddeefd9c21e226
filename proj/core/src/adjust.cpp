#include "wfisher/adjust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wfisher {

namespace {

void check_cell(double F_prev, double F_cur) {
    if (!(F_prev >= 0.0 && F_prev < F_cur && F_cur <= 1.0)) {
        throw std::domain_error("adjustment cell requires 0 <= F_prev < F_cur <= 1");
    }
}

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

}  // namespace

double midp(double F_prev, double F_cur) {
    check_cell(F_prev, F_cur);
    return 0.5 * (F_prev + F_cur);
}

double mean_value_chi2(double F_prev, double F_cur) {
    check_cell(F_prev, F_cur);
    return 2.0 - 2.0 * (xlogx(F_cur) - xlogx(F_prev)) / (F_cur - F_prev);
}

double median_value_chi2(double F_prev, double F_cur) {
    check_cell(F_prev, F_cur);
    return -2.0 * std::log(0.5 * (F_prev + F_cur));
}

AdjustMoments adjust_moments(const DiscreteDist& d) {
    AdjustMoments out;
    double mean_dd = 0.0, m2_dd = 0.0, mean_t = 0.0, m2_t = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = d.mass_at(i);
        const double zdd = mean_value_chi2(d.cdf_before(i), d.cdf_at(i));
        const double zt = median_value_chi2(d.cdf_before(i), d.cdf_at(i));
        mean_dd += p * zdd;
        m2_dd += p * zdd * zdd;
        mean_t += p * zt;
        m2_t += p * zt * zt;
    }
    out.mean_meanchi = mean_dd;
    out.var_meanchi = m2_dd - mean_dd * mean_dd;
    out.mean_medchi = mean_t;
    out.var_medchi = m2_t - mean_t * mean_t;
    return out;
}

AdjustmentSet::AdjustmentSet(DiscreteDist input) : input_(std::move(input)) {
    const std::size_t n = input_.size();
    midp_.resize(n);
    mean_chi2_.resize(n);
    median_chi2_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double flo = input_.cdf_before(i);
        const double fhi = input_.cdf_at(i);
        midp_[i] = midp(flo, fhi);
        mean_chi2_[i] = mean_value_chi2(flo, fhi);
        median_chi2_[i] = median_value_chi2(flo, fhi);
    }
    moments_ = adjust_moments(input_);
}

namespace {

// Builds the table base and keeps values aligned even if the
// constructor drops an fp-collapsed atom: kept support values are
// copied through unchanged, so matching by equality is exact.
AdjustedTable make_aligned_table(std::vector<double> support, std::vector<double> masses,
                                 const std::vector<double>& values, ContinuousTarget target) {
    DiscreteDist base(support, std::move(masses));
    std::vector<double> kept;
    kept.reserve(base.size());
    std::size_t j = 0;
    for (double s : base.support()) {
        while (j < support.size() && support[j] != s) ++j;
        if (j == support.size()) {
            throw std::logic_error("adjusted table misaligned with its base distribution");
        }
        kept.push_back(values[j]);
    }
    return AdjustedTable{std::move(base), target, std::move(kept), 2.0};
}

// The -2 log P statistic reverses the p-value order; build its
// distribution (ascending) together with the matching value order.
AdjustedTable neg2logp_table(const DiscreteDist& input, const std::vector<double>& cell_values) {
    const std::size_t n = input.size();
    std::vector<double> support(n), masses(n), values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        support[i] = -2.0 * std::log(input.cdf_at(j));
        masses[i] = input.mass_at(j);
        values[i] = cell_values[j];
    }
    return make_aligned_table(std::move(support), std::move(masses), values,
                              ContinuousTarget::chisq2());
}

}  // namespace

AdjustedTable AdjustmentSet::midp_table() const {
    return make_aligned_table({input_.cdf().begin(), input_.cdf().end()},
                              {input_.masses().begin(), input_.masses().end()}, midp_,
                              ContinuousTarget::uniform01());
}

AdjustedTable AdjustmentSet::mean_chi2_table() const {
    return neg2logp_table(input_, mean_chi2_);
}

AdjustedTable AdjustmentSet::median_chi2_table() const {
    return neg2logp_table(input_, median_chi2_);
}

}  // namespace wfisher
