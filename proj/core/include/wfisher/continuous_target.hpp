#pragma once

namespace wfisher {

/// Continuous target law for the adjustment machinery: Uniform(0,1),
/// chi-squared with 2 df, or Gamma(shape, scale). Exposes density, CDF,
/// quantile, moments, and closed-form partial moments over an interval
/// (the workhorse behind conditional cell moments).
class ContinuousTarget {
  public:
    enum class Kind { Uniform01, ChiSq2, Gamma };

    static ContinuousTarget uniform01();
    static ContinuousTarget chisq2();
    static ContinuousTarget gamma(double shape, double scale);

    Kind kind() const { return kind_; }
    double shape() const { return shape_; }
    double scale() const { return scale_; }

    double density(double y) const;
    double cdf(double y) const;
    /// Quantile for w in [0, 1]; w = 0 maps to the lower support
    /// endpoint, w = 1 to +infinity (gamma family) or 1 (uniform).
    double quantile(double w) const;

    double mean() const;
    double variance() const;

    double support_lo() const { return 0.0; }
    double support_hi() const;

    /// Integral of y * g(y) over [a, b]; b may be +infinity.
    double partial_moment1(double a, double b) const;
    /// Integral of y^2 * g(y) over [a, b].
    double partial_moment2(double a, double b) const;
    /// Integral of y^r * g(y) over [a, b] for real order r > 0.
    double partial_moment(double r, double a, double b) const;

    /// Same law (chisq2 compares equal to gamma(1, 2)).
    bool same_law(const ContinuousTarget& other) const;

  private:
    ContinuousTarget(Kind kind, double shape, double scale)
        : kind_(kind), shape_(shape), scale_(scale) {}

    Kind kind_;
    double shape_;  // 0 for Uniform01
    double scale_;  // 0 for Uniform01
};

}  // namespace wfisher
