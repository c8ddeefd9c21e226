#include "wfisher/continuous_target.hpp"

#include "wfisher/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wfisher {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double w) { return std::min(1.0, std::max(0.0, w)); }
}  // namespace

ContinuousTarget ContinuousTarget::uniform01() {
    return ContinuousTarget(Kind::Uniform01, 0.0, 0.0);
}

ContinuousTarget ContinuousTarget::chisq2() {
    return ContinuousTarget(Kind::ChiSq2, 1.0, 2.0);
}

ContinuousTarget ContinuousTarget::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw std::domain_error("ContinuousTarget::gamma: shape and scale must be positive");
    }
    return ContinuousTarget(Kind::Gamma, shape, scale);
}

double ContinuousTarget::support_hi() const {
    return kind_ == Kind::Uniform01 ? 1.0 : kInf;
}

double ContinuousTarget::density(double y) const {
    if (kind_ == Kind::Uniform01) {
        return (y >= 0.0 && y <= 1.0) ? 1.0 : 0.0;
    }
    if (y < 0.0) return 0.0;
    if (y == 0.0) {
        if (shape_ < 1.0) return kInf;
        if (shape_ == 1.0) return 1.0 / scale_;
        return 0.0;
    }
    const double log_pdf = (shape_ - 1.0) * std::log(y / scale_) - y / scale_ -
                           special::log_gamma(shape_) - std::log(scale_);
    return std::exp(log_pdf);
}

double ContinuousTarget::cdf(double y) const {
    if (kind_ == Kind::Uniform01) {
        return clamp01(y);
    }
    if (y <= 0.0) return 0.0;
    if (!std::isfinite(y)) return 1.0;
    return special::reg_lower_gamma(shape_, y / scale_);
}

double ContinuousTarget::quantile(double w) const {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::domain_error("ContinuousTarget::quantile: w must lie in [0, 1]");
    }
    if (kind_ == Kind::Uniform01) return w;
    if (w == 0.0) return 0.0;
    if (w == 1.0) return kInf;
    if (kind_ == Kind::ChiSq2) {
        // G(y) = 1 - exp(-y/2) inverts in closed form.
        return -2.0 * std::log1p(-w);
    }
    return scale_ * special::inv_reg_lower_gamma(shape_, w);
}

double ContinuousTarget::mean() const {
    return kind_ == Kind::Uniform01 ? 0.5 : shape_ * scale_;
}

double ContinuousTarget::variance() const {
    return kind_ == Kind::Uniform01 ? 1.0 / 12.0 : shape_ * scale_ * scale_;
}

double ContinuousTarget::partial_moment1(double a, double b) const {
    return partial_moment(1.0, a, b);
}

double ContinuousTarget::partial_moment2(double a, double b) const {
    return partial_moment(2.0, a, b);
}

double ContinuousTarget::partial_moment(double r, double a, double b) const {
    if (!(r > 0.0)) {
        throw std::domain_error("partial_moment: order must be positive");
    }
    if (!(b >= a)) {
        throw std::domain_error("partial_moment: requires b >= a");
    }
    a = std::max(a, 0.0);
    if (kind_ == Kind::Uniform01) {
        const double bb = std::min(b, 1.0);
        if (bb <= a) return 0.0;
        return (std::pow(bb, r + 1.0) - std::pow(a, r + 1.0)) / (r + 1.0);
    }
    if (kind_ == Kind::ChiSq2 && (r == 1.0 || r == 2.0)) {
        // Elementary antiderivatives of y^r * exp(-y/2)/2.
        auto tail1 = [](double y) { return std::isfinite(y) ? (y + 2.0) * std::exp(-0.5 * y) : 0.0; };
        auto tail2 = [](double y) {
            return std::isfinite(y) ? (y * y + 4.0 * y + 8.0) * std::exp(-0.5 * y) : 0.0;
        };
        return r == 1.0 ? tail1(a) - tail1(b) : tail2(a) - tail2(b);
    }
    // Gamma family: int y^r g = scale^r * Gamma(shape+r)/Gamma(shape) *
    // [P(shape+r, b/scale) - P(shape+r, a/scale)].
    const double pa = a > 0.0 ? special::reg_lower_gamma(shape_ + r, a / scale_) : 0.0;
    const double pb = std::isfinite(b) ? special::reg_lower_gamma(shape_ + r, b / scale_) : 1.0;
    const double factor =
        std::exp(r * std::log(scale_) + special::log_gamma(shape_ + r) - special::log_gamma(shape_));
    return factor * (pb - pa);
}

bool ContinuousTarget::same_law(const ContinuousTarget& other) const {
    const bool this_uniform = kind_ == Kind::Uniform01;
    const bool other_uniform = other.kind_ == Kind::Uniform01;
    if (this_uniform || other_uniform) return this_uniform == other_uniform;
    return shape_ == other.shape_ && scale_ == other.scale_;
}

}  // namespace wfisher
