#include "wfisher/transport.hpp"

#include "wfisher/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wfisher {

namespace {

constexpr double kTruncationTail = 1.0e-12;  // top-cell quantile cutoff
constexpr double kCellTolerance = 1.0e-10;

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            result_gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    const double value = result_kronrod * half;
    const double error = std::fabs((result_kronrod - result_gauss) * half);
    return {a, b, value, error};
}

// Adaptive bisection on [a, b] down to an absolute tolerance.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double abs_tol) {
    if (!(b > a)) return 0.0;
    std::vector<Interval> heap;
    heap.push_back(gk15(f, a, b));
    double total_error = heap.front().error;
    int splits = 0;
    const int max_splits = 2000;
    while (total_error > abs_tol) {
        if (++splits > max_splits) {
            throw NumericError("adaptive quadrature failed to reach tolerance");
        }
        auto worst = std::max_element(heap.begin(), heap.end(), [](const auto& l, const auto& r) {
            return l.error < r.error;
        });
        const Interval iv = *worst;
        heap.erase(worst);
        const double mid = 0.5 * (iv.a + iv.b);
        heap.push_back(gk15(f, iv.a, mid));
        heap.push_back(gk15(f, mid, iv.b));
        total_error = 0.0;
        for (const auto& v : heap) total_error += v.error;
    }
    double sum = 0.0;
    for (const auto& v : heap) sum += v.value;
    return sum;
}

// Quantile endpoints of cell i, with the open top cell truncated for
// quadrature use.
std::pair<double, double> cell_bounds_for_quadrature(const DiscreteDist& d,
                                                     const ContinuousTarget& y, std::size_t i) {
    const double flo = d.cdf_before(i);
    const double fhi = d.cdf_at(i);
    const double a = y.quantile(flo);
    const double b = (fhi >= 1.0) ? y.quantile(1.0 - kTruncationTail) : y.quantile(fhi);
    return {a, std::max(a, b)};
}

double checked_cell_pow_integral(const DiscreteDist& d, const ContinuousTarget& y, double p,
                                 std::size_t i) {
    const auto [a, b] = cell_bounds_for_quadrature(d, y, i);
    const double xi = d.support_at(i);
    auto integrand = [&y, xi, p](double t) {
        return std::pow(std::fabs(xi - t), p) * y.density(t);
    };
    // Split at the atom: |x - y|^p has a derivative kink there.
    if (xi > a && xi < b) {
        return adaptive_quadrature(integrand, a, xi, 0.5 * kCellTolerance) +
               adaptive_quadrature(integrand, xi, b, 0.5 * kCellTolerance);
    }
    return adaptive_quadrature(integrand, a, b, kCellTolerance);
}

void require_pvalue_support(const DiscreteDist& d) {
    for (double x : d.support()) {
        if (!(x > 0.0 && x <= 1.0)) {
            throw std::domain_error("expected a p-value distribution with support in (0, 1]");
        }
    }
}

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

}  // namespace

Partition make_partition(const DiscreteDist& d, const ContinuousTarget& y) {
    Partition part;
    part.cells.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        part.cells.emplace_back(y.quantile(d.cdf_before(i)), y.quantile(d.cdf_at(i)));
    }
    return part;
}

DiscreteDist AdjustedTable::as_dist() const {
    return DiscreteDist(values, {base.masses().begin(), base.masses().end()});
}

double AdjustedTable::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * base.mass_at(i);
    return s;
}

double AdjustedTable::variance() const {
    const double mu = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double delta = values[i] - mu;
        s += delta * delta * base.mass_at(i);
    }
    return s;
}

double wasserstein_p_pow(const DiscreteDist& d, const ContinuousTarget& y, double p) {
    if (!(p > 1.0)) {
        throw std::domain_error("wasserstein_p: requires p > 1");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        total += checked_cell_pow_integral(d, y, p, i);
    }
    return total;
}

double wasserstein_p(const DiscreteDist& d, const ContinuousTarget& y, double p) {
    return std::pow(wasserstein_p_pow(d, y, p), 1.0 / p);
}

double coupling_covariance(const DiscreteDist& d, const ContinuousTarget& y) {
    double exy = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double a = y.quantile(d.cdf_before(i));
        const double b = y.quantile(d.cdf_at(i));
        exy += d.support_at(i) * y.partial_moment1(a, b);
    }
    return exy - d.mean() * y.mean();
}

AdjustedTable optimal_adjust(const DiscreteDist& d, const ContinuousTarget& y, double p) {
    if (!(p > 1.0 && p <= 8.0)) {
        throw std::domain_error("optimal_adjust: p restricted to (1, 8]");
    }
    std::vector<double> values(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double a = y.quantile(d.cdf_before(i));
        const double b = y.quantile(d.cdf_at(i));
        const double mass = d.mass_at(i);
        if (p == 2.0) {
            values[i] = y.partial_moment1(a, b) / mass;
        } else {
            const double cond = y.partial_moment(p - 1.0, a, b) / mass;
            values[i] = std::pow(cond, 1.0 / (p - 1.0));
        }
    }
    return AdjustedTable{d, y, std::move(values), p};
}

double w2_gap(const AdjustedTable& adjusted, const ContinuousTarget& y) {
    if (!adjusted.target.same_law(y)) {
        throw std::invalid_argument("w2_gap: table was built against a different target");
    }
    return y.variance() - adjusted.variance();
}

double lower_bound_general(const DiscreteDist& d, const ContinuousTarget& y) {
    double best = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double a = y.quantile(d.cdf_before(i));
        const double b = y.quantile(d.cdf_at(i));
        const double xi = d.support_at(i);
        const double cell = xi * xi * d.mass_at(i) - 2.0 * xi * y.partial_moment1(a, b) +
                            y.partial_moment2(a, b);
        best = std::max(best, cell);
    }
    return best;
}

double lower_bound_meanchi(const DiscreteDist& d_pvals) {
    require_pvalue_support(d_pvals);
    double best = 0.0;
    double fprev = 0.0;
    for (std::size_t i = 0; i < d_pvals.size(); ++i) {
        const double f = d_pvals.support_at(i);
        const double p = f - fprev;
        double term = p;
        if (fprev > 0.0) {
            const double lr = std::log(f) - std::log(fprev);
            term -= f * fprev * lr * lr / p;
        }
        best = std::max(best, term);
        fprev = f;
    }
    return 4.0 * best;
}

double lower_bound_medianchi(const DiscreteDist& d_pvals) {
    require_pvalue_support(d_pvals);
    double best = 0.0;
    double fprev = 0.0;
    for (std::size_t i = 0; i < d_pvals.size(); ++i) {
        const double f = d_pvals.support_at(i);
        const double p = f - fprev;
        const double c = 1.0 - (xlogx(f) - xlogx(fprev)) / p + std::log(0.5 * (f + fprev));
        double term = p * (1.0 + c * c);
        if (fprev > 0.0) {
            const double lr = std::log(f) - std::log(fprev);
            term -= f * fprev * lr * lr / p;
        }
        best = std::max(best, term);
        fprev = f;
    }
    return 4.0 * best;
}

}  // namespace wfisher
