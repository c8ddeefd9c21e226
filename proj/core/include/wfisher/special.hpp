#pragma once

namespace wfisher::special {

/// Outcome of an incomplete-gamma evaluation, including iteration
/// diagnostics from the series / continued-fraction loops.
struct RegularizedGammaResult {
    double value = 0.0;  // in [0, 1]
    int iterations = 0;
    bool converged = false;
};

inline constexpr int kMaxIterations = 500;

/// Natural log of the gamma function, Lanczos approximation (g = 7,
/// 9 coefficients). Relative error below 1e-13 on [1e-3, 1e6].
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x). Power series for
/// x < a + 1, Lentz continued fraction otherwise.
RegularizedGammaResult reg_lower_gamma_ex(double a, double x);

/// P(a, x); throws NumericError if the expansion does not converge
/// within kMaxIterations.
double reg_lower_gamma(double a, double x);

/// Inverse of reg_lower_gamma in x: returns x with P(a, x) = p.
/// Bisection on [0, a + 20*sqrt(a) + 40], then Newton polish.
double inv_reg_lower_gamma(double a, double p);

}  // namespace wfisher::special
