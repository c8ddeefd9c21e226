#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wfisher {

/// Finite discrete distribution with strictly increasing support.
/// Stores masses and the cumulative grid side by side so that
/// (F_{i-1}, F_i) lookups are O(1) and bit-stable across modules.
///
/// Construction normalizes the masses, accumulates the CDF, forces the
/// final CDF value to 1, and drops atoms whose CDF increment collapses
/// to zero in double precision (they carry no probability at working
/// precision). Stored masses are exact differences of the stored CDF.
class DiscreteDist {
  public:
    DiscreteDist(std::vector<double> support, std::vector<double> masses);

    std::size_t size() const { return support_.size(); }
    std::span<const double> support() const { return support_; }
    std::span<const double> masses() const { return masses_; }
    std::span<const double> cdf() const { return cdf_; }

    double support_at(std::size_t i) const { return support_[i]; }
    double mass_at(std::size_t i) const { return masses_[i]; }
    double cdf_at(std::size_t i) const { return cdf_[i]; }
    /// F_{i-1}, with F_{-1} := 0.
    double cdf_before(std::size_t i) const { return i == 0 ? 0.0 : cdf_[i - 1]; }

    double mean() const;
    double variance() const;

    /// Index of x in the support; throws std::out_of_range if absent.
    std::size_t index_of(double x) const;

  private:
    std::vector<double> support_;
    std::vector<double> masses_;
    std::vector<double> cdf_;
};

/// Binomial(K, theta) on {0, ..., K}; masses computed in log space.
DiscreteDist make_binomial(int K, double theta);

/// Fisher's noncentral hypergeometric: masses proportional to
/// C(m, x) * C(M, K - x) * omega^x on {max(0, K-M), ..., min(K, m)},
/// accumulated in log space and normalized.
DiscreteDist make_fisher_nchg(long m, long M, long K, double omega);

/// Distribution of the left-tailed p-value P = F_i: support {F_i},
/// mass at F_i equal to p_i.
DiscreteDist left_pvalue_dist(const DiscreteDist& d);

/// F_i for the observed support point x.
double observed_left_pvalue(const DiscreteDist& d, double x);

/// Reads a two-column CSV `x,mass` (header required, extra columns
/// ignored, `#` lines skipped). If |sum(mass) - 1| > 1e-6 a warning is
/// recorded in *warning (when non-null) and the masses are normalized.
DiscreteDist dist_from_csv(std::istream& in, std::string* warning = nullptr);
DiscreteDist dist_from_csv_file(const std::string& path, std::string* warning = nullptr);

}  // namespace wfisher
