#include "wfisher/discrete_dist.hpp"

#include "wfisher/special.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wfisher {

namespace {

double log_choose(double n, double k) {
    using special::log_gamma;
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

DiscreteDist from_log_masses(std::vector<double> support, std::vector<double> log_masses) {
    const double mx = *std::max_element(log_masses.begin(), log_masses.end());
    std::vector<double> masses(log_masses.size());
    for (std::size_t i = 0; i < log_masses.size(); ++i) {
        masses[i] = std::exp(log_masses[i] - mx);
    }
    return DiscreteDist(std::move(support), std::move(masses));
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<double> support, std::vector<double> masses) {
    if (support.size() != masses.size() || support.empty()) {
        throw std::invalid_argument("DiscreteDist: support and masses must be non-empty and equal-sized");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (!std::isfinite(support[i])) {
            throw std::invalid_argument("DiscreteDist: non-finite support value");
        }
        if (i > 0 && !(support[i] > support[i - 1])) {
            throw std::invalid_argument("DiscreteDist: support must be strictly increasing");
        }
        if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
            throw std::invalid_argument("DiscreteDist: masses must be finite and non-negative");
        }
        total += masses[i];
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("DiscreteDist: total mass must be positive");
    }

    support_.reserve(support.size());
    masses_.reserve(support.size());
    cdf_.reserve(support.size());
    double acc = 0.0;
    double prev_cdf = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        acc += masses[i] / total;
        double f = (i + 1 == support.size()) ? 1.0 : acc;
        if (f <= prev_cdf) {
            // Zero increment at working precision: the atom carries no
            // probability that any downstream sum can see.
            if (i + 1 == support.size() && !cdf_.empty()) {
                // Keep total mass exactly 1 by extending the last cell.
                cdf_.back() = 1.0;
                masses_.back() = 1.0 - (cdf_.size() >= 2 ? cdf_[cdf_.size() - 2] : 0.0);
            }
            continue;
        }
        support_.push_back(support[i]);
        masses_.push_back(f - prev_cdf);
        cdf_.push_back(f);
        prev_cdf = f;
    }
    if (support_.empty()) {
        throw std::invalid_argument("DiscreteDist: all mass collapsed at construction");
    }
    cdf_.back() = 1.0;
    masses_.back() = 1.0 - (cdf_.size() >= 2 ? cdf_[cdf_.size() - 2] : 0.0);
}

double DiscreteDist::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) s += support_[i] * masses_[i];
    return s;
}

double DiscreteDist::variance() const {
    const double mu = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const double d = support_[i] - mu;
        s += d * d * masses_[i];
    }
    return s;
}

std::size_t DiscreteDist::index_of(double x) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it != support_.end()) {
        const double tol = 1.0e-12 * std::max(1.0, std::fabs(x));
        if (std::fabs(*it - x) <= tol) return static_cast<std::size_t>(it - support_.begin());
        if (it != support_.begin() && std::fabs(*(it - 1) - x) <= tol) {
            return static_cast<std::size_t>(it - support_.begin()) - 1;
        }
    } else if (!support_.empty()) {
        const double tol = 1.0e-12 * std::max(1.0, std::fabs(x));
        if (std::fabs(support_.back() - x) <= tol) return support_.size() - 1;
    }
    throw std::out_of_range("DiscreteDist: value " + std::to_string(x) + " not in support");
}

DiscreteDist make_binomial(int K, double theta) {
    if (K < 1) {
        throw std::domain_error("make_binomial: K must be >= 1");
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::domain_error("make_binomial: theta must be in (0, 1)");
    }
    const double lt = std::log(theta);
    const double l1t = std::log1p(-theta);
    std::vector<double> support(static_cast<std::size_t>(K) + 1);
    std::vector<double> lm(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        support[static_cast<std::size_t>(k)] = k;
        lm[static_cast<std::size_t>(k)] = log_choose(K, k) + k * lt + (K - k) * l1t;
    }
    return from_log_masses(std::move(support), std::move(lm));
}

DiscreteDist make_fisher_nchg(long m, long M, long K, double omega) {
    if (m < 1 || M < 1 || K < 1 || K > m + M) {
        throw std::domain_error("make_fisher_nchg: need m, M, K >= 1 and K <= m + M");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::domain_error("make_fisher_nchg: omega must be a positive finite real");
    }
    const long lo = std::max(0L, K - M);
    const long hi = std::min(K, m);
    const double lw = std::log(omega);
    std::vector<double> support;
    std::vector<double> lm;
    support.reserve(static_cast<std::size_t>(hi - lo + 1));
    lm.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long x = lo; x <= hi; ++x) {
        support.push_back(static_cast<double>(x));
        lm.push_back(log_choose(static_cast<double>(m), static_cast<double>(x)) +
                     log_choose(static_cast<double>(M), static_cast<double>(K - x)) +
                     static_cast<double>(x) * lw);
    }
    return from_log_masses(std::move(support), std::move(lm));
}

DiscreteDist left_pvalue_dist(const DiscreteDist& d) {
    std::vector<double> support(d.cdf().begin(), d.cdf().end());
    std::vector<double> masses(d.masses().begin(), d.masses().end());
    return DiscreteDist(std::move(support), std::move(masses));
}

double observed_left_pvalue(const DiscreteDist& d, double x) {
    return d.cdf_at(d.index_of(x));
}

DiscreteDist dist_from_csv(std::istream& in, std::string* warning) {
    std::string line;
    int col_x = -1;
    int col_mass = -1;
    std::vector<double> support;
    std::vector<double> masses;
    bool header_seen = false;
    std::size_t lineno = 0;

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(field);
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line);
        if (!header_seen) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == "x") col_x = static_cast<int>(i);
                if (fields[i] == "mass") col_mass = static_cast<int>(i);
            }
            if (col_x < 0 || col_mass < 0) {
                throw std::invalid_argument("csv: header with columns 'x' and 'mass' required");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() <= static_cast<std::size_t>(std::max(col_x, col_mass))) {
            throw std::invalid_argument("csv: malformed row at line " + std::to_string(lineno));
        }
        try {
            support.push_back(std::stod(fields[static_cast<std::size_t>(col_x)]));
            masses.push_back(std::stod(fields[static_cast<std::size_t>(col_mass)]));
        } catch (const std::exception&) {
            throw std::invalid_argument("csv: non-numeric value at line " + std::to_string(lineno));
        }
    }
    if (!header_seen || support.empty()) {
        throw std::invalid_argument("csv: no data rows");
    }
    double total = 0.0;
    for (double m : masses) total += m;
    if (std::fabs(total - 1.0) > 1.0e-6 && warning != nullptr) {
        *warning = "csv: masses sum to " + std::to_string(total) + "; normalizing";
    }
    return DiscreteDist(std::move(support), std::move(masses));
}

DiscreteDist dist_from_csv_file(const std::string& path, std::string* warning) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("csv: cannot open file: " + path);
    }
    return dist_from_csv(in, warning);
}

}  // namespace wfisher
