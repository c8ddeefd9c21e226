#pragma once

#include "wfisher/adjust.hpp"
#include "wfisher/combine.hpp"
#include "wfisher/discrete_dist.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace wfisher {

struct BinomialSetting {
    int K = 1;
    double theta0 = 0.5;
};

/// i.i.d. binomial tests of H0: theta = theta0 against the left-sided
/// alternative; draws use theta.
struct IIDBinomialScenario {
    int K = 1;
    double theta0 = 0.5;
    double theta = 0.5;
};

/// i.i.d. Fisher noncentral hypergeometric tests; the null grid uses
/// omega = 1, draws use omega.
struct IIDHypergeometricScenario {
    long m = 1;
    long M = 1;
    long K = 1;
    double omega = 1.0;
};

/// Independent non-identical binomial tests. Setting j of a combination
/// is settings[j % settings.size()]; draws use theta = kappa * theta0j.
struct NonIIDBinomialScenario {
    std::vector<BinomialSetting> settings;
    double kappa = 1.0;
};

using Scenario =
    std::variant<IIDBinomialScenario, IIDHypergeometricScenario, NonIIDBinomialScenario>;

struct SimConfig {
    std::size_t n_tests = 1;
    std::size_t n_reps = 1;
    std::uint64_t seed = 0;
    std::vector<double> alpha_levels = {0.05};
    Scenario scenario = IIDBinomialScenario{};
    /// First replicate stream index; lets a run be split into seeded
    /// halves whose pooled rates match the single run.
    std::uint64_t rep_offset = 0;
    bool include_raw_fisher = false;
    /// 0 means: take WFISHER_THREADS from the environment, else the
    /// hardware count (capped).
    int max_threads = 0;
};

struct RateEntry {
    StatisticKind statistic;
    NullKind null;
    double alpha;
    double rate;
    double se;  // sqrt(rate (1-rate) / n_reps)
};

struct SimResult {
    std::vector<RateEntry> entries;
    std::size_t n_reps = 0;
    std::size_t n_tests = 0;
    /// Exact-test reference power, present for IIDBinomialScenario.
    bool has_exact_power = false;
    std::vector<std::pair<double, double>> exact_power;  // (alpha, power)

    /// CSV rows `statistic,null,alpha,rate,se`.
    std::string to_csv() const;
    std::string to_json() const;
};

struct HistogramTable {
    std::vector<double> bin_lo, bin_hi;
    std::vector<double> density_sn, density_stilde;
    std::vector<double> gamma_pdf;  // optimal gamma for S_n at midpoints
    std::vector<double> chisq_pdf;  // chi-squared 2n at midpoints
    GammaParams gamma_sn, gamma_stilde;
    double mean_sn = 0.0, var_sn = 0.0, mean_stilde = 0.0, var_stilde = 0.0;

    /// CSV rows `bin_lo,bin_hi,density_Sn,density_Stilde,gamma_pdf,chisq_pdf`.
    std::string to_csv() const;
};

/// Empirical rejection rates under the null scenario parameters for the
/// four rules {S_n, S~_n} x {chi-squared 2n, optimal gamma}.
SimResult simulate_type1(const SimConfig& cfg);

/// Same rules under the alternative parameters; for binomial scenarios
/// the exact-test reference power is attached.
SimResult simulate_power(const SimConfig& cfg);

/// Binned null densities of S_n and S~_n with the two approximating
/// curves evaluated at bin midpoints.
HistogramTable simulate_histogram(const SimConfig& cfg, std::size_t bins);

}  // namespace wfisher
