#include "wfisher/sim.hpp"

#include "wfisher/counter_rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wfisher {

namespace {

constexpr std::size_t kBlockSize = 8192;

int resolve_threads(int requested) {
    if (requested <= 0) {
        if (const char* env = std::getenv("WFISHER_THREADS")) {
            requested = std::atoi(env);
        }
    }
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (requested <= 0) requested = std::min(hw > 0 ? hw : 1, 8);
    return std::max(1, requested);
}

const char* statistic_name(StatisticKind k) {
    switch (k) {
        case StatisticKind::RawFisher: return "T";
        case StatisticKind::MeanChi: return "S";
        case StatisticKind::MedianChi: return "S_tilde";
    }
    return "?";
}

const char* null_name(NullKind k) {
    return k == NullKind::ChiSq2n ? "chisq2n" : "gamma";
}

// Per-test machinery shared by all replicates: null adjustment sets,
// sampling distributions, and the draw-index -> null-cell map.
struct Engine {
    std::vector<AdjustmentSet> sets;       // distinct null settings
    std::vector<DiscreteDist> draw_dists;  // aligned with sets
    std::vector<std::vector<std::size_t>> draw_to_cell;  // per distinct setting
    std::vector<std::size_t> per_test;     // test j -> distinct setting index
    std::vector<AdjustMoments> distinct_moments;
    bool identical = true;
};

std::vector<std::size_t> map_draw_support(const DiscreteDist& draw, const DiscreteDist& null_dist) {
    std::vector<std::size_t> map(draw.size());
    const auto sup = null_dist.support();
    for (std::size_t i = 0; i < draw.size(); ++i) {
        const double x = draw.support_at(i);
        // Last null support point <= x owns the cell; values below the
        // first point belong to the first cell.
        auto it = std::upper_bound(sup.begin(), sup.end(), x);
        map[i] = it == sup.begin() ? 0 : static_cast<std::size_t>(it - sup.begin() - 1);
    }
    return map;
}

Engine build_engine(const SimConfig& cfg, bool use_alternative) {
    Engine e;
    if (cfg.n_tests == 0 || cfg.n_reps == 0) {
        throw std::domain_error("sim: n_tests and n_reps must be >= 1");
    }
    for (double a : cfg.alpha_levels) {
        if (!(a > 0.0 && a < 1.0)) {
            throw std::domain_error("sim: alpha levels must lie in (0, 1)");
        }
    }
    if (const auto* b = std::get_if<IIDBinomialScenario>(&cfg.scenario)) {
        e.sets.emplace_back(make_binomial(b->K, b->theta0));
        e.draw_dists.push_back(use_alternative ? make_binomial(b->K, b->theta)
                                               : make_binomial(b->K, b->theta0));
        e.per_test.assign(cfg.n_tests, 0);
    } else if (const auto* h = std::get_if<IIDHypergeometricScenario>(&cfg.scenario)) {
        e.sets.emplace_back(make_fisher_nchg(h->m, h->M, h->K, 1.0));
        e.draw_dists.push_back(use_alternative ? make_fisher_nchg(h->m, h->M, h->K, h->omega)
                                               : make_fisher_nchg(h->m, h->M, h->K, 1.0));
        e.per_test.assign(cfg.n_tests, 0);
    } else {
        const auto& nb = std::get<NonIIDBinomialScenario>(cfg.scenario);
        if (nb.settings.empty()) {
            throw std::domain_error("sim: non-iid scenario needs at least one setting");
        }
        e.identical = nb.settings.size() == 1;
        for (const auto& s : nb.settings) {
            e.sets.emplace_back(make_binomial(s.K, s.theta0));
            const double theta = use_alternative ? nb.kappa * s.theta0 : s.theta0;
            e.draw_dists.push_back(make_binomial(s.K, theta));
        }
        e.per_test.resize(cfg.n_tests);
        for (std::size_t j = 0; j < cfg.n_tests; ++j) e.per_test[j] = j % nb.settings.size();
    }
    e.draw_to_cell.reserve(e.sets.size());
    for (std::size_t s = 0; s < e.sets.size(); ++s) {
        e.draw_to_cell.push_back(map_draw_support(e.draw_dists[s], e.sets[s].input()));
        e.distinct_moments.push_back(e.sets[s].moments());
    }
    return e;
}

void require_null_parameters(const SimConfig& cfg) {
    if (const auto* b = std::get_if<IIDBinomialScenario>(&cfg.scenario)) {
        if (b->theta != b->theta0) {
            throw std::domain_error("simulate_type1: binomial scenario must use theta = theta0");
        }
    } else if (const auto* h = std::get_if<IIDHypergeometricScenario>(&cfg.scenario)) {
        if (h->omega != 1.0) {
            throw std::domain_error("simulate_type1: hypergeometric scenario must use omega = 1");
        }
    } else if (const auto* nb = std::get_if<NonIIDBinomialScenario>(&cfg.scenario)) {
        if (nb->kappa != 1.0) {
            throw std::domain_error("simulate_type1: non-iid scenario must use kappa = 1");
        }
    }
}

std::size_t sample_index(const DiscreteDist& d, double u) {
    const auto cdf = d.cdf();
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

// One replicate: S_n, S~_n, and optionally T_n.
struct Sums {
    double s = 0.0;
    double st = 0.0;
    double t = 0.0;
};

Sums run_replicate(const Engine& e, const SimConfig& cfg, std::uint64_t rep, bool want_raw) {
    CounterRng rng(cfg.seed, rep);
    Sums out;
    for (std::size_t j = 0; j < cfg.n_tests; ++j) {
        const std::size_t s = e.per_test[j];
        const std::size_t draw = sample_index(e.draw_dists[s], rng.next_unit());
        const std::size_t cell = e.draw_to_cell[s][draw];
        out.s += e.sets[s].mean_chi2_values()[cell];
        out.st += e.sets[s].median_chi2_values()[cell];
        if (want_raw) {
            out.t += -2.0 * std::log(e.sets[s].input().cdf_at(cell));
        }
    }
    return out;
}

struct Rule {
    StatisticKind statistic;
    NullKind null;
    double alpha;
    double threshold;
};

SimResult run_rates(const SimConfig& cfg, bool use_alternative) {
    const Engine e = build_engine(cfg, use_alternative);
    const std::size_t n = cfg.n_tests;

    const GammaParams chisq{static_cast<double>(n), 2.0};
    const GammaParams gamma_s = e.identical && e.sets.size() == 1
                                    ? iid_null(StatisticKind::MeanChi, e.distinct_moments[0], n)
                                    : noniid_null(StatisticKind::MeanChi, e.distinct_moments, n);
    const GammaParams gamma_st = e.identical && e.sets.size() == 1
                                     ? iid_null(StatisticKind::MedianChi, e.distinct_moments[0], n)
                                     : noniid_null(StatisticKind::MedianChi, e.distinct_moments, n);

    std::vector<Rule> rules;
    for (double a : cfg.alpha_levels) {
        const double qc = gamma_quantile(1.0 - a, chisq);
        rules.push_back({StatisticKind::MeanChi, NullKind::ChiSq2n, a, qc});
        rules.push_back({StatisticKind::MedianChi, NullKind::ChiSq2n, a, qc});
        rules.push_back({StatisticKind::MeanChi, NullKind::OptimalGamma, a,
                         gamma_quantile(1.0 - a, gamma_s)});
        rules.push_back({StatisticKind::MedianChi, NullKind::OptimalGamma, a,
                         gamma_quantile(1.0 - a, gamma_st)});
        if (cfg.include_raw_fisher) {
            rules.push_back({StatisticKind::RawFisher, NullKind::ChiSq2n, a, qc});
        }
    }

    const std::size_t n_blocks = (cfg.n_reps + kBlockSize - 1) / kBlockSize;
    std::vector<std::vector<std::uint64_t>> block_counts(n_blocks,
                                                         std::vector<std::uint64_t>(rules.size()));

    auto run_block = [&](std::size_t block) {
        const std::size_t lo = block * kBlockSize;
        const std::size_t hi = std::min(cfg.n_reps, lo + kBlockSize);
        auto& counts = block_counts[block];
        for (std::size_t r = lo; r < hi; ++r) {
            const Sums sums = run_replicate(e, cfg, cfg.rep_offset + r, cfg.include_raw_fisher);
            for (std::size_t k = 0; k < rules.size(); ++k) {
                const double value = rules[k].statistic == StatisticKind::MeanChi ? sums.s
                                     : rules[k].statistic == StatisticKind::MedianChi ? sums.st
                                                                                      : sums.t;
                if (value >= rules[k].threshold) ++counts[k];
            }
        }
    };

    const int threads = resolve_threads(cfg.max_threads);
    if (threads <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::future<void>> futures;
        const std::size_t per = (n_blocks + threads - 1) / static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            const std::size_t lo = static_cast<std::size_t>(t) * per;
            const std::size_t hi = std::min(n_blocks, lo + per);
            if (lo >= hi) break;
            futures.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t b = lo; b < hi; ++b) run_block(b);
            }));
        }
        for (auto& f : futures) f.get();
    }

    SimResult result;
    result.n_reps = cfg.n_reps;
    result.n_tests = cfg.n_tests;
    for (std::size_t k = 0; k < rules.size(); ++k) {
        std::uint64_t total = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) total += block_counts[b][k];
        const double rate = static_cast<double>(total) / static_cast<double>(cfg.n_reps);
        const double se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(cfg.n_reps));
        result.entries.push_back({rules[k].statistic, rules[k].null, rules[k].alpha, rate, se});
    }
    return result;
}

}  // namespace

SimResult simulate_type1(const SimConfig& cfg) {
    require_null_parameters(cfg);
    return run_rates(cfg, false);
}

SimResult simulate_power(const SimConfig& cfg) {
    SimResult result = run_rates(cfg, true);
    if (const auto* b = std::get_if<IIDBinomialScenario>(&cfg.scenario)) {
        result.has_exact_power = true;
        for (double a : cfg.alpha_levels) {
            result.exact_power.emplace_back(
                a, exact_binomial_power(cfg.n_tests, b->K, b->theta0, b->theta, a));
        }
    }
    return result;
}

HistogramTable simulate_histogram(const SimConfig& cfg, std::size_t bins) {
    if (bins < 10) {
        throw std::domain_error("simulate_histogram: bins must be >= 10");
    }
    require_null_parameters(cfg);
    const Engine e = build_engine(cfg, false);
    const std::size_t n = cfg.n_tests;

    std::vector<double> s_values(cfg.n_reps);
    std::vector<double> st_values(cfg.n_reps);
    const std::size_t n_blocks = (cfg.n_reps + kBlockSize - 1) / kBlockSize;
    auto run_block = [&](std::size_t block) {
        const std::size_t lo = block * kBlockSize;
        const std::size_t hi = std::min(cfg.n_reps, lo + kBlockSize);
        for (std::size_t r = lo; r < hi; ++r) {
            const Sums sums = run_replicate(e, cfg, cfg.rep_offset + r, false);
            s_values[r] = sums.s;
            st_values[r] = sums.st;
        }
    };
    const int threads = resolve_threads(cfg.max_threads);
    if (threads <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::future<void>> futures;
        const std::size_t per = (n_blocks + threads - 1) / static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            const std::size_t lo = static_cast<std::size_t>(t) * per;
            const std::size_t hi = std::min(n_blocks, lo + per);
            if (lo >= hi) break;
            futures.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t b = lo; b < hi; ++b) run_block(b);
            }));
        }
        for (auto& f : futures) f.get();
    }

    HistogramTable table;
    table.gamma_sn = e.identical && e.sets.size() == 1
                         ? iid_null(StatisticKind::MeanChi, e.distinct_moments[0], n)
                         : noniid_null(StatisticKind::MeanChi, e.distinct_moments, n);
    table.gamma_stilde = e.identical && e.sets.size() == 1
                             ? iid_null(StatisticKind::MedianChi, e.distinct_moments[0], n)
                             : noniid_null(StatisticKind::MedianChi, e.distinct_moments, n);

    double lo = s_values[0], hi = s_values[0];
    for (double v : s_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : st_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<std::uint64_t> count_s(bins), count_st(bins);
    auto bin_of = [&](double v) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        return std::min(b, bins - 1);
    };
    double sum_s = 0.0, sum2_s = 0.0, sum_st = 0.0, sum2_st = 0.0;
    for (double v : s_values) {
        ++count_s[bin_of(v)];
        sum_s += v;
        sum2_s += v * v;
    }
    for (double v : st_values) {
        ++count_st[bin_of(v)];
        sum_st += v;
        sum2_st += v * v;
    }
    const double reps = static_cast<double>(cfg.n_reps);
    table.mean_sn = sum_s / reps;
    table.var_sn = sum2_s / reps - table.mean_sn * table.mean_sn;
    table.mean_stilde = sum_st / reps;
    table.var_stilde = sum2_st / reps - table.mean_stilde * table.mean_stilde;

    const GammaParams chisq{static_cast<double>(n), 2.0};
    for (std::size_t b = 0; b < bins; ++b) {
        const double a = lo + width * static_cast<double>(b);
        const double mid = a + 0.5 * width;
        table.bin_lo.push_back(a);
        table.bin_hi.push_back(a + width);
        table.density_sn.push_back(static_cast<double>(count_s[b]) / (reps * width));
        table.density_stilde.push_back(static_cast<double>(count_st[b]) / (reps * width));
        table.gamma_pdf.push_back(gamma_pdf(mid, table.gamma_sn));
        table.chisq_pdf.push_back(gamma_pdf(mid, chisq));
    }
    return table;
}

std::string SimResult::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "statistic,null,alpha,rate,se\n";
    for (const auto& r : entries) {
        out << statistic_name(r.statistic) << ',' << null_name(r.null) << ',' << r.alpha << ','
            << r.rate << ',' << r.se << '\n';
    }
    if (has_exact_power) {
        for (const auto& [alpha, power] : exact_power) {
            out << "exact,exact," << alpha << ',' << power << ",0\n";
        }
    }
    return out.str();
}

std::string SimResult::to_json() const {
    nlohmann::json j;
    j["n_reps"] = n_reps;
    j["n_tests"] = n_tests;
    j["rates"] = nlohmann::json::array();
    for (const auto& r : entries) {
        j["rates"].push_back({{"statistic", statistic_name(r.statistic)},
                              {"null", null_name(r.null)},
                              {"alpha", r.alpha},
                              {"rate", r.rate},
                              {"se", r.se}});
    }
    if (has_exact_power) {
        j["exact_power"] = nlohmann::json::array();
        for (const auto& [alpha, power] : exact_power) {
            j["exact_power"].push_back({{"alpha", alpha}, {"power", power}});
        }
    }
    return j.dump(2);
}

std::string HistogramTable::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "bin_lo,bin_hi,density_Sn,density_Stilde,gamma_pdf,chisq_pdf\n";
    for (std::size_t i = 0; i < bin_lo.size(); ++i) {
        out << bin_lo[i] << ',' << bin_hi[i] << ',' << density_sn[i] << ',' << density_stilde[i]
            << ',' << gamma_pdf[i] << ',' << chisq_pdf[i] << '\n';
    }
    return out.str();
}

}  // namespace wfisher
