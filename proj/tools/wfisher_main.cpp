#include "wfisher/wfisher.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;
using namespace wfisher;

struct OutputOptions {
    bool human = false;
    std::string out_path;  // empty -> stdout
};

std::string fmt(double v, const OutputOptions& opt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), opt.human ? "%.4g" : "%.17g", v);
    return buf;
}

void write_output(const OutputOptions& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path);
    if (!out) {
        throw std::invalid_argument("cannot open output file: " + opt.out_path);
    }
    out << text;
}

std::vector<double> parse_numbers(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (field.empty()) continue;
        out.push_back(std::stod(field));
    }
    if (out.empty()) {
        throw std::invalid_argument("expected a comma-separated list of numbers: " + csv);
    }
    return out;
}

DiscreteDist parse_dist_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "binomial") {
        const auto v = parse_numbers(args);
        if (v.size() != 2) throw std::invalid_argument("binomial spec needs K,theta: " + spec);
        return make_binomial(static_cast<int>(v[0]), v[1]);
    }
    if (head == "nchg") {
        const auto v = parse_numbers(args);
        if (v.size() != 4) throw std::invalid_argument("nchg spec needs m,M,K,omega: " + spec);
        return make_fisher_nchg(static_cast<long>(v[0]), static_cast<long>(v[1]),
                                static_cast<long>(v[2]), v[3]);
    }
    if (head == "csv") {
        std::string warning;
        DiscreteDist d = dist_from_csv_file(args, &warning);
        if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
        return d;
    }
    throw std::invalid_argument("unknown dist spec (binomial:|nchg:|csv:): " + spec);
}

ContinuousTarget parse_target_spec(const std::string& spec) {
    if (spec == "uniform01") return ContinuousTarget::uniform01();
    if (spec == "chisq2") return ContinuousTarget::chisq2();
    if (spec.rfind("gamma:", 0) == 0) {
        const auto v = parse_numbers(spec.substr(6));
        if (v.size() != 2) throw std::invalid_argument("gamma target needs a,b: " + spec);
        return ContinuousTarget::gamma(v[0], v[1]);
    }
    throw std::invalid_argument("unknown target spec (uniform01|chisq2|gamma:a,b): " + spec);
}

std::string meta_line(const std::string& subcommand, const std::string& flags) {
    return "# wfisher " + std::string(kVersion) + " " + subcommand +
           (flags.empty() ? "" : " " + flags) + "\n";
}

// ---------------------------------------------------------------- adjust

int cmd_adjust(const std::string& dist_spec, const OutputOptions& opt) {
    const DiscreteDist d = parse_dist_spec(dist_spec);
    const AdjustmentSet set(d);
    std::ostringstream out;
    out << meta_line("adjust", "dist=" + dist_spec);
    out << "x,mass,cdf,midp,mean_chi2,median_chi2\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << fmt(d.support_at(i), opt) << ',' << fmt(d.mass_at(i), opt) << ','
            << fmt(d.cdf_at(i), opt) << ',' << fmt(set.midp_values()[i], opt) << ','
            << fmt(set.mean_chi2_values()[i], opt) << ',' << fmt(set.median_chi2_values()[i], opt)
            << '\n';
    }
    const auto& m = set.moments();
    out << "# nu=" << fmt(m.var_meanchi, opt) << " m=" << fmt(m.mean_medchi, opt)
        << " v=" << fmt(m.var_medchi, opt) << "\n";
    write_output(opt, out.str());
    return 0;
}

// -------------------------------------------------------------- fit-gamma

int cmd_fit_gamma(const std::string& dist_spec, std::optional<double> mean,
                  std::optional<double> variance, std::size_t n, const OutputOptions& opt) {
    json j;
    j["meta"] = {{"tool", "wfisher"}, {"version", kVersion}, {"subcommand", "fit-gamma"}};
    if (mean && variance) {
        const GammaParams g = optimal_gamma(*mean, *variance);
        j["fit"] = {{"shape", g.shape}, {"scale", g.scale}};
    } else {
        if (dist_spec.empty()) {
            throw std::invalid_argument("fit-gamma needs --dist or both --mean and --var");
        }
        const DiscreteDist d = parse_dist_spec(dist_spec);
        const AdjustMoments m = adjust_moments(d);
        j["moments"] = {{"nu", m.var_meanchi}, {"m", m.mean_medchi}, {"v", m.var_medchi}};
        const GammaParams gs = iid_null(StatisticKind::MeanChi, m, n);
        const GammaParams gst = iid_null(StatisticKind::MedianChi, m, n);
        j["n"] = n;
        j["fits"] = {{{"statistic", "S"}, {"shape", gs.shape}, {"scale", gs.scale}},
                     {{"statistic", "S_tilde"}, {"shape", gst.shape}, {"scale", gst.scale}}};
    }
    write_output(opt, j.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------ test

const char* statistic_label(StatisticKind k) {
    switch (k) {
        case StatisticKind::RawFisher: return "T";
        case StatisticKind::MeanChi: return "S";
        case StatisticKind::MedianChi: return "S_tilde";
    }
    return "?";
}

json report_to_json(const TestReport& r) {
    return json{{"statistic", statistic_label(r.statistic_kind)},
                {"null", r.null_kind == NullKind::ChiSq2n ? "chisq2n" : "gamma"},
                {"shape", r.null_params.shape},
                {"scale", r.null_params.scale},
                {"value", r.value},
                {"pvalue", r.pvalue},
                {"pvalue_lower", r.pvalue_lower},
                {"alpha", r.alpha},
                {"reject", r.reject}};
}

int cmd_test(const std::vector<std::string>& dist_specs, const std::string& obs_csv, double alpha,
             const std::string& null_filter, const OutputOptions& opt) {
    if (dist_specs.empty()) throw std::invalid_argument("test requires at least one --dist");
    const std::vector<double> observed = parse_numbers(obs_csv);
    const std::size_t n = observed.size();

    std::vector<AdjustmentSet> sets;
    sets.reserve(dist_specs.size());
    for (const auto& spec : dist_specs) sets.emplace_back(parse_dist_spec(spec));

    double s_value = 0.0;
    double st_value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const AdjustmentSet& set = sets[j % sets.size()];
        const std::size_t idx = set.input().index_of(observed[j]);
        s_value += set.mean_chi2_values()[idx];
        st_value += set.median_chi2_values()[idx];
    }

    std::vector<AdjustMoments> moments;
    for (const auto& set : sets) moments.push_back(set.moments());
    const GammaParams gamma_s = noniid_null(StatisticKind::MeanChi, moments, n);
    const GammaParams gamma_st = noniid_null(StatisticKind::MedianChi, moments, n);
    const GammaParams chisq{static_cast<double>(n), 2.0};

    json j;
    j["meta"] = {{"tool", "wfisher"}, {"version", kVersion}, {"subcommand", "test"}};
    j["n"] = n;
    j["alpha"] = alpha;
    j["S"] = s_value;
    j["S_tilde"] = st_value;
    double nu_bar = 0.0, m_bar = 0.0, v_bar = 0.0;
    for (const auto& m : moments) {
        nu_bar += m.var_meanchi;
        m_bar += m.mean_medchi;
        v_bar += m.var_medchi;
    }
    const double k = static_cast<double>(moments.size());
    j["moments"] = {{"nu", nu_bar / k}, {"m", m_bar / k}, {"v", v_bar / k}};
    j["gamma_S"] = {{"shape", gamma_s.shape}, {"scale", gamma_s.scale}};
    j["gamma_S_tilde"] = {{"shape", gamma_st.shape}, {"scale", gamma_st.scale}};

    j["reports"] = json::array();
    const bool want_chisq = null_filter == "both" || null_filter == "chisq";
    const bool want_gamma = null_filter == "both" || null_filter == "gamma";
    if (want_chisq) {
        j["reports"].push_back(report_to_json(
            run_test(s_value, chisq, alpha, StatisticKind::MeanChi, NullKind::ChiSq2n)));
        j["reports"].push_back(report_to_json(
            run_test(st_value, chisq, alpha, StatisticKind::MedianChi, NullKind::ChiSq2n)));
    }
    if (want_gamma) {
        j["reports"].push_back(report_to_json(
            run_test(s_value, gamma_s, alpha, StatisticKind::MeanChi, NullKind::OptimalGamma)));
        j["reports"].push_back(report_to_json(run_test(st_value, gamma_st, alpha,
                                                       StatisticKind::MedianChi,
                                                       NullKind::OptimalGamma)));
    }
    write_output(opt, j.dump(2) + "\n");
    return 0;
}

// --------------------------------------------------------------- sim cmds

struct SimFlags {
    std::string scenario;
    std::vector<std::string> settings;
    double theta = -1.0;
    double logomega = 0.0;
    bool logomega_set = false;
    double kappa = 1.0;
    std::size_t n = 1;
    std::size_t reps = 20000;
    std::uint64_t seed = 0;
    std::string alphas = "0.05";
    bool raw = false;
    std::size_t bins = 60;
    int threads = 0;
};

Scenario build_scenario(const SimFlags& f, bool power) {
    if (f.scenario.rfind("binomial:", 0) == 0) {
        const auto v = parse_numbers(f.scenario.substr(9));
        if (v.size() != 2) throw std::invalid_argument("binomial scenario needs K,theta0");
        IIDBinomialScenario s{static_cast<int>(v[0]), v[1], v[1]};
        if (power) {
            if (f.theta < 0.0) throw std::invalid_argument("power with binomial needs --theta");
            s.theta = f.theta;
        }
        return s;
    }
    if (f.scenario.rfind("nchg:", 0) == 0) {
        const auto v = parse_numbers(f.scenario.substr(5));
        if (v.size() != 3) throw std::invalid_argument("nchg scenario needs m,M,K");
        IIDHypergeometricScenario s{static_cast<long>(v[0]), static_cast<long>(v[1]),
                                    static_cast<long>(v[2]), 1.0};
        if (power) {
            if (!f.logomega_set) throw std::invalid_argument("power with nchg needs --logomega");
            s.omega = std::exp(f.logomega);
        }
        return s;
    }
    if (f.scenario == "noniid") {
        NonIIDBinomialScenario s;
        for (const auto& spec : f.settings) {
            const auto v = parse_numbers(spec);
            if (v.size() != 2) throw std::invalid_argument("--setting needs K,theta0");
            s.settings.push_back({static_cast<int>(v[0]), v[1]});
        }
        if (s.settings.empty()) throw std::invalid_argument("noniid scenario needs --setting");
        s.kappa = power ? f.kappa : 1.0;
        return s;
    }
    throw std::invalid_argument("unknown scenario (binomial:K,theta0|nchg:m,M,K|noniid): " +
                                f.scenario);
}

SimConfig build_sim_config(const SimFlags& f, bool power) {
    SimConfig cfg;
    cfg.n_tests = f.n;
    cfg.n_reps = f.reps;
    cfg.seed = f.seed;
    cfg.alpha_levels = parse_numbers(f.alphas);
    cfg.scenario = build_scenario(f, power);
    cfg.include_raw_fisher = f.raw;
    cfg.max_threads = f.threads;
    return cfg;
}

std::string sim_meta(const char* sub, const SimFlags& f) {
    std::ostringstream ss;
    ss << "scenario=" << f.scenario << " n=" << f.n << " reps=" << f.reps << " seed=" << f.seed
       << " alpha=" << f.alphas;
    return meta_line(sub, ss.str());
}

int cmd_type1(const SimFlags& f, const OutputOptions& opt) {
    const SimResult r = simulate_type1(build_sim_config(f, false));
    write_output(opt, sim_meta("type1", f) + r.to_csv());
    return 0;
}

int cmd_power(const SimFlags& f, const OutputOptions& opt) {
    const SimResult r = simulate_power(build_sim_config(f, true));
    write_output(opt, sim_meta("power", f) + r.to_csv());
    return 0;
}

int cmd_hist(const SimFlags& f, const OutputOptions& opt) {
    const HistogramTable t = simulate_histogram(build_sim_config(f, false), f.bins);
    write_output(opt, sim_meta("hist", f) + t.to_csv());
    return 0;
}

// ------------------------------------------------------------ wdist/bounds

DiscreteDist adjusted_dist(const DiscreteDist& input, const std::string& adjust) {
    if (adjust == "none") return input;
    const AdjustmentSet set(input);
    if (adjust == "midp") return set.midp_table().as_dist();
    if (adjust == "meanchi") return set.mean_chi2_table().as_dist();
    if (adjust == "medchi") return set.median_chi2_table().as_dist();
    throw std::invalid_argument("unknown --adjust (none|midp|meanchi|medchi): " + adjust);
}

int cmd_wdist(const std::string& dist_spec, const std::string& target_spec, double p,
              const std::string& adjust, const OutputOptions& opt) {
    const DiscreteDist d = adjusted_dist(parse_dist_spec(dist_spec), adjust);
    const ContinuousTarget y = parse_target_spec(target_spec);
    const double wpow = wasserstein_p_pow(d, y, p);
    const double w = std::pow(wpow, 1.0 / p);
    std::ostringstream out;
    out << meta_line("wdist", "dist=" + dist_spec + " target=" + target_spec +
                                  " adjust=" + adjust + " p=" + fmt(p, opt));
    if (p == 2.0) {
        out << "W2=" << fmt(w, opt) << " W2sq=" << fmt(wpow, opt) << "\n";
    } else {
        out << "Wp=" << fmt(w, opt) << " p=" << fmt(p, opt) << " Wp_pow=" << fmt(wpow, opt)
            << "\n";
    }
    write_output(opt, out.str());
    return 0;
}

int cmd_bounds(const std::string& dist_spec, const std::string& target_spec,
               const std::string& adjust, const OutputOptions& opt) {
    const DiscreteDist input = parse_dist_spec(dist_spec);
    const DiscreteDist d = adjusted_dist(input, adjust);
    const ContinuousTarget y = parse_target_spec(target_spec);
    const DiscreteDist pvals = left_pvalue_dist(input);

    const double w2sq = wasserstein_p_pow(d, y, 2.0);
    double lower = 0.0;
    if (adjust == "meanchi") {
        lower = lower_bound_meanchi(pvals);
    } else if (adjust == "medchi") {
        lower = lower_bound_medianchi(pvals);
    } else {
        lower = lower_bound_general(d, y);
    }
    std::ostringstream out;
    out << meta_line("bounds",
                     "dist=" + dist_spec + " target=" + target_spec + " adjust=" + adjust);
    out << "W2sq=" << fmt(w2sq, opt) << " lower=" << fmt(lower, opt) << "\n";
    out << "lower_general=" << fmt(lower_bound_general(d, y), opt)
        << " lower_meanchi=" << fmt(lower_bound_meanchi(pvals), opt)
        << " lower_medianchi=" << fmt(lower_bound_medianchi(pvals), opt) << "\n";
    write_output(opt, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete p-value combination via Wasserstein-optimal adjustment"};
    app.require_subcommand(1);

    OutputOptions opt;
    app.add_flag("--human", opt.human, "4 significant digits instead of 17");
    app.add_option("--out", opt.out_path, "write output to a file instead of stdout");

    std::string dist_spec, target_spec = "chisq2", adjust = "none", obs_csv, null_filter = "both";
    std::vector<std::string> dist_specs;
    double alpha = 0.05, p_order = 2.0;
    std::optional<double> fit_mean, fit_var;
    std::size_t fit_n = 1;
    SimFlags sim;

    auto* c_adjust = app.add_subcommand("adjust", "print the adjustment table of a statistic");
    c_adjust->add_option("--dist", dist_spec, "binomial:K,theta | nchg:m,M,K,omega | csv:path")
        ->required();

    auto* c_fit = app.add_subcommand("fit-gamma", "moment-matched gamma null parameters");
    c_fit->add_option("--dist", dist_spec, "input statistic distribution");
    c_fit->add_option("--mean", fit_mean, "match this mean directly");
    c_fit->add_option("--var", fit_var, "match this variance directly");
    c_fit->add_option("--n", fit_n, "number of combined tests");

    auto* c_test = app.add_subcommand("test", "combine observed statistics and test");
    c_test->add_option("--dist", dist_specs, "distribution specs, cycled over observations")
        ->required();
    c_test->add_option("--obs", obs_csv, "comma-separated observed support values")->required();
    c_test->add_option("--alpha", alpha, "test level");
    c_test->add_option("--null", null_filter, "both | chisq | gamma");

    auto add_sim_flags = [&sim](CLI::App* c, bool with_alt, bool with_bins) {
        c->add_option("--scenario", sim.scenario, "binomial:K,theta0 | nchg:m,M,K | noniid")
            ->required();
        c->add_option("--setting", sim.settings, "K,theta0 (repeatable, noniid scenario)");
        c->add_option("--n", sim.n, "p-values per combination")->required();
        c->add_option("--reps", sim.reps, "Monte Carlo replicates");
        c->add_option("--seed", sim.seed, "RNG seed");
        c->add_option("--alpha", sim.alphas, "comma-separated levels");
        c->add_option("--threads", sim.threads, "worker cap (default WFISHER_THREADS)");
        c->add_flag("--raw", sim.raw, "also track the unadjusted Fisher statistic");
        if (with_alt) {
            c->add_option("--theta", sim.theta, "alternative theta (binomial)");
            c->add_option("--logomega", sim.logomega, "alternative log odds (nchg)")
                ->each([&sim](const std::string&) { sim.logomega_set = true; });
            c->add_option("--kappa", sim.kappa, "alternative theta multiplier (noniid)");
        }
        if (with_bins) {
            c->add_option("--bins", sim.bins, "histogram bins");
        }
    };
    auto* c_type1 = app.add_subcommand("type1", "empirical type I error rates");
    add_sim_flags(c_type1, false, false);
    auto* c_power = app.add_subcommand("power", "empirical power");
    add_sim_flags(c_power, true, false);
    auto* c_hist = app.add_subcommand("hist", "null histogram with approximating densities");
    add_sim_flags(c_hist, false, true);

    auto* c_wdist = app.add_subcommand("wdist", "Wasserstein distance to a continuous target");
    c_wdist->add_option("--dist", dist_spec, "distribution spec")->required();
    c_wdist->add_option("--target", target_spec, "uniform01 | chisq2 | gamma:a,b");
    c_wdist->add_option("--p", p_order, "Wasserstein order");
    c_wdist->add_option("--adjust", adjust, "none | midp | meanchi | medchi");

    auto* c_bounds = app.add_subcommand("bounds", "distance plus single-cell lower bounds");
    c_bounds->add_option("--dist", dist_spec, "input statistic spec")->required();
    c_bounds->add_option("--target", target_spec, "uniform01 | chisq2 | gamma:a,b");
    c_bounds->add_option("--adjust", adjust, "none | midp | meanchi | medchi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (c_adjust->parsed()) return cmd_adjust(dist_spec, opt);
        if (c_fit->parsed()) return cmd_fit_gamma(dist_spec, fit_mean, fit_var, fit_n, opt);
        if (c_test->parsed()) return cmd_test(dist_specs, obs_csv, alpha, null_filter, opt);
        if (c_type1->parsed()) return cmd_type1(sim, opt);
        if (c_power->parsed()) return cmd_power(sim, opt);
        if (c_hist->parsed()) return cmd_hist(sim, opt);
        if (c_wdist->parsed()) return cmd_wdist(dist_spec, target_spec, p_order, adjust, opt);
        if (c_bounds->parsed()) return cmd_bounds(dist_spec, target_spec, adjust, opt);
    } catch (const wfisher::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
