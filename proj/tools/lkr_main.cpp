// Command-line front end: simulate | theory | fit | compare | renewal-tables.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "lkr/harness.hpp"
#include "lkr/io.hpp"
#include "lkr/renewal.hpp"
#include "lkr/theory.hpp"

using nlohmann::json;

namespace {

struct CommonFlags {
    std::optional<std::string> config_path;
    std::map<std::string, std::string> overrides;
};

void add_config_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    static const std::vector<std::string> keys = {
        "dist", "alpha", "tau0", "kappa", "W", "T", "n", "seed", "K",
        "hbar", "M", "guard_fraction", "leakage_threshold", "workers",
        "samples_per_decade"};
    for (const auto& key : keys) {
        cmd->add_option_function<std::string>(
            "--" + key,
            [&flags, key](const std::string& v) { flags.overrides[key] = v; },
            "config key `" + key + "` (overrides file)");
    }
}

lkr::ExperimentConfig build_config(const CommonFlags& flags) {
    json j = json::object();
    if (flags.config_path) {
        std::ifstream in(*flags.config_path);
        if (!in)
            throw std::runtime_error("cannot open config file: " +
                                     *flags.config_path);
        j = json::parse(in);
    }
    for (const auto& [key, value] : flags.overrides) {
        // Integers stay integers; everything else is passed as a string so
        // fraction forms like 1/300 survive.
        if (key == "T" || key == "n" || key == "seed" || key == "M" ||
            key == "tau0" || key == "workers" || key == "samples_per_decade")
            j[key] = std::stoll(value);
        else if (key == "dist")
            j[key] = value;
        else
            j[key] = value;
    }
    return lkr::parse_config(j.dump());
}

lkr::WaitingTimeDistribution dist_from_name(const std::string& name,
                                            double alpha, long tau0) {
    if (name == "yule_simon") return lkr::WaitingTimeDistribution::yule_simon(alpha);
    if (name == "deterministic")
        return lkr::WaitingTimeDistribution::deterministic(tau0);
    if (name == "geometric") return lkr::WaitingTimeDistribution::geometric(alpha);
    throw std::runtime_error("unknown dist: " + name);
}

int run_simulate(const CommonFlags& flags, const std::string& out) {
    const auto cfg = build_config(flags);
    const auto result = lkr::run_ensemble(cfg);
    lkr::emit_series(lkr::series_from_ensemble(result), out,
                     lkr::config_hash(cfg), cfg.base_seed);
    json info;
    info["out"] = out;
    info["config_hash"] = lkr::config_hash(cfg);
    info["n_included"] = result.n_included;
    info["n_excluded"] = result.n_excluded;
    std::cout << info.dump() << "\n";
    return 0;
}

int run_theory(const std::string& dist_name, double alpha, long tau0,
               double t_c, const std::string& kappa_text, long T,
               double dstar, double hbar, const std::string& form_name,
               const std::string& coeff_name, const std::string& out,
               const std::string& ml_out) {
    const auto dist = dist_from_name(dist_name, alpha, tau0);
    double kappa = kappa_text.empty()
                       ? 0.0
                       : lkr::parse_number_or_fraction(kappa_text);
    if (t_c <= 0.0) {
        if (kappa <= 0.0)
            throw std::runtime_error("theory: need --tc or positive --kappa");
        t_c = 2.0 * hbar * hbar / kappa;
    } else if (kappa <= 0.0) {
        kappa = 2.0 * hbar * hbar / t_c;
    }
    const auto model = lkr::LocalizationModel::from_dstar(dstar, hbar);
    const auto tables = lkr::make_renewal_tables(dist, t_c, T);
    const auto form = form_name == "integral" ? lkr::VarianceForm::integral
                                              : lkr::VarianceForm::double_sum;
    const auto coeff = coeff_name == "inverse_tc"
                           ? lkr::PairCoefficient::inverse_tc
                           : lkr::PairCoefficient::one_minus_q;
    const auto pred =
        lkr::predict_variance_full(model, tables, kappa, T, form, coeff);
    lkr::ExperimentConfig pseudo;   // digest input for the manifest
    pseudo.lattice.hbar = hbar;
    pseudo.dist = dist;
    pseudo.kappa = kappa;
    pseudo.T = T;
    pseudo.sample_times = {0, T};
    lkr::emit_series(lkr::series_from_prediction(pred), out,
                     lkr::config_hash(pseudo), 0);
    if (!ml_out.empty()) {
        lkr::Series s;
        s.columns = {"t", "D_exact", "D_ml"};
        s.values.resize(2);
        for (long t = 0; t <= T; ++t) {
            s.t.push_back(t);
            s.values[0].push_back(tables.D1[size_t(t)]);
            s.values[1].push_back(lkr::ml_decoherence(dist.alpha, tables, t));
        }
        lkr::emit_series(s, ml_out, lkr::config_hash(pseudo), 0);
    }
    json info;
    info["out"] = out;
    info["t_c"] = t_c;
    info["form"] = form_name;
    info["pair_coefficient"] = coeff_name;
    std::cout << info.dump() << "\n";
    return 0;
}

int run_fit(const std::string& model, const std::string& in_path, double hbar,
            double t_min, double t_max) {
    const auto series = lkr::read_series_csv(in_path);
    if (series.values.empty()) throw std::runtime_error("fit: no value column");
    const auto& v = series.values[0];
    json info;
    if (model == "eq3") {
        const auto fit = lkr::fit_dstar(series.t, v, hbar);
        info["model"] = "eq3";
        info["D_star"] = fit.D_star;
        info["t_star"] = fit.t_star;
        info["residual"] = fit.residual;
    } else if (model == "power") {
        if (t_max <= 0.0) t_max = double(series.t.back());
        if (t_min <= 0.0) t_min = t_max / 10.0;
        const auto fit = lkr::fit_exponent(series.t, v, t_min, t_max);
        info["model"] = "power";
        info["alpha"] = fit.alpha;
        info["ci_halfwidth"] = fit.ci_halfwidth;
        info["log_prefactor"] = fit.log_prefactor;
    } else {
        throw std::runtime_error("fit: unknown model " + model);
    }
    std::cout << info.dump() << "\n";
    return 0;
}

int run_compare(const std::string& sim_path, const std::string& theory_path,
                double t_min, double t_max, double tol) {
    const auto sim = lkr::read_series_csv(sim_path);
    const auto th = lkr::read_series_csv(theory_path);
    std::map<long, double> lookup;
    for (size_t r = 0; r < th.t.size(); ++r) lookup[th.t[r]] = th.values[0][r];
    std::vector<double> theory_vals;
    for (long t : sim.t) {
        const auto it = lookup.find(t);
        if (it == lookup.end())
            throw std::runtime_error("compare: t=" + std::to_string(t) +
                                     " missing from theory grid");
        theory_vals.push_back(it->second);
    }
    if (t_max <= 0.0) t_max = double(sim.t.back());
    const auto rep = lkr::compare_theory_sim(sim.t, sim.values[0], theory_vals,
                                             t_min, t_max, tol);
    json info;
    info["n_points"] = rep.times.size();
    info["max_rel_dev"] = rep.max_dev;
    info["median_rel_dev"] = rep.median_dev;
    info["tolerance"] = rep.tolerance;
    info["pass"] = rep.pass;
    std::cout << info.dump() << "\n";
    return rep.pass ? 0 : 1;
}

int run_tables(const std::string& dist_name, double alpha, long tau0,
               double t_c, long T, const std::string& out) {
    const auto dist = dist_from_name(dist_name, alpha, tau0);
    const auto tables = lkr::make_renewal_tables(dist, t_c, T);
    lkr::ExperimentConfig pseudo;
    pseudo.lattice.hbar = lkr::default_hbar();
    pseudo.dist = dist;
    pseudo.T = T;
    pseudo.sample_times = {0, T};
    lkr::emit_series(lkr::series_from_tables(tables), out,
                     lkr::config_hash(pseudo), 0);
    std::cout << json{{"out", out}}.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Levy kicked rotator: simulation and theory pipeline"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    std::string sim_out = "ensemble.csv";
    auto* simulate = app.add_subcommand("simulate", "run a noise ensemble");
    add_config_flags(simulate, sim_flags);
    simulate->add_option("--out", sim_out, "output CSV");

    std::string th_dist = "yule_simon", th_form = "double_sum",
                th_coeff = "one_minus_q", th_kappa, th_out = "prediction.csv",
                th_ml_out;
    double th_alpha = 0.5, th_tc = 0.0, th_dstar = 45.28,
           th_hbar = lkr::default_hbar();
    long th_tau0 = 1, th_T = 10000;
    auto* theory = app.add_subcommand("theory", "evaluate the variance prediction");
    theory->add_option("--dist", th_dist, "deterministic|yule_simon|geometric");
    theory->add_option("--alpha", th_alpha, "tail exponent / success prob");
    theory->add_option("--tau0", th_tau0, "deterministic period");
    theory->add_option("--tc", th_tc, "coherence time (else from kappa)");
    theory->add_option("--kappa", th_kappa, "noise strength (number or a/b)");
    theory->add_option("--T", th_T, "horizon");
    theory->add_option("--dstar", th_dstar, "D*");
    theory->add_option("--hbar", th_hbar, "effective Planck constant");
    theory->add_option("--form", th_form, "double_sum|integral");
    theory->add_option("--coeff", th_coeff, "one_minus_q|inverse_tc");
    theory->add_option("--out", th_out, "output CSV");
    theory->add_option("--ml-out", th_ml_out, "decoherence curves CSV");

    std::string fit_model = "eq3", fit_in;
    double fit_hbar = lkr::default_hbar(), fit_tmin = 0.0, fit_tmax = 0.0;
    auto* fit = app.add_subcommand("fit", "fit D* or a power-law exponent");
    fit->add_option("--model", fit_model, "eq3|power");
    fit->add_option("--in", fit_in, "input CSV")->required();
    fit->add_option("--hbar", fit_hbar, "effective Planck constant");
    fit->add_option("--tmin", fit_tmin, "window start");
    fit->add_option("--tmax", fit_tmax, "window end");

    std::string cmp_sim, cmp_theory;
    double cmp_tmin = 1.0, cmp_tmax = 0.0, cmp_tol = 0.15;
    auto* compare = app.add_subcommand("compare", "simulation vs theory report");
    compare->add_option("--sim", cmp_sim, "simulation CSV")->required();
    compare->add_option("--theory", cmp_theory, "theory CSV")->required();
    compare->add_option("--tmin", cmp_tmin, "window start");
    compare->add_option("--tmax", cmp_tmax, "window end");
    compare->add_option("--tol", cmp_tol, "median deviation tolerance");

    std::string tab_dist = "yule_simon", tab_out = "tables.csv";
    double tab_alpha = 0.5, tab_tc = 41.0;
    long tab_tau0 = 1, tab_T = 10000;
    auto* tables = app.add_subcommand("renewal-tables", "dump f, Nbar, D1");
    tables->add_option("--dist", tab_dist, "deterministic|yule_simon|geometric");
    tables->add_option("--alpha", tab_alpha, "tail exponent / success prob");
    tables->add_option("--tau0", tab_tau0, "deterministic period");
    tables->add_option("--tc", tab_tc, "coherence time");
    tables->add_option("--T", tab_T, "horizon");
    tables->add_option("--out", tab_out, "output CSV");

    CLI11_PARSE(app, argc, argv);
    try {
        if (simulate->parsed()) return run_simulate(sim_flags, sim_out);
        if (theory->parsed())
            return run_theory(th_dist, th_alpha, th_tau0, th_tc, th_kappa, th_T,
                              th_dstar, th_hbar, th_form, th_coeff, th_out,
                              th_ml_out);
        if (fit->parsed())
            return run_fit(fit_model, fit_in, fit_hbar, fit_tmin, fit_tmax);
        if (compare->parsed())
            return run_compare(cmp_sim, cmp_theory, cmp_tmin, cmp_tmax, cmp_tol);
        if (tables->parsed())
            return run_tables(tab_dist, tab_alpha, tab_tau0, tab_tc, tab_T,
                              tab_out);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 1;
}
