// Acceptance suite: eight end-to-end criteria, one PASS/FAIL line each.
// Heavy ensembles run at M = 32768; see README for the sizing measurements.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lkr/harness.hpp"
#include "lkr/io.hpp"
#include "lkr/renewal.hpp"
#include "lkr/rotor.hpp"
#include "lkr/theory.hpp"

using namespace lkr;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", idx,
                name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

std::vector<long> sample_grid(long T, std::initializer_list<long> extra) {
    auto ts = log_spaced_times(T);
    ts.insert(ts.end(), extra);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

ExperimentConfig noisy_config(const WaitingTimeDistribution& dist,
                              double kappa, long T, int n,
                              std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.lattice = {32768, default_hbar(), 7.5};
    cfg.dist = dist;
    cfg.kappa = kappa;
    cfg.T = T;
    cfg.n_realizations = n;
    cfg.base_seed = seed;
    cfg.sample_times = sample_grid(T, {T / 4, T / 2, T});
    cfg.n_workers = 0;
    return cfg;
}

double value_at(const EnsembleResult& r, long t) {
    for (size_t k = 0; k < r.sample_times.size(); ++k)
        if (r.sample_times[k] == t) return r.mean_var[k];
    throw std::runtime_error("sample time missing");
}

double stderr_at(const EnsembleResult& r, long t) {
    for (size_t k = 0; k < r.sample_times.size(); ++k)
        if (r.sample_times[k] == t) return r.std_err[k];
    throw std::runtime_error("sample time missing");
}

// OLS log-log slope of an arbitrary (t, v) selection.
double loglog_slope(const std::vector<long>& t, const std::vector<double>& v,
                    double lo, double hi) {
    return fit_exponent(t, v, lo, hi).alpha;
}

// ---------------------------------------------------------------------------

void criterion1() {
    // split step vs the dense Floquet oracle, 100 random states at M = 32
    const LatticeParams lat{32, default_hbar(), 7.5};
    const auto U = dense_floquet_oracle(lat, 7.5);
    SplitStepPropagator prop(lat);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        QuantumState st;
        st.amps.resize(32);
        for (auto& a : st.amps) a = cplx{g(rng), g(rng)};
        const double nrm = st.norm();
        for (auto& a : st.amps) a /= nrm;
        const auto expect = apply_dense(U, st.amps);
        prop.step(st, 7.5);
        for (int j = 0; j < 32; ++j)
            worst = std::max(worst, std::abs(st.amps[size_t(j)] - expect[size_t(j)]));
    }

    // norm drift over 1e4 noiseless steps at M = 4096
    const LatticeParams big{4096, default_hbar(), 7.5};
    SplitStepPropagator bp(big);
    auto st = init_state(big);
    for (int t = 0; t < 10000; ++t) bp.step(st, 7.5);
    const double drift = std::abs(st.norm() - 1.0);

    report(1, "unitarity/oracle", worst < 1e-11 && drift < 1e-10,
           fmt("oracle max dev %.2e (<1e-11), norm drift %.2e (<1e-10)", worst,
               drift));
}

LocalizationModel criterion2() {
    ExperimentConfig cfg;
    cfg.lattice = {16384, default_hbar(), 7.5};
    cfg.dist = WaitingTimeDistribution::deterministic(1);
    cfg.kappa = 0.0;
    cfg.T = 5000;
    cfg.n_realizations = 1;
    cfg.base_seed = 20260823;
    cfg.sample_times = log_spaced_times(cfg.T);
    cfg.n_workers = 1;
    const auto res = run_ensemble(cfg);
    const auto fit = fit_dstar(res.sample_times, res.mean_var,
                               cfg.lattice.hbar);
    const double plateau = fit.D_star * fit.t_star;
    const bool ok = fit.D_star >= 30.0 && fit.D_star <= 60.0 &&
                    std::abs(plateau - 3.0e4) / 3.0e4 <= 0.25;
    report(2, "dynamical localization", ok,
           fmt("D* = %.2f (in [30,60], paper 45.28), plateau %.3g "
               "(3.0e4 within 25%%)",
               fit.D_star, plateau));
    return LocalizationModel{fit.D_star, fit.t_star};
}

void criterion3() {
    const double t_c = 41.0;
    const long T = 4096;
    const std::vector<long> probes = {16, 256, 4096};
    const long n_mc = 100000;
    struct Case {
        const char* name;
        WaitingTimeDistribution dist;
    };
    const std::vector<Case> cases = {
        {"deterministic(1)", WaitingTimeDistribution::deterministic(1)},
        {"geometric(0.25)", WaitingTimeDistribution::geometric(0.25)},
        {"yule_simon(0.5)", WaitingTimeDistribution::yule_simon(0.5)},
        {"yule_simon(1.5)", WaitingTimeDistribution::yule_simon(1.5)}};
    bool ok = true;
    std::string worst = "all recursions within 3 s.e.";
    double worst_z = 0.0;
    for (const auto& c : cases) {
        const auto tab = make_renewal_tables(c.dist, t_c, T);
        const auto mc =
            mc_renewal_oracle(c.dist, t_c, T, probes, n_mc, 777);
        for (size_t k = 0; k < probes.size(); ++k) {
            const long t = probes[k];
            const double fr = tab.f[size_t(t)];
            const double fm = mc.f_mean[size_t(t)];
            const double fse =
                std::sqrt(std::max(fm * (1.0 - fm), 1e-12) / double(n_mc));
            const double zf = std::abs(fr - fm) / fse;
            const double zn = std::abs(tab.Nbar[size_t(t)] - mc.Nbar_mean[k]) /
                              std::max(mc.Nbar_se[k], 1e-12);
            const double zd = std::abs(tab.D1[size_t(t)] - mc.D1_mean[k]) /
                              std::max(mc.D1_se[k], 1e-12);
            for (double z : {zf, zn, zd})
                if (z > worst_z) {
                    worst_z = z;
                    worst = fmt("worst z = %.2f (%s, t=%ld)", z, c.name, t);
                }
            if (zf > 3.0 || zn > 3.0 || zd > 3.0) ok = false;
        }
    }
    // f(t) -> 1/mean = 1/3 for alpha = 1.5
    const auto tab15 =
        make_renewal_tables(WaitingTimeDistribution::yule_simon(1.5), t_c, 10000);
    const double f_inf = tab15.f[10000];
    const bool f_ok = std::abs(f_inf - 1.0 / 3.0) / (1.0 / 3.0) <= 0.05;
    ok = ok && f_ok;
    report(3, "renewal calculus vs MC", ok,
           fmt("%s; f(1e4|a=1.5) = %.4f (1/3 within 5%%)", worst.c_str(), f_inf));
}

void criterion4() {
    const double e1 = std::abs(mittag_leffler(1.0, -3.0) - std::exp(-3.0));
    const double eh =
        std::abs(mittag_leffler(0.5, -1.0) - std::exp(1.0) * std::erfc(1.0));

    const long T = 100000;
    const auto tab = make_renewal_tables(WaitingTimeDistribution::yule_simon(0.5),
                                         41.0, T);
    double worst_rel = 0.0;
    for (double x = 1.0; x <= double(T); x *= 1.25) {
        const long t = lround(x);
        const double exact = tab.D1[size_t(t)];
        if (exact < 1e-3 || exact > 0.9) continue;
        const double ml = ml_decoherence(0.5, tab, t);
        worst_rel = std::max(worst_rel, std::abs(ml - exact) / exact);
    }

    double lo = 1e300, hi = 0.0, sum = 0.0;
    long cnt = 0;
    for (long t = T / 10; t <= T; t += 499) {
        const double r = tab.D1[size_t(t)] * std::sqrt(double(t));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        sum += r;
        ++cnt;
    }
    const double mean = sum / double(cnt);
    const double spread = std::max(hi - mean, mean - lo) / mean;

    const bool ok =
        e1 <= 1e-12 && eh <= 1e-8 && worst_rel <= 0.05 && spread <= 0.10;
    report(4, "Mittag-Leffler decoherence", ok,
           fmt("E_1(-3) err %.1e (<=1e-12), E_1/2(-1) err %.1e (<=1e-8), "
               "Eq.9 worst dev %.1f%% (<=5%%), D*t^a spread %.1f%% (<=10%%)",
               e1, eh, 100.0 * worst_rel, 100.0 * spread));
}

EnsembleResult criterion5(const LocalizationModel& model) {
    const double kappa = 1.0 / 300.0;
    auto cfg = noisy_config(WaitingTimeDistribution::yule_simon(0.5),
                            kappa, 10000, 200, 20260824);
    // criterion 8 probes this ensemble at t = 4096
    cfg.sample_times.push_back(4096);
    std::sort(cfg.sample_times.begin(), cfg.sample_times.end());
    cfg.sample_times.erase(
        std::unique(cfg.sample_times.begin(), cfg.sample_times.end()),
        cfg.sample_times.end());
    const auto res = run_ensemble(cfg);
    const double sim_slope =
        loglog_slope(res.sample_times, res.mean_var, 100.0, 10000.0);

    const double t_c = cfg.coherence_time();
    const auto tab = make_renewal_tables(cfg.dist, t_c, cfg.T);
    const auto pred = predict_variance_full(model, tab, kappa, cfg.T);

    // Eq. (10) tail law from the same renewal tables
    std::vector<double> asym;
    for (long t : res.sample_times)
        asym.push_back(subdiffusion_asymptote(model, tab, t));
    const double th_slope =
        loglog_slope(res.sample_times, asym, 1000.0, 10000.0);
    // full-Eq.(6) curve slope on the same grid, for the record
    std::vector<double> full;
    for (long t : res.sample_times) full.push_back(pred.var_p[size_t(t)]);
    const double full_slope =
        loglog_slope(res.sample_times, full, 100.0, 10000.0);

    const auto rep = compare_theory_sim(res.sample_times, res.mean_var, full,
                                        100.0, 10000.0, 0.15);

    const bool ok = std::abs(sim_slope - 0.5) <= 0.1 &&
                    std::abs(th_slope - 0.5) <= 0.05 && rep.pass;
    report(5, "momentum subdiffusion (Eq. 10)", ok,
           fmt("sim slope %.3f (0.5+-0.1), Eq.10 slope %.3f (0.5+-0.05, "
               "full-curve slope %.3f), median dev %.1f%% (<=15%%), "
               "%d/%d realizations",
               sim_slope, th_slope, full_slope, 100.0 * rep.median_dev,
               res.n_included, cfg.n_realizations));
    return res;
}

EnsembleResult criterion6(const LocalizationModel& model) {
    const double kappa = 1.0 / 300.0;
    const auto cfg = noisy_config(WaitingTimeDistribution::yule_simon(1.5),
                                  kappa, 4096, 64, 20260825);
    const auto res = run_ensemble(cfg);
    const double slope =
        loglog_slope(res.sample_times, res.mean_var, 400.0, 4096.0);
    const double d_eff = (value_at(res, 4096) - value_at(res, 2048)) / 2048.0;
    const double t_c = cfg.coherence_time();
    const double target = model.D_star / (1.0 + 3.0 * t_c / model.t_star);
    const bool ok = std::abs(slope - 1.0) <= 0.1 &&
                    std::abs(d_eff - target) / target <= 0.30;
    report(6, "diffusive regime alpha=1.5", ok,
           fmt("tail slope %.3f (1.0+-0.1), D_eff %.2f vs D*/(1+3t_c/t*) = "
               "%.2f (within 30%%)",
               slope, d_eff, target));
    return res;
}

EnsembleResult criterion7(const LocalizationModel& model) {
    // Eq. (4) rests on t_c = 2*hbar^2/kappa, the weak-noise leading order;
    // at kappa = 1/300 the next order is already a ~16% systematic, so the
    // stationary limit is probed at kappa = 1/1200 where it is ~5%.
    const double kappa = 1.0 / 1200.0;
    const auto cfg = noisy_config(WaitingTimeDistribution::deterministic(1),
                                  kappa, 10000, 24, 20260826);
    const auto res = run_ensemble(cfg);
    const double t_c = cfg.coherence_time();
    std::vector<double> eq4;
    for (long t : res.sample_times)
        eq4.push_back(stationary_crossover(model, t_c, double(t)));
    const auto rep = compare_theory_sim(res.sample_times, res.mean_var, eq4,
                                        10.0 * t_c, 10000.0, 0.15);

    // Eq. (6) discretization cross-check matrix
    double worst_form = 0.0;
    for (double tc : {41.0, 410.0})
        for (auto dist : {WaitingTimeDistribution::deterministic(1),
                          WaitingTimeDistribution::yule_simon(0.5),
                          WaitingTimeDistribution::yule_simon(1.5)}) {
            const auto tab = make_renewal_tables(dist, tc, 2048);
            const auto a = predict_variance_full(model, tab, kappa, 2048,
                                                 VarianceForm::double_sum);
            const auto b = predict_variance_full(model, tab, kappa, 2048,
                                                 VarianceForm::integral);
            for (long t = 16; t <= 2048; t = t * 3 / 2)
                worst_form = std::max(
                    worst_form, std::abs(b.var_p[size_t(t)] - a.var_p[size_t(t)]) /
                                    a.var_p[size_t(t)]);
        }

    const bool ok = rep.pass && worst_form <= 0.02;
    report(7, "stationary limit (Eq. 4)", ok,
           fmt("median dev %.1f%% (<=15%% over [%.0f,10000]), form mismatch "
               "%.2f%% (<=2%%)",
               100.0 * rep.median_dev, 10.0 * t_c, 100.0 * worst_form));
    return res;
}

void criterion8(const EnsembleResult& mid_alpha05,   // kappa = 1/300, T = 1e4
                const EnsembleResult& alpha15) {     // kappa = 1/300, T = 4096
    const long t = 4096;
    auto probe = [&](const WaitingTimeDistribution& dist, double kappa, int n,
                     std::uint64_t seed) {
        const auto cfg = noisy_config(dist, kappa, 4096, n, seed);
        return run_ensemble(cfg);
    };
    const auto ys05 = WaitingTimeDistribution::yule_simon(0.5);
    const auto low_k = probe(ys05, 1.0 / 1200.0, 48, 20260827);
    const auto high_k = probe(ys05, 1.0 / 75.0, 48, 20260828);
    const auto alpha10 =
        probe(WaitingTimeDistribution::yule_simon(1.0), 1.0 / 300.0, 32, 20260829);

    auto z_gap = [&](const EnsembleResult& a, const EnsembleResult& b) {
        const double va = value_at(a, t), vb = value_at(b, t);
        const double sa = stderr_at(a, t), sb = stderr_at(b, t);
        return (vb - va) / std::sqrt(sa * sa + sb * sb);
    };
    const double zk1 = z_gap(low_k, mid_alpha05);
    const double zk2 = z_gap(mid_alpha05, high_k);
    const double za1 = z_gap(mid_alpha05, alpha10);
    const double za2 = z_gap(alpha10, alpha15);
    const bool ok = zk1 >= 3.0 && zk2 >= 3.0 && za1 >= 3.0 && za2 >= 3.0;
    report(8, "Fig. 1 panel orderings", ok,
           fmt("kappa ordering z = (%.1f, %.1f), alpha ordering z = "
               "(%.1f, %.1f), all >= 3",
               zk1, zk2, za1, za2));
}

}  // namespace

int main() {
    std::printf("acceptance suite (single binary, deterministic seeds)\n");
    criterion1();
    const auto model = criterion2();
    criterion3();
    criterion4();
    const auto sub = criterion5(model);
    const auto dif = criterion6(model);
    criterion7(model);
    criterion8(sub, dif);
    std::printf("%s\n", g_failures == 0 ? "ALL CRITERIA PASSED"
                                        : "SOME CRITERIA FAILED");
    return g_failures == 0 ? 0 : 1;
}
