#include "lkr/theory.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lkr {

LocalizationModel LocalizationModel::from_dstar(double D_star, double hbar) {
    if (!(D_star > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("LocalizationModel: D*, hbar > 0");
    return {D_star, D_star / (hbar * hbar)};
}

LocalizationModel LocalizationModel::from_tstar(double t_star, double hbar) {
    if (!(t_star > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("LocalizationModel: t*, hbar > 0");
    return {hbar * hbar * t_star, t_star};
}

double var_p0_model(const LocalizationModel& model, double t) {
    if (t < 0.0) throw std::invalid_argument("var_p0_model: t >= 0");
    return model.D_star * model.t_star * (-std::expm1(-t / model.t_star));
}

double stationary_crossover(const LocalizationModel& model, double t_c,
                            double t) {
    if (!(t_c > 0.0)) throw std::invalid_argument("stationary_crossover: t_c > 0");
    const double ts = model.t_star;
    const double drift = model.D_star / (1.0 + t_c / ts) * t;
    const double r = 1.0 + ts / t_c;
    const double sat =
        model.D_star * ts / (r * r) * (-std::expm1(-t / ts - t / t_c));
    return drift + sat;
}

std::vector<double> c0_from_varp0(const LocalizationModel& model, long T) {
    if (T < 2) throw std::invalid_argument("c0_from_varp0: T >= 2");
    std::vector<double> c0(static_cast<size_t>(T));
    auto V = [&](long t) { return var_p0_model(model, double(t)); };
    c0[0] = V(1);
    for (long d = 1; d < T; ++d)
        c0[size_t(d)] = 0.5 * (V(d + 1) - 2.0 * V(d) + V(d - 1));
    return c0;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler E_alpha(z), 0 < alpha <= 1, z <= 0.

namespace detail {

// Power series in long double. Safe only while the largest term stays
// modest; the caller checks ml_series_peak_log first.
double ml_series(double alpha, double z) {
    const long double x = -static_cast<long double>(z);
    long double sum = 1.0L;
    const long double lx = x > 0.0L ? logl(x) : 0.0L;
    for (int n = 1; n <= 10000; ++n) {
        if (x == 0.0L) break;
        const long double lt = n * lx - lgammal(alpha * n + 1.0L);
        const long double term = expl(lt);
        sum += (n % 2 == 0) ? term : -term;
        if (term < 1e-20L && std::pow(alpha * n, alpha) > x) break;
    }
    return static_cast<double>(sum);
}

// log of the largest series term magnitude at argument -x.
double ml_series_peak_log(double alpha, double x) {
    if (x <= 1.0) return 0.0;
    const double n_peak = std::pow(x, 1.0 / alpha) / alpha;
    return n_peak * std::log(x) - std::lgamma(alpha * n_peak + 1.0);
}

// Spectral representation for 0 < alpha < 1, x > 0:
// E_alpha(-x) = x sin(pi a)/(a pi) * int_0^inf e^{-u^{1/a}} /
//               (u^2 + 2 x u cos(pi a) + x^2) du.
struct MlIntegrandParams {
    double inv_alpha, x, cospa;
};

double ml_integrand(double u, void* p) {
    const auto* q = static_cast<const MlIntegrandParams*>(p);
    const double den = (u + q->x * q->cospa) * (u + q->x * q->cospa) +
                       q->x * q->x * (1.0 - q->cospa * q->cospa);
    return std::exp(-std::pow(u, q->inv_alpha)) / den;
}

double ml_integral(double alpha, double z) {
    const double x = -z;
    MlIntegrandParams params{1.0 / alpha, x,
                             std::cos(std::numbers::pi * alpha)};
    // e^{-u^{1/alpha}} underflows past this cut; a finite interval lets the
    // adaptive rule reach much tighter tolerances than qagiu manages.
    const double cut = std::pow(700.0, alpha);
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
    gsl_function F{&ml_integrand, &params};
    double result = 0.0, abserr = 0.0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_integration_qags(&F, 0.0, cut, 1e-15, 1e-13, 4000,
                                            ws, &result, &abserr);
    gsl_set_error_handler(old);
    gsl_integration_workspace_free(ws);
    if (status != 0 && status != GSL_EROUND)
        throw std::runtime_error("mittag_leffler: quadrature failed");
    return result * x * std::sin(std::numbers::pi * alpha) /
           (alpha * std::numbers::pi);
}

// Divergent asymptotic series -sum_k z^{-k}/Gamma(1-alpha k), truncated at
// the smallest term.
double ml_asymptotic(double alpha, double z) {
    const double x = -z;
    const double lx = std::log(x);
    double sum = 0.0, prev_mag = 1e300;
    for (int k = 1; k <= 400; ++k) {
        const double y = alpha * k;   // 1/Gamma(1-y) via reflection
        const double s = std::sin(std::numbers::pi * y);
        // integer y is a pole of Gamma(1-y): that term vanishes identically
        if (std::abs(s) < 1e-8) continue;
        const double mag =
            std::exp(std::lgamma(y) - k * lx) * std::abs(s) / std::numbers::pi;
        if (mag > prev_mag) break;
        prev_mag = mag;
        // term = -z^{-k}/Gamma(1-y), z^{-k} = (-1)^k x^{-k}
        const double sign = ((k % 2 == 0) ? -1.0 : 1.0) * (s >= 0 ? 1.0 : -1.0);
        sum += sign * mag;
        if (mag < 1e-18) break;
    }
    return sum;
}

}  // namespace detail

double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("mittag_leffler: alpha in (0,1]");
    if (z > 0.0) throw std::domain_error("mittag_leffler: z <= 0 only");
    if (alpha == 1.0) return std::exp(z);
    const double x = -z;
    if (detail::ml_series_peak_log(alpha, x) <= 12.0)
        return detail::ml_series(alpha, z);
    if (x >= 40.0) return detail::ml_asymptotic(alpha, z);
    return detail::ml_integral(alpha, z);
}

// ---------------------------------------------------------------------------

double fit_tail_coefficient(const RenewalTables& tables, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("fit_tail_coefficient: alpha in (0,1)");
    const long T = tables.T;
    const long t0 = std::max(2L, T / 10);
    double sum = 0.0;
    long n = 0;
    for (long t = t0; t <= T; ++t) {
        if (tables.Nbar[size_t(t)] <= 0.0) continue;
        sum += std::log(tables.Nbar[size_t(t)]) - alpha * std::log(double(t));
        ++n;
    }
    if (n == 0) throw std::runtime_error("fit_tail_coefficient: empty window");
    const double intercept = sum / double(n);
    return std::sin(std::numbers::pi * alpha) /
           (std::numbers::pi * std::exp(intercept));
}

double ml_decoherence(double alpha, const RenewalTables& tables, long t) {
    if (!(alpha < 1.0))
        throw std::invalid_argument("ml_decoherence: alpha < 1");
    if (t < 0 || t > tables.T)
        throw std::invalid_argument("ml_decoherence: t out of range");
    const double arg =
        -std::tgamma(1.0 + alpha) * tables.Nbar[size_t(t)] / tables.t_c;
    return mittag_leffler(alpha, arg);
}

double ml_stretched_asymptote(double alpha, double c, double t_c, double t) {
    // Gamma(-alpha) < 0 for 0 < alpha < 1, so the exponent is negative.
    const double gma = std::tgamma(-alpha);
    return std::exp(std::pow(t, alpha) / (gma * c * t_c));
}

double ml_power_asymptote(double alpha, double c, double t_c, double t) {
    return (c * t_c / alpha) * std::pow(t, -alpha);
}

double subdiffusion_asymptote(const LocalizationModel& model,
                              const RenewalTables& tables, long t,
                              bool closed_form, double c) {
    if (t < 0 || t > tables.T)
        throw std::invalid_argument("subdiffusion_asymptote: t out of range");
    const double scale = model.D_star * model.t_star / tables.t_c;
    if (!closed_form) return scale * tables.Nbar[size_t(t)];
    const double alpha = tables.dist.alpha;
    if (t == 0) return 0.0;
    return scale * std::sin(std::numbers::pi * alpha) /
           (std::numbers::pi * c) * std::pow(double(t), alpha);
}

PredictionSeries predict_variance_full(const LocalizationModel& model,
                                       const RenewalTables& tables,
                                       double kappa, long T, VarianceForm form,
                                       PairCoefficient coeff) {
    if (T < 1 || T > tables.T)
        throw std::invalid_argument("predict_variance_full: horizon mismatch");
    PredictionSeries out;
    out.T = T;
    out.form = form;
    out.pair_coefficient = coeff;
    out.var_p.assign(size_t(T) + 1, 0.0);
    out.localized_term.assign(size_t(T) + 1, 0.0);
    out.noise_floor.assign(size_t(T) + 1, 0.0);
    out.memory_terms.assign(size_t(T) + 1, 0.0);

    std::vector<double> V(size_t(T) + 2);
    for (long t = 0; t <= T + 1; ++t) V[size_t(t)] = var_p0_model(model, double(t));
    const auto C0 = c0_from_varp0(model, std::max(T, 2L));
    const double k = coeff == PairCoefficient::one_minus_q ? 1.0 - tables.q
                                                           : 1.0 / tables.t_c;
    const auto& f = tables.f;
    const auto& D1 = tables.D1;

    if (form == VarianceForm::double_sum) {
        // var(t) = sum_{a,b<t} C0(|a-b|) D(max,min) + (kappa/2) Nbar(t),
        // grown one shell per step; row D(tp,s) carried as a running sum.
        double S = 0.0;
        for (long t = 1; t <= T; ++t) {
            const long tp = t - 1;
            double cross = 0.0, acc = 0.0;
            for (long s = 0; s < tp; ++s) {
                if (s >= 1) acc += f[size_t(s)] * D1[size_t(tp - s)];
                cross += C0[size_t(tp - s)] * (D1[size_t(tp)] + k * acc);
            }
            S += C0[0] + 2.0 * cross;
            out.var_p[size_t(t)] = S + 0.5 * kappa * tables.Nbar[size_t(t)];
        }
    } else {
        // Direct discretization of the integrated-by-parts form with
        // forward differences; the double-derivative sum is accumulated
        // shell by shell from consecutive pair rows.
        double T2 = 0.0, T3 = 0.0;
        std::vector<double> row_prev = {1.0};   // D(0, .)
        for (long t = 1; t <= T; ++t) {
            auto row = decoherence_pair_row(tables, t, coeff);
            for (long s2 = 0; s2 + 1 <= t - 1; ++s2) {
                const double d2 = row[size_t(s2 + 1)] - row[size_t(s2)] -
                                  row_prev[size_t(s2 + 1)] + row_prev[size_t(s2)];
                T3 += V[size_t(t - 1 - s2)] * d2;
            }
            T2 += V[size_t(t - 1)] * (D1[size_t(t)] - D1[size_t(t - 1)]);
            double T1 = 0.0;
            for (long s = 0; s < t; ++s)
                T1 += V[size_t(t - s)] * (row[size_t(s + 1)] - row[size_t(s)]);
            out.var_p[size_t(t)] = V[size_t(t)] * D1[size_t(t)] +
                                   0.5 * kappa * tables.Nbar[size_t(t)] + T1 -
                                   T2 - T3;
            row_prev = std::move(row);
        }
    }
    for (long t = 0; t <= T; ++t) {
        out.localized_term[size_t(t)] = V[size_t(t)] * D1[size_t(t)];
        out.noise_floor[size_t(t)] = 0.5 * kappa * tables.Nbar[size_t(t)];
        out.memory_terms[size_t(t)] = out.var_p[size_t(t)] -
                                      out.localized_term[size_t(t)] -
                                      out.noise_floor[size_t(t)];
    }
    return out;
}

}  // namespace lkr
