#ifndef LKR_THEORY_HPP
#define LKR_THEORY_HPP

#include <vector>

#include "lkr/renewal.hpp"

// Analytical predictions: localized variance model, stationary-noise
// crossover, Mittag-Leffler decoherence and its asymptotes, the
// subdiffusion law, and the full two-time variance prediction.

namespace lkr {

struct LocalizationModel {
    double D_star = 0.0;   // initial quantum diffusion coefficient
    double t_star = 0.0;   // quantum break time

    static LocalizationModel from_dstar(double D_star, double hbar);
    static LocalizationModel from_tstar(double t_star, double hbar);
};

// var p0(t) = D* t* [1 - exp(-t/t*)].
double var_p0_model(const LocalizationModel& model, double t);

// Perturbative stationary-noise crossover:
// D*/(1+t_c/t*) * t + D* t*/(1+t*/t_c)^2 * [1 - exp(-t/t* - t/t_c)].
double stationary_crossover(const LocalizationModel& model, double t_c,
                            double t);

// Force-correlation lags C0(0..T-1) reproducing the model variance under
// var p0(t) = sum_{a,b<t} C0(|a-b|): C0(0) = V(1),
// C0(d) = [V(d+1) - 2V(d) + V(d-1)]/2 for d >= 1.
std::vector<double> c0_from_varp0(const LocalizationModel& model, long T);

enum class VarianceForm { double_sum, integral };

struct PredictionSeries {
    long T = 0;
    VarianceForm form = VarianceForm::double_sum;
    PairCoefficient pair_coefficient = PairCoefficient::one_minus_q;
    std::vector<double> var_p;            // index 0..T
    std::vector<double> localized_term;   // var p0(t) * D(t,0)
    std::vector<double> noise_floor;      // (kappa/2) * Nbar(t)
    std::vector<double> memory_terms;     // remainder
};

// Full variance prediction. double_sum evaluates
//   sum_{t',t''<t} C0(|t'-t''|) D(max,min) + (kappa/2) Nbar(t)
// incrementally in O(T^2); integral discretizes the integrated-by-parts
// form with forward differences (retained as a cross-check).
PredictionSeries predict_variance_full(
    const LocalizationModel& model, const RenewalTables& tables, double kappa,
    long T, VarianceForm form = VarianceForm::double_sum,
    PairCoefficient coeff = PairCoefficient::one_minus_q);

// E_alpha(z) for 0 < alpha <= 1 and real z <= 0, absolute error <= 1e-10.
// Power series while the largest term stays small, asymptotic series for
// z <= -40, spectral integral representation in between.
double mittag_leffler(double alpha, double z);

namespace detail {
// Individual evaluation regimes, exposed for stitching checks.
double ml_series(double alpha, double z);
double ml_integral(double alpha, double z);
double ml_asymptotic(double alpha, double z);
double ml_series_peak_log(double alpha, double x);
}  // namespace detail

// Tail coefficient c in Nbar(t) ~ t^alpha sin(pi alpha)/(pi c), fitted over
// the last decade of the table.
double fit_tail_coefficient(const RenewalTables& tables, double alpha);

// D(t,0) ~ E_alpha(-Gamma(1+alpha) Nbar(t)/t_c).
double ml_decoherence(double alpha, const RenewalTables& tables, long t);

// Printed asymptotes of the Mittag-Leffler decay: stretched exponential
// exp{t^alpha/[Gamma(-alpha) c t_c]} (early) and power law
// (c t_c/alpha) t^(-alpha) (late).
double ml_stretched_asymptote(double alpha, double c, double t_c, double t);
double ml_power_asymptote(double alpha, double c, double t_c, double t);

// var p(t) ~ (D* t*/t_c) Nbar(t); `closed_form` swaps in the fitted
// power law t^alpha sin(pi alpha)/(pi c).
double subdiffusion_asymptote(const LocalizationModel& model,
                              const RenewalTables& tables, long t,
                              bool closed_form = false, double c = 0.0);

}  // namespace lkr

#endif
