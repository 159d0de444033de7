#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lkr/harness.hpp"
#include "lkr/io.hpp"
#include "lkr/renewal.hpp"
#include "lkr/rotor.hpp"
#include "lkr/theory.hpp"

namespace py = pybind11;

namespace {

lkr::WaitingTimeDistribution make_dist(const std::string& kind, double alpha,
                                       long tau0) {
    if (kind == "yule_simon") return lkr::WaitingTimeDistribution::yule_simon(alpha);
    if (kind == "deterministic")
        return lkr::WaitingTimeDistribution::deterministic(tau0);
    if (kind == "geometric") return lkr::WaitingTimeDistribution::geometric(alpha);
    throw std::invalid_argument("unknown dist kind: " + kind);
}

// Wraps the split-step propagator plus its state for scripting.
class Rotor {
public:
    Rotor(int M, double hbar, double K)
        : lat_{M, hbar, K}, prop_(lat_), state_(lkr::init_state(lat_)) {}

    void reset() { state_ = lkr::init_state(lat_); }
    void step(double K_t) { prop_.step(state_, K_t); }
    double momentum_variance() const {
        return lkr::momentum_variance(state_, lat_);
    }
    double leakage(double guard) const {
        return lkr::leakage_mass(state_, lat_, guard);
    }
    double norm() const { return state_.norm(); }
    std::vector<std::complex<double>> amplitudes() const {
        std::vector<std::complex<double>> out(size_t(lat_.M));
        for (int m = -lat_.M / 2; m < lat_.M / 2; ++m)
            out[size_t(m + lat_.M / 2)] = state_.amplitude(m);
        return out;
    }

private:
    lkr::LatticeParams lat_;
    lkr::SplitStepPropagator prop_;
    lkr::QuantumState state_;
};

}  // namespace

PYBIND11_MODULE(_levyrotor, m) {
    m.doc() = "Levy-noise kicked rotator: propagation, renewal calculus, "
              "variance predictions";

    m.def("default_hbar", &lkr::default_hbar);
    m.def("pmf_yule_simon", &lkr::pmf_yule_simon, py::arg("alpha"),
          py::arg("tau"));
    m.def("mittag_leffler", &lkr::mittag_leffler, py::arg("alpha"),
          py::arg("z"));
    m.def(
        "var_p0_model",
        [](double dstar, double hbar, double t) {
            return lkr::var_p0_model(lkr::LocalizationModel::from_dstar(dstar, hbar), t);
        },
        py::arg("dstar"), py::arg("hbar"), py::arg("t"));
    m.def(
        "stationary_crossover",
        [](double dstar, double hbar, double t_c, double t) {
            return lkr::stationary_crossover(
                lkr::LocalizationModel::from_dstar(dstar, hbar), t_c, t);
        },
        py::arg("dstar"), py::arg("hbar"), py::arg("t_c"), py::arg("t"));

    m.def(
        "renewal_tables",
        [](const std::string& kind, double alpha, long tau0, double t_c,
           long T) {
            const auto tab =
                lkr::make_renewal_tables(make_dist(kind, alpha, tau0), t_c, T);
            py::dict d;
            d["f"] = tab.f;
            d["Nbar"] = tab.Nbar;
            d["D1"] = tab.D1;
            return d;
        },
        py::arg("kind"), py::arg("alpha") = 0.5, py::arg("tau0") = 1,
        py::arg("t_c") = 41.0, py::arg("T") = 1000);

    m.def(
        "predict_variance",
        [](double dstar, double hbar, const std::string& kind, double alpha,
           long tau0, double t_c, double kappa, long T,
           const std::string& form) {
            const auto model = lkr::LocalizationModel::from_dstar(dstar, hbar);
            const auto tab =
                lkr::make_renewal_tables(make_dist(kind, alpha, tau0), t_c, T);
            const auto pred = lkr::predict_variance_full(
                model, tab, kappa, T,
                form == "integral" ? lkr::VarianceForm::integral
                                   : lkr::VarianceForm::double_sum);
            py::dict d;
            d["var_p"] = pred.var_p;
            d["localized_term"] = pred.localized_term;
            d["noise_floor"] = pred.noise_floor;
            d["memory_terms"] = pred.memory_terms;
            return d;
        },
        py::arg("dstar"), py::arg("hbar"), py::arg("kind"), py::arg("alpha"),
        py::arg("tau0"), py::arg("t_c"), py::arg("kappa"), py::arg("T"),
        py::arg("form") = "double_sum");

    m.def(
        "run_ensemble",
        [](const std::string& config_json) {
            const auto cfg = lkr::parse_config(config_json);
            const auto res = lkr::run_ensemble(cfg);
            py::dict d;
            d["t"] = res.sample_times;
            d["var_p"] = res.mean_var;
            d["stderr"] = res.std_err;
            d["n_included"] = res.n_included;
            d["n_excluded"] = res.n_excluded;
            return d;
        },
        py::arg("config_json"));

    m.def(
        "fit_dstar",
        [](const std::vector<long>& t, const std::vector<double>& v,
           double hbar) {
            const auto fit = lkr::fit_dstar(t, v, hbar);
            return py::make_tuple(fit.D_star, fit.t_star, fit.residual);
        },
        py::arg("t"), py::arg("var_p"), py::arg("hbar"));
    m.def(
        "fit_exponent",
        [](const std::vector<long>& t, const std::vector<double>& v,
           double t_min, double t_max) {
            const auto fit = lkr::fit_exponent(t, v, t_min, t_max);
            return py::make_tuple(fit.alpha, fit.ci_halfwidth);
        },
        py::arg("t"), py::arg("values"), py::arg("t_min"), py::arg("t_max"));

    py::class_<Rotor>(m, "Rotor")
        .def(py::init<int, double, double>(), py::arg("M"), py::arg("hbar"),
             py::arg("K"))
        .def("reset", &Rotor::reset)
        .def("step", &Rotor::step, py::arg("K_t"))
        .def("momentum_variance", &Rotor::momentum_variance)
        .def("leakage", &Rotor::leakage, py::arg("guard_fraction") = 0.05)
        .def("norm", &Rotor::norm)
        .def("amplitudes", &Rotor::amplitudes);
}
