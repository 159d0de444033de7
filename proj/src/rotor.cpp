#include "lkr/rotor.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace lkr {

namespace {

// FFTW plan creation/destruction is not thread-safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

double default_hbar() {
    return 2.0L * std::numbers::pi_v<long double> * 577.0L / 13872.0L;
}

void LatticeParams::validate() const {
    if (M < 8 || M % 2 != 0)
        throw std::invalid_argument("LatticeParams: M must be even and >= 8");
    if (!(hbar > 0.0))
        throw std::invalid_argument("LatticeParams: hbar must be positive");
    // Quantum resonances at hbar = 4*pi*(p/q) with small q destroy
    // localization; reject anything within 1e-6 of one for q <= 8.
    const double x = hbar / (4.0 * std::numbers::pi);
    for (int q = 1; q <= 8; ++q) {
        const double p = std::round(x * q);
        if (std::abs(hbar - 4.0 * std::numbers::pi * p / q) < 1e-6)
            throw std::invalid_argument(
                "LatticeParams: hbar within 1e-6 of a q<=8 quantum resonance");
    }
}

cplx QuantumState::amplitude(int m) const {
    const int M = size();
    return amps[static_cast<size_t>(m >= 0 ? m : m + M)];
}

double QuantumState::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

QuantumState init_state(const LatticeParams& lat) {
    lat.validate();
    QuantumState st;
    st.amps.assign(static_cast<size_t>(lat.M), cplx{0.0, 0.0});
    st.amps[0] = cplx{1.0, 0.0};
    st.rep = Representation::momentum;
    return st;
}

double momentum_variance(const QuantumState& state, const LatticeParams& lat) {
    if (state.rep != Representation::momentum)
        throw std::invalid_argument("momentum_variance: need momentum rep");
    const int M = lat.M;
    double mean = 0.0, sq = 0.0;
    for (int j = 0; j < M; ++j) {
        const double pr = std::norm(state.amps[static_cast<size_t>(j)]);
        const double p = lat.hbar * lat.momentum_number(j);
        mean += pr * p;
        sq += pr * p * p;
    }
    return sq - mean * mean;
}

double leakage_mass(const QuantumState& state, const LatticeParams& lat,
                    double guard_fraction) {
    if (!(guard_fraction > 0.0 && guard_fraction < 0.5))
        throw std::invalid_argument("leakage_mass: guard_fraction in (0,0.5)");
    const int M = lat.M;
    const int guard = static_cast<int>(std::floor(guard_fraction * M));
    const int half = M / 2;
    double mass = 0.0;
    for (int j = 0; j < M; ++j) {
        const int m = lat.momentum_number(j);
        if (m >= half - guard || m < -half + guard)
            mass += std::norm(state.amps[static_cast<size_t>(j)]);
    }
    return mass;
}

SplitStepPropagator::SplitStepPropagator(const LatticeParams& lat) : lat_(lat) {
    lat.validate();
    const int M = lat.M;
    cos_theta_.resize(static_cast<size_t>(M));
    free_phase_.resize(static_cast<size_t>(M));
    kick_phase_mean_.resize(static_cast<size_t>(M));
    buf_.resize(static_cast<size_t>(M));
    const double two_pi = 2.0 * std::numbers::pi;
    for (int j = 0; j < M; ++j) {
        cos_theta_[static_cast<size_t>(j)] = std::cos(two_pi * j / M);
        const double m = lat.momentum_number(j);
        // 1/M folds the unnormalized FFT round trip into the free phase.
        free_phase_[static_cast<size_t>(j)] =
            std::polar(1.0 / M, -lat.hbar * m * m / 2.0);
        kick_phase_mean_[static_cast<size_t>(j)] =
            std::polar(1.0, -(lat.K / lat.hbar) * cos_theta_[static_cast<size_t>(j)]);
    }
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto* b = reinterpret_cast<fftw_complex*>(buf_.data());
    // FFTW_MEASURE selects plans by timing, which is not deterministic run
    // to run and breaks byte-identical output; FFTW_ESTIMATE is a pure
    // function of the problem, and FFTW_UNALIGNED of the buffer address.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plan_bwd_ = fftw_plan_dft_1d(M, b, b, FFTW_BACKWARD, flags);
    plan_fwd_ = fftw_plan_dft_1d(M, b, b, FFTW_FORWARD, flags);
}

SplitStepPropagator::~SplitStepPropagator() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void SplitStepPropagator::step(QuantumState& state, double K_t) const {
    const int M = lat_.M;
    if (state.size() != M)
        throw std::invalid_argument("step: state size mismatch");
    if (state.rep != Representation::momentum)
        throw std::invalid_argument("step: need momentum rep");
    std::memcpy(buf_.data(), state.amps.data(), sizeof(cplx) * M);
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));   // momentum -> angle
    if (K_t == lat_.K) {
        for (int j = 0; j < M; ++j)
            buf_[static_cast<size_t>(j)] *= kick_phase_mean_[static_cast<size_t>(j)];
    } else {
        const double a = K_t / lat_.hbar;
        for (int j = 0; j < M; ++j)
            buf_[static_cast<size_t>(j)] *=
                std::polar(1.0, -a * cos_theta_[static_cast<size_t>(j)]);
    }
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));   // angle -> momentum
    for (int j = 0; j < M; ++j)
        buf_[static_cast<size_t>(j)] *= free_phase_[static_cast<size_t>(j)];
    std::memcpy(state.amps.data(), buf_.data(), sizeof(cplx) * M);
}

std::vector<cplx> dense_floquet_oracle(const LatticeParams& lat, double K_t) {
    lat.validate();
    if (lat.M > 64)
        throw std::invalid_argument("dense_floquet_oracle: M <= 64 only");
    const int M = lat.M;
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<cplx> U(static_cast<size_t>(M) * M, cplx{0.0, 0.0});
    // Column c: kick applied to |m_c> on the angle grid, transformed back,
    // then the free-rotation phase. Direct DFT sums throughout.
    for (int c = 0; c < M; ++c) {
        const int mc = lat.momentum_number(c);
        std::vector<cplx> angle(static_cast<size_t>(M));
        for (int j = 0; j < M; ++j) {
            const double th = two_pi * j / M;
            angle[static_cast<size_t>(j)] =
                std::polar(1.0 / std::sqrt(double(M)), mc * th) *
                std::polar(1.0, -(K_t / lat.hbar) * std::cos(th));
        }
        for (int r = 0; r < M; ++r) {
            const int mr = lat.momentum_number(r);
            cplx s{0.0, 0.0};
            for (int j = 0; j < M; ++j) {
                const double th = two_pi * j / M;
                s += std::polar(1.0 / std::sqrt(double(M)), -mr * th) *
                     angle[static_cast<size_t>(j)];
            }
            U[static_cast<size_t>(r) * M + c] =
                std::polar(1.0, -lat.hbar * double(mr) * mr / 2.0) * s;
        }
    }
    return U;
}

std::vector<cplx> apply_dense(const std::vector<cplx>& U,
                              const std::vector<cplx>& x) {
    const size_t M = x.size();
    if (U.size() != M * M)
        throw std::invalid_argument("apply_dense: dimension mismatch");
    std::vector<cplx> y(M, cplx{0.0, 0.0});
    for (size_t r = 0; r < M; ++r) {
        cplx s{0.0, 0.0};
        for (size_t c = 0; c < M; ++c) s += U[r * M + c] * x[c];
        y[r] = s;
    }
    return y;
}

}  // namespace lkr
