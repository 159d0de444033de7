#ifndef LKR_ROTOR_HPP
#define LKR_ROTOR_HPP

#include <complex>
#include <cstddef>
#include <vector>

// Split-step propagation of the kicked rotator on a truncated momentum
// lattice. One Floquet period is a kick phase, diagonal on the angle grid,
// followed by the free-rotation phase, diagonal in momentum.

namespace lkr {

using cplx = std::complex<double>;

struct LatticeParams {
    int M = 4096;        // number of momentum states, even, >= 8
    double hbar = 0.0;   // effective Planck constant, scaled units
    double K = 7.5;      // mean kick strength

    // Throws std::invalid_argument on bad M, nonpositive hbar, or an hbar
    // within 1e-6 of a low-order quantum resonance 4*pi*(p/q), q <= 8.
    void validate() const;

    // Signed momentum quantum number for a storage index in FFT order:
    // j < M/2 -> m = j, else m = j - M.
    int momentum_number(int j) const { return j < M / 2 ? j : j - M; }
};

// hbar = 2*pi*577/13872, the off-resonance value used throughout.
double default_hbar();

enum class Representation { momentum, angle };

struct QuantumState {
    // Amplitudes in FFT index order (m = 0..M/2-1 then -M/2..-1).
    std::vector<cplx> amps;
    Representation rep = Representation::momentum;

    int size() const { return static_cast<int>(amps.size()); }
    // Amplitude for signed momentum number m in [-M/2, M/2).
    cplx amplitude(int m) const;
    double norm() const;
};

// |p=0> in momentum representation.
QuantumState init_state(const LatticeParams& lat);

// <p^2> - <p>^2 with p_m = hbar*m.
double momentum_variance(const QuantumState& state, const LatticeParams& lat);

// Total probability in the outermost guard_fraction of momentum states on
// each side. guard_fraction in (0, 0.5).
double leakage_mass(const QuantumState& state, const LatticeParams& lat,
                    double guard_fraction);

// FFT-based one-period propagator. Owns FFTW plans for a fixed lattice;
// reusable across states of the same size. Not shareable between threads.
class SplitStepPropagator {
public:
    explicit SplitStepPropagator(const LatticeParams& lat);
    ~SplitStepPropagator();
    SplitStepPropagator(const SplitStepPropagator&) = delete;
    SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;

    // Applies exp(-i K_t cos(theta)/hbar) then exp(-i hbar m^2 / 2).
    void step(QuantumState& state, double K_t) const;

    const LatticeParams& lattice() const { return lat_; }

private:
    LatticeParams lat_;
    std::vector<double> cos_theta_;          // cos(2*pi*j/M)
    std::vector<cplx> free_phase_;           // exp(-i hbar m^2 / 2) / M
    std::vector<cplx> kick_phase_mean_;      // exp(-i K cos(theta)/hbar)
    mutable std::vector<cplx> buf_;
    void* plan_fwd_ = nullptr;               // angle -> momentum
    void* plan_bwd_ = nullptr;               // momentum -> angle
};

// Explicit M x M Floquet matrix built from direct DFT sums (no FFT),
// row-major. Test oracle; M <= 64.
std::vector<cplx> dense_floquet_oracle(const LatticeParams& lat, double K_t);

// y = U * x for a row-major M x M matrix.
std::vector<cplx> apply_dense(const std::vector<cplx>& U,
                              const std::vector<cplx>& x);

}  // namespace lkr

#endif
