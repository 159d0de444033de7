#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "lkr/rotor.hpp"

using namespace lkr;

namespace {

LatticeParams small_lat(int M) { return {M, default_hbar(), 7.5}; }

QuantumState random_state(int M, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    QuantumState st;
    st.amps.resize(size_t(M));
    for (auto& a : st.amps) a = cplx{g(rng), g(rng)};
    double n = st.norm();
    for (auto& a : st.amps) a /= n;
    return st;
}

}  // namespace

TEST_CASE("init_state is |p=0> with unit norm and zero variance") {
    const auto lat = small_lat(8);
    const auto st = init_state(lat);
    CHECK(st.amplitude(0) == cplx{1.0, 0.0});
    for (int m = -4; m < 4; ++m)
        if (m != 0) CHECK(st.amplitude(m) == cplx{0.0, 0.0});
    CHECK(st.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(momentum_variance(st, lat) == 0.0);
}

TEST_CASE("lattice validation") {
    CHECK_THROWS(init_state(LatticeParams{7, 1.0, 7.5}));
    CHECK_THROWS(init_state(LatticeParams{4, 1.0, 7.5}));
    CHECK_THROWS(init_state(LatticeParams{8, -1.0, 7.5}));
    // 4*pi/2 is a low-order resonance
    CHECK_THROWS(init_state(LatticeParams{8, 2.0 * std::numbers::pi, 7.5}));
    CHECK_NOTHROW(init_state(small_lat(8)));
}

TEST_CASE("momentum variance of a symmetric two-point state is hbar^2") {
    const auto lat = small_lat(16);
    QuantumState st;
    st.amps.assign(16, cplx{0.0, 0.0});
    const double r = 1.0 / std::sqrt(2.0);
    st.amps[1] = std::polar(r, 0.7);          // m = +1
    st.amps[15] = std::polar(r, -2.1);        // m = -1
    CHECK(momentum_variance(st, lat) ==
          doctest::Approx(lat.hbar * lat.hbar).epsilon(1e-12));
}

TEST_CASE("free rotation (K_t = 0) leaves momentum probabilities unchanged") {
    const auto lat = small_lat(32);
    SplitStepPropagator prop(lat);
    std::mt19937_64 rng(11);
    auto st = random_state(32, rng);
    const auto before = st;
    prop.step(st, 0.0);
    for (int j = 0; j < 32; ++j)
        CHECK(std::norm(st.amps[size_t(j)]) ==
              doctest::Approx(std::norm(before.amps[size_t(j)])).epsilon(1e-12));
}

TEST_CASE("norm preserved to 1e-12 per step") {
    const auto lat = small_lat(64);
    SplitStepPropagator prop(lat);
    auto st = init_state(lat);
    for (int t = 0; t < 50; ++t) {
        prop.step(st, 7.5 + 0.03 * t);
        CHECK(std::abs(st.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("dense oracle is unitary and diagonal at K_t = 0") {
    const auto lat = small_lat(8);
    const auto U = dense_floquet_oracle(lat, 7.5);
    // U^dagger U = I
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            cplx s{0.0, 0.0};
            for (int k = 0; k < 8; ++k)
                s += std::conj(U[size_t(k) * 8 + r]) * U[size_t(k) * 8 + c];
            CHECK(std::abs(s - (r == c ? 1.0 : 0.0)) < 1e-12);
        }
    const auto F = dense_floquet_oracle(lat, 0.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            if (r == c) {
                const double m = lat.momentum_number(r);
                const cplx expect = std::polar(1.0, -lat.hbar * m * m / 2.0);
                CHECK(std::abs(F[size_t(r) * 8 + c] - expect) < 1e-12);
            } else {
                CHECK(std::abs(F[size_t(r) * 8 + c]) < 1e-12);
            }
        }
}

TEST_CASE("split step matches the dense oracle") {
    SUBCASE("one step from |p=0>, M=8") {
        const auto lat = small_lat(8);
        const auto U = dense_floquet_oracle(lat, 7.5);
        auto st = init_state(lat);
        const auto expect = apply_dense(U, st.amps);
        SplitStepPropagator prop(lat);
        prop.step(st, 7.5);
        for (int j = 0; j < 8; ++j)
            CHECK(std::abs(st.amps[size_t(j)] - expect[size_t(j)]) < 1e-12);
    }
    SUBCASE("100 random states, M=32") {
        const auto lat = small_lat(32);
        const auto U = dense_floquet_oracle(lat, 6.1);
        SplitStepPropagator prop(lat);
        std::mt19937_64 rng(5);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            auto st = random_state(32, rng);
            const auto expect = apply_dense(U, st.amps);
            prop.step(st, 6.1);
            for (int j = 0; j < 32; ++j)
                worst = std::max(worst,
                                 std::abs(st.amps[size_t(j)] - expect[size_t(j)]));
        }
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("first kick variance is close to the classical K^2/2") {
    // Dense-oracle-validated split step at large M; the impulse gives
    // <K^2 sin^2 theta> = K^2/2.
    const auto lat = small_lat(1024);
    SplitStepPropagator prop(lat);
    auto st = init_state(lat);
    prop.step(st, 7.5);
    const double v = momentum_variance(st, lat);
    CHECK(v == doctest::Approx(7.5 * 7.5 / 2.0).epsilon(0.15));
}

TEST_CASE("leakage mass") {
    const auto lat = small_lat(64);
    const auto st = init_state(lat);
    CHECK(leakage_mass(st, lat, 0.05) == 0.0);
    const auto lat80 = small_lat(80);   // guard_fraction * M integral
    QuantumState uniform;
    uniform.amps.assign(80, cplx{1.0 / std::sqrt(80.0), 0.0});
    CHECK(leakage_mass(uniform, lat80, 0.1) ==
          doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS(leakage_mass(st, lat, 0.6));
}

TEST_CASE("noiseless distribution stays even in m from |p=0>") {
    const auto lat = small_lat(1024);
    SplitStepPropagator prop(lat);
    auto st = init_state(lat);
    for (int t = 0; t < 40; ++t) {
        prop.step(st, 7.5);
        for (int m = 1; m < 512; ++m)
            CHECK(std::abs(std::norm(st.amplitude(m)) -
                           std::norm(st.amplitude(-m))) < 1e-10);
    }
}

TEST_CASE("norm drift stays below 1e-10 over many composed steps") {
    // Scaled-down version of the 1e4-step M=4096 acceptance run.
    const auto lat = small_lat(512);
    SplitStepPropagator prop(lat);
    auto st = init_state(lat);
    for (int t = 0; t < 2000; ++t) prop.step(st, 7.5);
    CHECK(std::abs(st.norm() - 1.0) < 1e-10);
}
