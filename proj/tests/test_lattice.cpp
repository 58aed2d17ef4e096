#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>

#include "ctqw/lattice.hpp"
#include "ctqw/propagator.hpp"

using namespace ctqw;

namespace {

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

LatticeConfig ring_config(int n, double epsilon = 2.0, double a = 0.0, double gamma = 1.0) {
    LatticeConfig c;
    c.n_sites = n;
    c.boundary = Boundary::ring;
    c.epsilon = epsilon;
    c.a = a;
    c.gamma = gamma;
    return c;
}

Eigen::VectorXcd random_state(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(dist(gen), dist(gen));
    v.normalize();
    return v;
}

}  // namespace

TEST_CASE("lattice validation names the offending field") {
    LatticeConfig c = ring_config(2);
    CHECK(error_text([&] { c.validate(); }).find("n_sites") != std::string::npos);
    c = ring_config(5);
    c.a = -0.1;
    CHECK(error_text([&] { c.validate(); }).find("lattice.a") != std::string::npos);
    c = ring_config(5);
    c.gamma = 0.0;
    CHECK(error_text([&] { c.validate(); }).find("gamma") != std::string::npos);
    CHECK_NOTHROW(ring_config(3).validate());
}

TEST_CASE("three-site noiseless matrices match the closed forms") {
    SparseHamiltonian ring(ring_config(3, 2.0));
    const Eigen::MatrixXcd h = ring.dense(ring.zero_couplings());
    Eigen::MatrixXcd want(3, 3);
    want << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK((h - want).cwiseAbs().maxCoeff() == 0.0);

    LatticeConfig line_cfg = ring_config(3, 0.0);
    line_cfg.boundary = Boundary::line;
    SparseHamiltonian line(line_cfg);
    const Eigen::MatrixXcd hl = line.dense(line.zero_couplings());
    Eigen::MatrixXcd want_line(3, 3);
    want_line << 0, -1, 0, -1, 0, -1, 0, -1, 0;
    CHECK((hl - want_line).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eight-site ring spectrum is epsilon minus two cosine") {
    SparseHamiltonian h(ring_config(8, 2.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense(h.zero_couplings()));
    std::vector<double> want;
    for (int k = 0; k < 8; ++k) want.push_back(2.0 - 2.0 * std::cos(2.0 * M_PI * k / 8.0));
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 8; ++k) CHECK(es.eigenvalues()[k] == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("zero couplings reproduce the bare Hamiltonian action") {
    const LatticeConfig cfg = ring_config(9, 2.0);
    const Eigen::VectorXcd x = random_state(9, 11);
    const Eigen::VectorXcd y = noisy_matvec(cfg, CouplingVector(9, 0.0), x);
    for (int i = 0; i < 9; ++i) {
        const Complex want = 2.0 * x[i] - x[(i + 8) % 9] - x[(i + 1) % 9];
        CHECK(std::abs(y[i] - want) < 1e-15);
    }
}

TEST_CASE("uniform positive coupling shifts each hop to -1 + a") {
    const double a = 0.35;
    const LatticeConfig cfg = ring_config(3, 0.0, a, 1.0);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
    psi[0] = 1.0;
    const Eigen::VectorXcd y = noisy_matvec(cfg, CouplingVector(3, a), psi);
    CHECK(std::abs(y[0]) < 1e-15);
    CHECK(std::abs(y[1] - Complex(-1.0 + a)) < 1e-15);
    CHECK(std::abs(y[2] - Complex(-1.0 + a)) < 1e-15);
}

TEST_CASE("banded application agrees with the dense matrix") {
    std::mt19937 gen(7);
    std::bernoulli_distribution coin;
    for (Boundary b : {Boundary::ring, Boundary::line}) {
        LatticeConfig cfg = ring_config(10, 2.0, 0.8, 1.0);
        cfg.boundary = b;
        SparseHamiltonian h(cfg);
        CouplingVector g(cfg.n_links());
        for (auto& gl : g) gl = coin(gen) ? 0.8 : -0.8;
        const Eigen::VectorXcd x = random_state(10, 23);
        Eigen::VectorXcd y;
        h.apply(g, x, y);
        const Eigen::VectorXcd want = h.dense(g) * x;
        CHECK((y - want).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("every coupling pattern yields a Hermitian operator") {
    const LatticeConfig cfg = ring_config(12, 2.0, 0.9, 1.0);
    SparseHamiltonian h(cfg);
    std::mt19937 gen(3);
    std::bernoulli_distribution coin;
    for (int trial = 0; trial < 4; ++trial) {
        CouplingVector g(cfg.n_links());
        for (auto& gl : g) gl = coin(gen) ? 0.9 : -0.9;
        const Eigen::VectorXcd x = random_state(12, 100 + trial);
        const Eigen::VectorXcd w = random_state(12, 200 + trial);
        Eigen::VectorXcd hx, hw;
        h.apply(g, x, hx);
        h.apply(g, w, hw);
        CHECK(std::abs(w.dot(hx) - hw.dot(x)) < 1e-14);
    }
}

TEST_CASE("bare and noise parts do not commute for uneven couplings") {
    SparseHamiltonian h(ring_config(6, 2.0, 0.9, 1.0));
    const Eigen::MatrixXcd h0 = h.dense(h.zero_couplings());
    CouplingVector g = {0.9, -0.9, 0.9, 0.9, -0.9, -0.9};
    const Eigen::MatrixXcd v = h.dense(g) - h0;
    const Eigen::MatrixXcd comm = h0 * v - v * h0;
    CHECK(comm.cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("on-site energy shift only changes a global phase") {
    const double dt = 1.7;
    const Eigen::VectorXcd psi0 = random_state(16, 5);
    std::mt19937 gen(17);
    std::bernoulli_distribution coin;
    CouplingVector g(16);
    for (auto& gl : g) gl = coin(gen) ? 0.7 : -0.7;

    LatticeConfig c0 = ring_config(16, 0.0, 0.7, 1.0);
    LatticeConfig c2 = ring_config(16, 2.0, 0.7, 1.0);
    const Eigen::VectorXcd out0 = interval_propagate(SparseHamiltonian(c0), g, psi0, dt, 1e-12);
    const Eigen::VectorXcd out2 = interval_propagate(SparseHamiltonian(c2), g, psi0, dt, 1e-12);

    const Complex phase = std::exp(Complex(0.0, -2.0 * dt));
    CHECK((out2 - phase * out0).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < 16; ++i)
        CHECK(std::abs(std::norm(out2[i]) - std::norm(out0[i])) < 1e-12);
}

TEST_CASE("boundary names round-trip") {
    CHECK(to_string(Boundary::ring) == "ring");
    CHECK(to_string(Boundary::line) == "line");
    CHECK(boundary_from_string("ring") == Boundary::ring);
    CHECK(boundary_from_string("line") == Boundary::line);
    CHECK(error_text([] { boundary_from_string("torus"); }).find("boundary") !=
          std::string::npos);
}
