#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ctqw/lattice.hpp"
#include "ctqw/observables.hpp"
#include "ctqw/oracle.hpp"
#include "ctqw/states.hpp"

using namespace ctqw;

namespace {

Eigen::MatrixXcd random_density(int n, int rank, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd b(n, rank);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < rank; ++k) b(j, k) = Complex(dist(gen), dist(gen));
    Eigen::MatrixXcd rho = b * b.adjoint();
    return rho / rho.trace().real();
}

// Normal density sampled on sites 1..n, centered mid-lattice.
std::vector<double> discretized_normal(int n, double sigma) {
    std::vector<double> p(n);
    const double center = (n + 1) / 2;
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        p[j - 1] = std::exp(-(j - center) * (j - center) / (2.0 * sigma * sigma));
        sum += p[j - 1];
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace

TEST_CASE("site distributions come from the density diagonal") {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.5;
    rho(2, 2) = 0.3;
    rho(0, 2) = rho(2, 0) = 0.1;  // off-diagonals must not matter
    const auto p = site_distribution(rho);
    CHECK(p[0] == 0.2);
    CHECK(p[1] == 0.5);
    CHECK(p[2] == 0.3);

    const Eigen::MatrixXcd maximally_mixed = Eigen::MatrixXcd::Identity(8, 8) / 8.0;
    const auto uniform = site_distribution(maximally_mixed);
    for (double v : uniform) CHECK(v == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("tiny negative diagonal weight is clamped, real negativity rejected") {
    Eigen::VectorXd diag(4);
    diag << 0.6, 0.4, -1e-13, 1e-13;
    const auto p = site_distribution(diag);
    CHECK(p[2] == 0.0);
    CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(1.0).epsilon(1e-12));

    diag << 0.6, 0.4, -1e-3, 1e-3;
    CHECK_THROWS_AS(site_distribution(diag), std::invalid_argument);

    diag << 0.5, 0.4, 0.0, 0.0;  // mass missing
    CHECK_THROWS_AS(site_distribution(diag), std::invalid_argument);
}

TEST_CASE("position moments of simple distributions") {
    std::vector<double> delta(9, 0.0);
    delta[4] = 1.0;
    const auto m1 = position_moments(delta);
    CHECK(m1.mean == 5.0);
    CHECK(m1.variance == 0.0);

    const int n = 100;
    const auto m2 = position_moments(std::vector<double>(n, 1.0 / n));
    CHECK(m2.mean == doctest::Approx((n + 1) / 2.0).epsilon(1e-12));
    CHECK(m2.variance == doctest::Approx((n * n - 1) / 12.0).epsilon(1e-12));
}

TEST_CASE("noiseless walk variance is ballistic") {
    const int n = 201;
    const double tau = 10.0;
    const Eigen::VectorXcd psi = bloch_evolve(localized_state(n, 101), tau, 2.0);
    std::vector<double> p(n);
    for (int j = 0; j < n; ++j) p[j] = std::norm(psi[j]);
    const auto moments = position_moments(p);
    CHECK(moments.mean == doctest::Approx(101.0).epsilon(1e-9));
    CHECK(moments.variance == doctest::Approx(2.0 * tau * tau).epsilon(0.001));
}

TEST_CASE("negentropy of a wide discretized normal is negligible") {
    CHECK(std::abs(negentropy(discretized_normal(500, 20.0))) < 1e-3);
}

TEST_CASE("negentropy deviation shrinks as the normal gets wider") {
    // Narrow densities feel the lattice discreteness (the deviation is
    // slightly negative there); by sigma of a few sites it is zero to
    // rounding. The magnitude must never grow with sigma.
    const std::vector<double> sigmas = {0.5, 0.75, 1.0, 5.0, 10.0, 20.0, 40.0};
    std::vector<double> magnitude;
    for (double sigma : sigmas) {
        const int n = std::max(500, int(16.0 * sigma) + 1);
        magnitude.push_back(std::abs(negentropy(discretized_normal(n, sigma))));
    }
    CHECK(magnitude[0] > 1e-3);   // discreteness is visible at half-site spread
    CHECK(magnitude[2] < 1e-6);   // and gone by one site
    for (std::size_t k = 1; k < magnitude.size(); ++k)
        CHECK(magnitude[k] <= magnitude[k - 1] + 1e-12);
}

TEST_CASE("negentropy of the uniform distribution matches the closed form") {
    const int m = 100;
    const double want =
        0.5 * (1.0 + std::log(2.0 * M_PI * (m * m - 1) / 12.0)) - std::log(double(m));
    CHECK(negentropy(std::vector<double>(m, 1.0 / m)) == doctest::Approx(want).epsilon(1e-12));
    CHECK(want == doctest::Approx(0.1764).epsilon(1e-2));
}

TEST_CASE("the noiseless walker is strongly non-Gaussian at late times") {
    const double tau = 30.0;
    std::vector<int> offsets;
    for (int d = -100; d <= 100; ++d) offsets.push_back(d);
    CHECK(negentropy(bessel_distribution(offsets, tau)) > 0.3);
}

TEST_CASE("negentropy rejects zero-variance distributions") {
    std::vector<double> delta(5, 0.0);
    delta[2] = 1.0;
    CHECK_THROWS_AS(negentropy(delta), std::domain_error);
}

TEST_CASE("l1 coherence of reference states") {
    CHECK(coherence_l1(Eigen::MatrixXcd::Identity(6, 6) / 6.0) == 0.0);
    CHECK(coherence_l1(pure_density(two_site_superposition(5, 1, 2))) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const int n = 11;
    Eigen::VectorXcd uniform = Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
    CHECK(coherence_l1(pure_density(uniform)) == doctest::Approx(n - 1.0).epsilon(1e-12));
}

TEST_CASE("coherence vanishes only on diagonal states") {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
    rho(0, 0) = 0.4;
    rho(1, 1) = 0.6;
    CHECK(coherence_l1(rho) == 0.0);
    rho(0, 1) = rho(1, 0) = 1e-6;
    CHECK(coherence_l1(rho) >= 2e-6);
}

TEST_CASE("trace distance of reference pairs") {
    const Eigen::MatrixXcd rho = random_density(5, 2, 77);
    CHECK(trace_distance(rho, rho) == 0.0);

    CHECK(trace_distance(pure_density(localized_state(4, 1)),
                         pure_density(localized_state(4, 3))) ==
          doctest::Approx(1.0).epsilon(1e-14));

    Eigen::MatrixXcd d1 = Eigen::MatrixXcd::Zero(2, 2), d2 = d1;
    d1(0, 0) = 0.7;
    d1(1, 1) = 0.3;
    d2(0, 0) = 0.4;
    d2(1, 1) = 0.6;
    CHECK(trace_distance(d1, d2) == doctest::Approx(0.3).epsilon(1e-14));

    CHECK_THROWS_AS(trace_distance(d1, random_density(3, 2, 5)), std::invalid_argument);
}

TEST_CASE("trace distance is a metric") {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const auto a = random_density(6, 3, 100 + seed);
        const auto b = random_density(6, 3, 200 + seed);
        const auto c = random_density(6, 3, 300 + seed);
        const double dab = trace_distance(a, b);
        const double dba = trace_distance(b, a);
        const double dbc = trace_distance(b, c);
        const double dac = trace_distance(a, c);
        CHECK(std::abs(dab - dba) < 1e-14);
        CHECK(dab >= 0.0);
        CHECK(dab <= 1.0);
        CHECK(dab + dbc >= dac - 1e-12);
    }
}

TEST_CASE("trace distance is unitarily invariant") {
    const int n = 16;
    LatticeConfig cfg;
    cfg.n_sites = n;
    cfg.gamma = 1.0;
    SparseHamiltonian h(cfg);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense(h.zero_couplings()));
    Eigen::VectorXcd phases(n);
    for (int k = 0; k < n; ++k) phases[k] = std::exp(Complex(0.0, -es.eigenvalues()[k] * 2.3));
    const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    const auto rho = random_density(n, 4, 11);
    const auto sigma = random_density(n, 4, 12);
    const double before = trace_distance(rho, sigma);
    const double after = trace_distance(u * rho * u.adjoint(), u * sigma * u.adjoint());
    CHECK(std::abs(before - after) < 1e-10);
}

TEST_CASE("crossover fit recovers a synthetic quadratic-to-linear series") {
    std::vector<double> taus, values;
    for (double tau = 0.5; tau <= 40.0 + 1e-9; tau += 0.5) {
        taus.push_back(tau);
        values.push_back(tau < 8.0 ? 2.0 * tau * tau : 16.0 * tau);
    }
    const auto fit = fit_crossover(taus, values);
    CHECK(fit.exponent_early == doctest::Approx(2.0).epsilon(0.02));
    CHECK(fit.exponent_late == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fit.tau_c > 5.0);
    CHECK(fit.tau_c < 12.0);
    CHECK(fit.residual < 1e-3);
}

TEST_CASE("crossover fit input validation") {
    CHECK_THROWS_AS(fit_crossover({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}), std::invalid_argument);
    CHECK_THROWS_AS(fit_crossover({1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_crossover({1, 2, 3}, {1, 2}), std::invalid_argument);
}
