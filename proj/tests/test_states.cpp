#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>

#include "ctqw/observables.hpp"
#include "ctqw/states.hpp"

using namespace ctqw;
using Complex = std::complex<double>;

namespace {

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

Eigen::MatrixXcd random_density(int n, int rank, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd b(n, rank);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < rank; ++k) b(j, k) = Complex(dist(gen), dist(gen));
    Eigen::MatrixXcd rho = b * b.adjoint();
    return rho / rho.trace().real();
}

double trace_norm(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST_CASE("localized states are unit basis vectors") {
    const Eigen::VectorXcd psi = localized_state(5, 3);
    for (int j = 0; j < 5; ++j)
        CHECK(psi[j] == (j == 2 ? Complex(1.0) : Complex(0.0)));
    CHECK(localized_state(500, 250)[249] == Complex(1.0));
    CHECK_THROWS_AS(localized_state(5, 0), std::invalid_argument);
    CHECK_THROWS_AS(localized_state(5, 6), std::invalid_argument);
}

TEST_CASE("gaussian packets are normalized and symmetric at zero momentum") {
    const Eigen::VectorXcd psi = gaussian_packet(41, 21.0, 3.0, 0.0);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int d = 1; d <= 15; ++d)
        CHECK(std::abs(std::norm(psi[20 + d]) - std::norm(psi[20 - d])) < 1e-12);
}

TEST_CASE("gaussian packet spread matches the requested delta") {
    const Eigen::VectorXcd psi = gaussian_packet(500, 250.0, 4.0, 1.3);
    std::vector<double> p(500);
    for (int j = 0; j < 500; ++j) p[j] = std::norm(psi[j]);
    const auto moments = position_moments(p);
    CHECK(moments.mean == doctest::Approx(250.0).epsilon(1e-6));
    CHECK(moments.variance == doctest::Approx(16.0).epsilon(0.02));
}

TEST_CASE("a very narrow packet concentrates on the nearest site") {
    const Eigen::VectorXcd psi = gaussian_packet(61, 30.2, 0.1, 0.0);
    CHECK(std::norm(psi[29]) >= 0.99);
}

TEST_CASE("gaussian packet argument validation") {
    CHECK(error_text([] { gaussian_packet(41, 21.0, 0.0, 0.0); }).find("delta") !=
          std::string::npos);
    CHECK(error_text([] { gaussian_packet(41, 21.0, -1.0, 0.0); }).find("delta") !=
          std::string::npos);
    CHECK_THROWS_AS(gaussian_packet(41, 1e6, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("two-site superpositions have the right weights") {
    const Eigen::VectorXcd psi = two_site_superposition(9, 2, 7);
    CHECK(std::abs(psi[1] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(psi[6] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(two_site_superposition(9, 3, 3), std::invalid_argument);
}

TEST_CASE("pure densities are rank-one projectors") {
    const Eigen::MatrixXcd rho1 = pure_density(localized_state(3, 1));
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(3, 3);
    want(0, 0) = 1.0;
    CHECK((rho1 - want).cwiseAbs().maxCoeff() < 1e-15);

    const Eigen::MatrixXcd rho2 = pure_density(two_site_superposition(4, 1, 2));
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(rho2(j, k) - Complex(0.5)) < 1e-15);

    std::mt19937 gen(9);
    std::normal_distribution<double> dist;
    Eigen::VectorXcd psi(12);
    for (int j = 0; j < 12; ++j) psi[j] = Complex(dist(gen), dist(gen));
    psi.normalize();
    const Eigen::MatrixXcd rho = pure_density(psi);
    CHECK(std::abs((rho * rho - rho).cwiseAbs().maxCoeff()) < 1e-12);
    CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-12);
}

TEST_CASE("density validation names the violated property") {
    CHECK_NOTHROW(validate_density(random_density(6, 3, 21)));

    Eigen::MatrixXcd skew = random_density(4, 2, 22);
    skew(0, 1) += Complex(0.0, 1e-3);
    CHECK(error_text([&] { validate_density(skew); }).find("Hermitian") != std::string::npos);

    const Eigen::MatrixXcd scaled = 1.5 * random_density(4, 2, 23);
    CHECK(error_text([&] { validate_density(scaled); }).find("trace") != std::string::npos);

    Eigen::MatrixXcd indefinite = Eigen::MatrixXcd::Zero(2, 2);
    indefinite(0, 0) = 1.2;
    indefinite(1, 1) = -0.2;
    CHECK(!error_text([&] { validate_density(indefinite); }).empty());
}

TEST_CASE("spectral decomposition of a pure state is a single eigenpair") {
    const Eigen::VectorXcd psi = gaussian_packet(31, 16.0, 3.0, 0.7);
    const auto ensemble = spectral_ensemble(pure_density(psi), 1e-6);
    REQUIRE(ensemble.size() == 1);
    CHECK(ensemble[0].first == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(std::abs(ensemble[0].second.dot(psi)) - 1.0) < 1e-10);
}

TEST_CASE("spectral decomposition of the maximally mixed state keeps all pairs") {
    const int n = 8;
    const Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(n, n) / double(n);
    const auto ensemble = spectral_ensemble(rho, 0.0);
    REQUIRE(ensemble.size() == std::size_t(n));
    for (const auto& [w, v] : ensemble) {
        CHECK(w == doctest::Approx(1.0 / n).epsilon(1e-12));
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("spectral decomposition reconstructs the density within tolerance") {
    const Eigen::MatrixXcd rho = random_density(10, 10, 31);
    const auto ensemble = spectral_ensemble(rho, 1e-6);
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(10, 10);
    for (const auto& [w, v] : ensemble) rebuilt += w * (v * v.adjoint());
    CHECK(trace_norm(rho - rebuilt) <= 1e-6);
    CHECK_THROWS_AS(spectral_ensemble(rho, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral_ensemble(rho, -0.1), std::invalid_argument);
}

TEST_CASE("state descriptors round-trip through text") {
    for (const char* text : {"localized(51)", "gaussian(center=51,delta=4,k0=4.71)",
                             "superposition(48,54)"}) {
        const auto desc = StateDescriptor::parse(text);
        CHECK(StateDescriptor::parse(desc.to_string()).to_string() == desc.to_string());
    }

    const auto loc = StateDescriptor::make_localized(7);
    CHECK((loc.build(11) - localized_state(11, 7)).norm() < 1e-15);

    const auto gauss = StateDescriptor::make_gaussian(26.0, 3.0, 1.1);
    CHECK((gauss.build(51) - gaussian_packet(51, 26.0, 3.0, 1.1)).norm() < 1e-15);

    const auto sup = StateDescriptor::make_superposition(3, 9);
    CHECK((sup.build(11) - two_site_superposition(11, 3, 9)).norm() < 1e-15);

    CHECK_THROWS_AS(StateDescriptor::parse("plane_wave(3)"), std::invalid_argument);
    CHECK_THROWS_AS(StateDescriptor::parse("gaussian(center=51)"), std::invalid_argument);
    CHECK_THROWS_AS(StateDescriptor::parse("localized(x)"), std::invalid_argument);
}
