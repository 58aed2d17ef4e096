#include "ctqw/oracle.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>

namespace ctqw {

BlochSpectrum bloch_spectrum(int n_sites, double epsilon) {
    if (n_sites < 3) throw std::invalid_argument("lattice.n_sites must be at least 3");
    BlochSpectrum spectrum;
    spectrum.thetas.resize(n_sites);
    spectrum.energies.resize(n_sites);
    for (int n = 0; n < n_sites; ++n) {
        const double theta = 2.0 * M_PI * n / n_sites;
        spectrum.thetas[n] = theta;
        spectrum.energies[n] = epsilon - 2.0 * std::cos(theta);
    }
    return spectrum;
}

Eigen::VectorXcd bloch_evolve(const Eigen::VectorXcd& psi0, double tau, double epsilon) {
    const int n = static_cast<int>(psi0.size());
    const auto spectrum = bloch_spectrum(n, epsilon);
    using namespace std::complex_literals;

    // Plane-wave amplitudes c_k = <phi_k|psi0> with phi_k(j) = e^{-i theta j}/sqrt(N).
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        const double theta = spectrum.thetas[k];
        std::complex<double> c = 0.0;
        for (int j = 0; j < n; ++j) c += std::exp(1i * theta * double(j)) * psi0[j] * inv_sqrt_n;
        const std::complex<double> phase = std::exp(-1i * spectrum.energies[k] * tau);
        for (int j = 0; j < n; ++j)
            psi[j] += phase * c * std::exp(-1i * theta * double(j)) * inv_sqrt_n;
    }
    return psi;
}

std::vector<double> bessel_j_array(double x, int max_order) {
    if (max_order < 0) throw std::invalid_argument("bessel order must be non-negative");
    std::vector<double> j(max_order + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    const double ax = std::abs(x);

    // Start the downward recurrence well above both the target order and the
    // turning point |x|, where J_k decays superexponentially.
    int start = std::max(max_order, static_cast<int>(std::ceil(ax)));
    start += 24 + static_cast<int>(8.0 * std::cbrt(ax));
    if (start % 2) ++start;

    double jp = 0.0, jc = 1e-300, norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm = (2.0 * k / ax) * jc - jp;
        jp = jc;
        jc = jm;
        if (k - 1 <= max_order) j[k - 1] = jc;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jc;
        if (std::abs(jc) > 1e250) {
            const double scale = 1e-250;
            jc *= scale;
            jp *= scale;
            norm *= scale;
            for (auto& v : j) v *= scale;
        }
    }
    norm += jc;  // jc now holds the unnormalized J_0
    for (auto& v : j) v /= norm;
    if (x < 0.0)
        for (int k = 1; k <= max_order; k += 2) j[k] = -j[k];
    return j;
}

std::vector<double> bessel_distribution(const std::vector<int>& offsets, double tau) {
    int max_order = 0;
    for (int d : offsets) max_order = std::max(max_order, std::abs(d));
    const auto j = bessel_j_array(2.0 * tau, max_order);
    std::vector<double> p(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const double v = j[std::abs(offsets[i])];
        p[i] = v * v;
    }
    return p;
}

}  // namespace ctqw
