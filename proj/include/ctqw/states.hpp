#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ctqw {

// Site indices are 1-based here (site 1 .. n_sites), matching the way walk
// positions are usually quoted; internally everything is 0-based.

// |site>
Eigen::VectorXcd localized_state(int n_sites, int site);

// Gaussian wave packet: amplitudes exp(-(j-center)^2/(4 delta^2)) e^{-i k0 j},
// normalized. delta is the position spread of the resulting probabilities.
Eigen::VectorXcd gaussian_packet(int n_sites, double center, double delta, double k0);

// (|site_a> + |site_b>) / sqrt(2)
Eigen::VectorXcd two_site_superposition(int n_sites, int site_a, int site_b);

// |psi><psi|
Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi);

// Checks Hermiticity (1e-12), unit trace (1e-10) and spectrum >= -1e-10;
// throws std::invalid_argument naming the violated property.
void validate_density(const Eigen::MatrixXcd& rho);

// Eigen-decomposes a density matrix and keeps the leading eigenpairs until
// the discarded weight is at most weight_tol (0 <= weight_tol < 1; weights
// sorted descending, negative eigenvalues clamped to zero). The retained
// weights are returned as-is, so they sum to 1 - (discarded mass).
std::vector<std::pair<double, Eigen::VectorXcd>> spectral_ensemble(const Eigen::MatrixXcd& rho,
                                                                   double weight_tol);

// Textual recipe for an initial state, used by config files and pair specs.
// Forms: localized(51) | gaussian(center=51,delta=4,k0=4.71) |
// superposition(48,54)
struct StateDescriptor {
    enum class Kind { localized, gaussian, superposition };
    Kind kind = Kind::localized;
    int site = 1;                              // localized
    double center = 0.0, delta = 1.0, k0 = 0.0;  // gaussian
    int site_a = 1, site_b = 2;                // superposition

    Eigen::VectorXcd build(int n_sites) const;
    std::string to_string() const;
    static StateDescriptor parse(const std::string& text);

    static StateDescriptor make_localized(int site);
    static StateDescriptor make_gaussian(double center, double delta, double k0);
    static StateDescriptor make_superposition(int site_a, int site_b);
};

}  // namespace ctqw
