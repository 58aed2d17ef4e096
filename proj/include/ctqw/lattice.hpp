#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ctqw {

using Complex = std::complex<double>;

enum class Boundary { ring, line };

// Static description of the 1-D lattice and its noise parameters, in units
// of the mean tunneling amplitude (time is measured in those units too, so
// gamma is the switching rate per unit rescaled time).
struct LatticeConfig {
    int n_sites = 0;
    Boundary boundary = Boundary::ring;
    double epsilon = 2.0;  // uniform on-site energy
    double a = 0.0;        // telegraph coupling strength, g_j(t) in {+a,-a}
    double gamma = 1.0;    // telegraph switching rate

    int n_links() const { return boundary == Boundary::ring ? n_sites : n_sites - 1; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Instantaneous noise values, one per link. Link l couples sites l and l+1
// (the ring closes with link n_sites-1 coupling the last site back to 0).
using CouplingVector = std::vector<double>;

// Nearest-neighbour Hamiltonian H = eps*I + sum_l (-1 + g_l) (|l><l+1| + h.c.)
// held in banded form. g defaults to zero everywhere (the noiseless walk).
class SparseHamiltonian {
  public:
    SparseHamiltonian(const LatticeConfig& config);

    const LatticeConfig& config() const { return config_; }
    int size() const { return config_.n_sites; }

    // y = H x with the supplied instantaneous couplings. O(N).
    void apply(const CouplingVector& g, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

    // Dense copy, mainly for small-system cross-checks.
    Eigen::MatrixXcd dense(const CouplingVector& g) const;

    CouplingVector zero_couplings() const { return CouplingVector(config_.n_links(), 0.0); }

  private:
    LatticeConfig config_;
};

// y = H x without constructing the operator.
Eigen::VectorXcd noisy_matvec(const LatticeConfig& config, const CouplingVector& g,
                              const Eigen::VectorXcd& x);

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

}  // namespace ctqw
