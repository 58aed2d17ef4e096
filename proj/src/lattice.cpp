#include "ctqw/lattice.hpp"

#include <stdexcept>

namespace ctqw {

void LatticeConfig::validate() const {
    if (n_sites < 3) throw std::invalid_argument("lattice.n_sites must be at least 3");
    if (a < 0.0) throw std::invalid_argument("lattice.a must be non-negative");
    if (!(gamma > 0.0)) throw std::invalid_argument("lattice.gamma must be positive");
}

SparseHamiltonian::SparseHamiltonian(const LatticeConfig& config) : config_(config) {
    config_.validate();
}

void SparseHamiltonian::apply(const CouplingVector& g, const Eigen::VectorXcd& x,
                              Eigen::VectorXcd& y) const {
    const int n = config_.n_sites;
    const int nl = config_.n_links();
    if (static_cast<int>(g.size()) != nl)
        throw std::invalid_argument("coupling vector length does not match link count");
    if (x.size() != n) throw std::invalid_argument("state dimension does not match lattice");

    y.resize(n);
    const double eps = config_.epsilon;
    y = eps * x;
    for (int l = 0; l < n - 1; ++l) {
        const double hop = -1.0 + g[l];  // noise perturbs the bare -1 coupling additively
        y[l] += hop * x[l + 1];
        y[l + 1] += hop * x[l];
    }
    if (config_.boundary == Boundary::ring) {
        const double hop = -1.0 + g[n - 1];
        y[n - 1] += hop * x[0];
        y[0] += hop * x[n - 1];
    }
}

Eigen::MatrixXcd SparseHamiltonian::dense(const CouplingVector& g) const {
    const int n = config_.n_sites;
    const int nl = config_.n_links();
    if (static_cast<int>(g.size()) != nl)
        throw std::invalid_argument("coupling vector length does not match link count");

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = config_.epsilon;
    for (int l = 0; l < n - 1; ++l) {
        const double hop = -1.0 + g[l];
        h(l, l + 1) = hop;
        h(l + 1, l) = hop;
    }
    if (config_.boundary == Boundary::ring) {
        const double hop = -1.0 + g[n - 1];
        h(n - 1, 0) = hop;
        h(0, n - 1) = hop;
    }
    return h;
}

Eigen::VectorXcd noisy_matvec(const LatticeConfig& config, const CouplingVector& g,
                              const Eigen::VectorXcd& x) {
    SparseHamiltonian h(config);
    Eigen::VectorXcd y;
    h.apply(g, x, y);
    return y;
}

std::string to_string(Boundary b) { return b == Boundary::ring ? "ring" : "line"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "ring") return Boundary::ring;
    if (s == "line") return Boundary::line;
    throw std::invalid_argument("lattice.boundary must be 'ring' or 'line'");
}

}  // namespace ctqw
