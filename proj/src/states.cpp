#include "ctqw/states.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

namespace ctqw {

Eigen::VectorXcd localized_state(int n_sites, int site) {
    if (n_sites < 1) throw std::invalid_argument("state dimension must be positive");
    if (site < 1 || site > n_sites)
        throw std::invalid_argument("localized site out of range 1..n_sites");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_sites);
    psi[site - 1] = 1.0;
    return psi;
}

Eigen::VectorXcd gaussian_packet(int n_sites, double center, double delta, double k0) {
    if (n_sites < 1) throw std::invalid_argument("state dimension must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("packet delta must be positive");

    Eigen::VectorXcd psi(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        const double j = i + 1.0;
        const double envelope = std::exp(-(j - center) * (j - center) / (4.0 * delta * delta));
        psi[i] = envelope * std::exp(std::complex<double>(0.0, -k0 * j));
    }
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("packet envelope vanishes on the lattice");
    return psi / norm;
}

Eigen::VectorXcd two_site_superposition(int n_sites, int site_a, int site_b) {
    if (site_a == site_b) throw std::invalid_argument("superposition sites must differ");
    Eigen::VectorXcd psi = localized_state(n_sites, site_a) + localized_state(n_sites, site_b);
    return psi / std::sqrt(2.0);
}

Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-10)
        throw std::invalid_argument("pure state must be normalized");
    return psi * psi.adjoint();
}

void validate_density(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw std::invalid_argument("density matrix not Hermitian within 1e-12");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
        throw std::invalid_argument("density matrix trace differs from 1 by more than 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("density matrix has an eigenvalue below -1e-10");
}

std::vector<std::pair<double, Eigen::VectorXcd>> spectral_ensemble(const Eigen::MatrixXcd& rho,
                                                                   double weight_tol) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    if (weight_tol < 0.0 || weight_tol >= 1.0)
        throw std::invalid_argument("weight_tol must lie in [0, 1)");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw std::invalid_argument("density matrix not Hermitian within 1e-12");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    const int n = static_cast<int>(values.size());

    // Eigen sorts ascending; walk from the top until the rest is discardable.
    std::vector<std::pair<double, Eigen::VectorXcd>> ensemble;
    double kept = 0.0;
    const double total = values.cwiseMax(0.0).sum();
    for (int i = n - 1; i >= 0; --i) {
        const double w = std::max(0.0, values[i]);
        if (w == 0.0) break;
        if (total - kept <= weight_tol) break;
        ensemble.emplace_back(w, vectors.col(i));
        kept += w;
    }
    return ensemble;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// splits "a,b,c" into trimmed tokens
std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        std::string tok = s.substr(pos, comma - pos);
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

Eigen::VectorXcd StateDescriptor::build(int n_sites) const {
    switch (kind) {
        case Kind::localized:
            return localized_state(n_sites, site);
        case Kind::gaussian:
            return gaussian_packet(n_sites, center, delta, k0);
        case Kind::superposition:
            return two_site_superposition(n_sites, site_a, site_b);
    }
    throw std::logic_error("unreachable");
}

std::string StateDescriptor::to_string() const {
    switch (kind) {
        case Kind::localized:
            return "localized(" + std::to_string(site) + ")";
        case Kind::gaussian:
            return "gaussian(center=" + format_double(center) + ",delta=" + format_double(delta) +
                   ",k0=" + format_double(k0) + ")";
        case Kind::superposition:
            return "superposition(" + std::to_string(site_a) + "," + std::to_string(site_b) + ")";
    }
    throw std::logic_error("unreachable");
}

StateDescriptor StateDescriptor::parse(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("state descriptor must look like kind(...): " + text);
    const std::string name = text.substr(0, open);
    const auto args = split_args(text.substr(open + 1, close - open - 1));

    StateDescriptor d;
    if (name == "localized") {
        if (args.size() != 1)
            throw std::invalid_argument("localized() takes exactly one site index");
        d.kind = Kind::localized;
        d.site = std::stoi(args[0]);
    } else if (name == "gaussian") {
        d.kind = Kind::gaussian;
        bool has_center = false, has_delta = false, has_k0 = false;
        for (const auto& arg : args) {
            const auto eq = arg.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("gaussian() takes key=value arguments");
            const std::string key = arg.substr(0, eq);
            const double val = std::stod(arg.substr(eq + 1));
            if (key == "center") {
                d.center = val;
                has_center = true;
            } else if (key == "delta") {
                d.delta = val;
                has_delta = true;
            } else if (key == "k0") {
                d.k0 = val;
                has_k0 = true;
            } else {
                throw std::invalid_argument("unknown gaussian() argument: " + key);
            }
        }
        if (!has_center || !has_delta || !has_k0)
            throw std::invalid_argument("gaussian() needs center, delta and k0");
    } else if (name == "superposition") {
        if (args.size() != 2)
            throw std::invalid_argument("superposition() takes exactly two site indices");
        d.kind = Kind::superposition;
        d.site_a = std::stoi(args[0]);
        d.site_b = std::stoi(args[1]);
    } else {
        throw std::invalid_argument("unknown state descriptor kind: " + name);
    }
    return d;
}

StateDescriptor StateDescriptor::make_localized(int site) {
    StateDescriptor d;
    d.kind = Kind::localized;
    d.site = site;
    return d;
}

StateDescriptor StateDescriptor::make_gaussian(double center, double delta, double k0) {
    StateDescriptor d;
    d.kind = Kind::gaussian;
    d.center = center;
    d.delta = delta;
    d.k0 = k0;
    return d;
}

StateDescriptor StateDescriptor::make_superposition(int site_a, int site_b) {
    StateDescriptor d;
    d.kind = Kind::superposition;
    d.site_a = site_a;
    d.site_b = site_b;
    return d;
}

}  // namespace ctqw
