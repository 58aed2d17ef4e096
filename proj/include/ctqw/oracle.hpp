#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctqw/lattice.hpp"

namespace ctqw {

// Closed-form references for the noiseless walk. These deliberately avoid
// the production propagator: evolution goes through the translation
// eigenbasis and Bessel values come from their own recurrence, so the two
// code paths share nothing but the lattice definition.

struct BlochSpectrum {
    std::vector<double> thetas;    // 2 pi n / N
    std::vector<double> energies;  // epsilon - 2 cos(theta)
};

BlochSpectrum bloch_spectrum(int n_sites, double epsilon);

// Exact evolution of psi0 on the noiseless ring for time tau, done by
// projecting on plane waves exp(-i theta j) and rephasing.
Eigen::VectorXcd bloch_evolve(const Eigen::VectorXcd& psi0, double tau, double epsilon);

// J_0(x) .. J_max_order(x) by Miller's downward recurrence, normalized with
// J_0 + 2 sum_k J_{2k} = 1. Accurate to ~1e-13 for the argument sizes used.
std::vector<double> bessel_j_array(double x, int max_order);

// Site distribution of a walker started at one site of an infinite (or
// unwrapped) lattice after time tau: P(offset d) = J_d(2 tau)^2.
std::vector<double> bessel_distribution(const std::vector<int>& offsets, double tau);

}  // namespace ctqw
