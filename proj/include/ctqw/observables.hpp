#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ctqw {

// Probability distribution over sites extracted from a density matrix
// diagonal. Entries below zero by at most 1e-12 are clamped (anything more
// negative throws); the distribution is renormalized if clamping occurred.
std::vector<double> site_distribution(const Eigen::MatrixXcd& rho);
std::vector<double> site_distribution(const Eigen::VectorXd& diagonal);

struct PositionMoments {
    double mean = 0.0;      // 1-based site coordinate
    double variance = 0.0;
};

PositionMoments position_moments(const std::vector<double>& distribution);

// Differential-entropy deficit relative to a Gaussian of equal variance:
//   0.5 (1 + log(2 pi var)) + sum_j p_j log p_j
// Zero-probability sites contribute nothing; zero variance is an error.
double negentropy(const std::vector<double>& distribution);

// l1 coherence: sum of |rho_jk| over all off-diagonal pairs.
double coherence_l1(const Eigen::MatrixXcd& rho);

// Trace distance (1/2)||rho1 - rho2||_1, clamped into [0, 1].
double trace_distance(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2);

struct CrossoverFit {
    double tau_c = 0.0;        // abscissa where the two power-law segments meet
    double exponent_early = 0.0;
    double exponent_late = 0.0;
    double residual = 0.0;     // total squared log-log residual
};

// Two-piece power-law fit of series(tau): segmented least squares in log-log
// coordinates — two lines constrained to meet at a free breakpoint, which is
// chosen (continuously, at least three points strictly on each side) to
// minimize the total squared residual. Times must be strictly increasing.
CrossoverFit fit_crossover(const std::vector<double>& taus, const std::vector<double>& values);

}  // namespace ctqw
