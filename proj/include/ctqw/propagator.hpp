#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/lattice.hpp"
#include "ctqw/noise.hpp"

namespace ctqw {

// Raised when a propagation tolerance cannot be met (stiff interval, absurd
// tolerance request). Mapped to a dedicated exit code by the CLI.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Everything needed to reproduce one ensemble evolution.
struct EvolutionPlan {
    LatticeConfig config;
    std::vector<double> checkpoints;  // non-negative, strictly increasing
    int n_realizations = 1000;
    std::uint64_t master_seed = 0;
    double chebyshev_tol = 1e-10;  // norm-error budget for one full trajectory

    void validate() const;
};

struct EnsembleOptions {
    // Worker threads. Results are bit-identical for any value: realizations
    // are grouped into fixed blocks and partial sums are folded in block
    // order no matter which worker finishes first.
    int threads = 1;
    int block_size = 8;
    int batch_count = 10;  // contiguous realization batches for error bars
};

// Chebyshev coefficients c_k = (2 - delta_k0) (-i)^k J_k(z) for
// exp(-i z x) on x in [-1, 1], truncated once the rigorous tail bound
// sum_{k>K} 2 (z/2)^k / k! drops below tol. Returns the term count.
// Throws NumericalError if tol is unreachable within the term cap.
int chebyshev_terms(double z, double tol, std::vector<std::complex<double>>& coeffs);

// exp(-i dt H) psi for the instantaneous couplings g, exact to tol in norm.
Eigen::VectorXcd interval_propagate(const SparseHamiltonian& h, const CouplingVector& g,
                                    const Eigen::VectorXcd& psi, double dt, double tol);

// The telegraph trajectories (one per link) that realization r of a plan
// experiences. Deterministic in (master_seed, r, link).
std::vector<TelegraphTrajectory> sample_realization_trajectories(const LatticeConfig& config,
                                                                 double t_max,
                                                                 std::uint64_t master_seed,
                                                                 int realization_index);

struct TrajectoryResult {
    std::vector<Eigen::VectorXcd> states;  // one per checkpoint
};

// Evolves one pure state through one noise realization, recording the state
// at every checkpoint.
TrajectoryResult evolve_realization(const EvolutionPlan& plan, const Eigen::VectorXcd& psi0,
                                    int realization_index);

// Scalar observable evaluated on batch means; density is null for runs that
// only accumulate site weights.
using BatchObservable = std::function<double(int checkpoint_index,
                                             const Eigen::VectorXd& site_weights,
                                             const Eigen::MatrixXcd* density)>;

struct EnsembleSpec {
    EvolutionPlan plan;
    // Initial n_sites x m block; column c carries sqrt(weight_c) * state_c.
    // For a pure state this is just the state itself as a single column.
    Eigen::MatrixXcd initial_block;
    bool want_density = false;
    EnsembleOptions options;
    std::vector<std::pair<std::string, BatchObservable>> batch_observables;
};

struct BatchScalarSeries {
    std::string name;
    std::vector<std::vector<double>> values;  // [batch][checkpoint]
};

struct EnsembleAccumulation {
    // Ensemble means over all realizations, one entry per checkpoint.
    std::vector<Eigen::VectorXd> site_weights;
    std::vector<Eigen::MatrixXcd> densities;  // filled when want_density
    std::vector<BatchScalarSeries> batch_series;
    std::vector<int> batch_counts;  // realizations per batch
};

EnsembleAccumulation run_ensemble(const EnsembleSpec& spec);

// Standard error of the mean from batch means (unweighted; batches differ
// by at most one block).
std::vector<double> batch_standard_error(const BatchScalarSeries& series);

// Ensemble-averaged density matrix at every checkpoint for a pure start.
std::vector<Eigen::MatrixXcd> ensemble_density(const EvolutionPlan& plan,
                                               const Eigen::VectorXcd& psi0,
                                               const EnsembleOptions& options = {});

// One application of the averaged evolution map over fresh noise: decomposes
// rho_in spectrally (discarding at most weight_tol of its mass, then
// renormalizing so the map stays trace preserving), evolves every retained
// eigenvector under the same fresh realizations, and averages. durations may
// hold several values; one density per duration is returned.
std::vector<Eigen::MatrixXcd> evolve_density_fresh_series(
    const LatticeConfig& config, const std::vector<double>& durations, int n_realizations,
    std::uint64_t seed, const Eigen::MatrixXcd& rho_in, double chebyshev_tol = 1e-10,
    double weight_tol = 1e-6, const EnsembleOptions& options = {});

Eigen::MatrixXcd evolve_density_fresh(const LatticeConfig& config, double duration,
                                      int n_realizations, std::uint64_t seed,
                                      const Eigen::MatrixXcd& rho_in,
                                      double chebyshev_tol = 1e-10, double weight_tol = 1e-6,
                                      const EnsembleOptions& options = {});

}  // namespace ctqw
