#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/propagator.hpp"
#include "ctqw/states.hpp"

namespace ctqw {

// Composition-equality gap: how far the ensemble map is from obeying
// T(tau, 0) = T(tau, tau1) T(tau1, 0). A memoryless (divisible) evolution
// keeps the gap at the Monte Carlo noise level.
struct CompositionGapSeries {
    double tau1 = 0.0;
    std::vector<double> taus;          // the plan checkpoints above tau1
    std::vector<double> gamma_values;  // trace distance direct vs composed
    std::vector<double> noise_floor;   // trace distance between reseeded direct runs
};

// Direct evolution uses plan.master_seed; the split legs and the floor run
// use seeds derived from it, so every ensemble involved is statistically
// independent. Requires n_realizations >= 100 and tau1 below the first
// checkpoint time that should enter the series... any checkpoint <= tau1 is
// excluded; at least one must remain.
CompositionGapSeries composition_gap(const EvolutionPlan& plan, const Eigen::MatrixXcd& rho0,
                                     double tau1, const EnsembleOptions& options = {});

struct GapMaximum {
    double tau1 = 0.0;
    double max_gamma = 0.0;
    double max_floor = 0.0;
};

// Maximum of the gap series per tau1. The direct and floor runs are shared
// across the tau1 values.
std::vector<GapMaximum> gap_maximum_vs_tau1(const EvolutionPlan& plan,
                                            const Eigen::MatrixXcd& rho0,
                                            const std::vector<double>& tau1_list,
                                            const EnsembleOptions& options = {});

// 5 evenly spaced split times in (0, tau_max/2].
std::vector<double> default_tau1_grid(double tau_max);

struct StatePairSpec {
    std::string label;
    StateDescriptor state1;
    StateDescriptor state2;
};

struct BlpSeries {
    std::string label;
    std::vector<double> taus;
    std::vector<double> distances;    // D(rho1(tau), rho2(tau)), shared noise
    std::vector<double> noise_floor;  // |D - D'| against a reseeded rerun
    bool revival = false;             // rise above threshold after a strict decrease
    double max_rise = 0.0;            // largest post-decrease rise found
    double threshold = 0.0;           // max(2 * max noise_floor, eps_rev)
};

// Trace-distance scan for information backflow: both members of a pair are
// evolved under the identical realization set (same master seed), so common
// sampling error cancels in the distance. A second scan under a derived
// seed provides the per-checkpoint noise floor.
std::vector<BlpSeries> blp_scan(const EvolutionPlan& plan,
                                const std::vector<StatePairSpec>& pairs, double eps_rev = 0.01,
                                const EnsembleOptions& options = {});

// The six reference pairs (centered on site (N+1)/2, packet width delta,
// momentum k0; the momentum offset is 20 pi / N).
std::vector<StatePairSpec> default_pair_list(int n_sites, double delta = 4.0,
                                             double k0 = 4.71238898038468985769);

}  // namespace ctqw
