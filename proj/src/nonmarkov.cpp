#include "ctqw/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ctqw/observables.hpp"
#include "ctqw/rng.hpp"

namespace ctqw {

namespace {

constexpr std::uint64_t kFloorTag = 0x464c4f4f52ull;  // reseeded full-map run
constexpr std::uint64_t kLeg1Tag = 0x4c454731ull;     // evolution up to tau1
constexpr std::uint64_t kLeg2Tag = 0x4c454732ull;     // fresh-noise continuation
constexpr std::uint64_t kRescanTag = 0x524553ull;     // reseeded distance scan

std::vector<Eigen::MatrixXcd> full_map_run(const EvolutionPlan& plan,
                                           const Eigen::MatrixXcd& rho0, std::uint64_t seed,
                                           const EnsembleOptions& options) {
    return evolve_density_fresh_series(plan.config, plan.checkpoints, plan.n_realizations, seed,
                                       rho0, plan.chebyshev_tol, 1e-6, options);
}

CompositionGapSeries gap_against_reference(const EvolutionPlan& plan,
                                           const Eigen::MatrixXcd& rho0, double tau1,
                                           int tau1_index,
                                           const std::vector<Eigen::MatrixXcd>& direct,
                                           const std::vector<Eigen::MatrixXcd>& reseeded,
                                           const EnsembleOptions& options) {
    CompositionGapSeries series;
    series.tau1 = tau1;

    std::vector<int> kept;
    for (int i = 0; i < static_cast<int>(plan.checkpoints.size()); ++i)
        if (plan.checkpoints[i] > tau1) kept.push_back(i);
    if (kept.empty())
        throw std::invalid_argument("tau1 must lie below at least one checkpoint");

    const std::uint64_t leg1_seed = mix_seed(mix_seed(plan.master_seed, kLeg1Tag), tau1_index);
    const std::uint64_t leg2_seed = mix_seed(mix_seed(plan.master_seed, kLeg2Tag), tau1_index);

    const Eigen::MatrixXcd rho_mid =
        evolve_density_fresh(plan.config, tau1, plan.n_realizations, leg1_seed, rho0,
                             plan.chebyshev_tol, 1e-6, options);

    std::vector<double> durations;
    durations.reserve(kept.size());
    for (int i : kept) durations.push_back(plan.checkpoints[i] - tau1);
    const auto composed =
        evolve_density_fresh_series(plan.config, durations, plan.n_realizations, leg2_seed,
                                    rho_mid, plan.chebyshev_tol, 1e-6, options);

    for (std::size_t k = 0; k < kept.size(); ++k) {
        const int i = kept[k];
        series.taus.push_back(plan.checkpoints[i]);
        series.gamma_values.push_back(trace_distance(direct[i], composed[k]));
        series.noise_floor.push_back(trace_distance(direct[i], reseeded[i]));
    }
    return series;
}

void check_gap_preconditions(const EvolutionPlan& plan) {
    plan.validate();
    if (plan.n_realizations < 100)
        throw std::invalid_argument(
            "composition gap needs at least 100 realizations to resolve anything above the "
            "sampling floor");
}

}  // namespace

CompositionGapSeries composition_gap(const EvolutionPlan& plan, const Eigen::MatrixXcd& rho0,
                                     double tau1, const EnsembleOptions& options) {
    check_gap_preconditions(plan);
    if (tau1 < 0.0) throw std::invalid_argument("tau1 must be non-negative");

    const auto direct = full_map_run(plan, rho0, plan.master_seed, options);
    const auto reseeded = full_map_run(plan, rho0, mix_seed(plan.master_seed, kFloorTag), options);
    return gap_against_reference(plan, rho0, tau1, 0, direct, reseeded, options);
}

std::vector<GapMaximum> gap_maximum_vs_tau1(const EvolutionPlan& plan,
                                            const Eigen::MatrixXcd& rho0,
                                            const std::vector<double>& tau1_list,
                                            const EnsembleOptions& options) {
    check_gap_preconditions(plan);
    if (tau1_list.empty()) throw std::invalid_argument("tau1 list must not be empty");
    const double tau_max = plan.checkpoints.back();
    for (double t1 : tau1_list)
        if (t1 < 0.0 || t1 >= tau_max)
            throw std::invalid_argument("every tau1 must lie in [0, tau_max)");

    const auto direct = full_map_run(plan, rho0, plan.master_seed, options);
    const auto reseeded = full_map_run(plan, rho0, mix_seed(plan.master_seed, kFloorTag), options);

    std::vector<GapMaximum> maxima;
    maxima.reserve(tau1_list.size());
    for (int k = 0; k < static_cast<int>(tau1_list.size()); ++k) {
        const auto series = gap_against_reference(plan, rho0, tau1_list[k], k, direct, reseeded,
                                                  options);
        GapMaximum point;
        point.tau1 = series.tau1;
        point.max_gamma =
            *std::max_element(series.gamma_values.begin(), series.gamma_values.end());
        point.max_floor =
            *std::max_element(series.noise_floor.begin(), series.noise_floor.end());
        maxima.push_back(point);
    }
    return maxima;
}

std::vector<double> default_tau1_grid(double tau_max) {
    if (!(tau_max > 0.0)) throw std::invalid_argument("tau_max must be positive");
    std::vector<double> grid;
    for (int k = 1; k <= 5; ++k) grid.push_back(tau_max * k / 10.0);
    return grid;
}

namespace {

struct RevivalReport {
    bool revival = false;
    double max_rise = 0.0;
};

// Scans for a rise above `threshold` that happens after a strict decrease.
RevivalReport detect_revival(const std::vector<double>& d, double threshold) {
    RevivalReport report;
    double prefix_max = -1.0;
    double trough = std::numeric_limits<double>::infinity();
    for (double v : d) {
        if (v < prefix_max) trough = std::min(trough, v);  // a strict decrease happened
        if (trough < std::numeric_limits<double>::infinity())
            report.max_rise = std::max(report.max_rise, v - trough);
        prefix_max = std::max(prefix_max, v);
    }
    report.revival = report.max_rise > threshold;
    return report;
}

}  // namespace

std::vector<BlpSeries> blp_scan(const EvolutionPlan& plan, const std::vector<StatePairSpec>& pairs,
                                double eps_rev, const EnsembleOptions& options) {
    plan.validate();
    if (pairs.empty()) throw std::invalid_argument("pair list must not be empty");
    if (!(eps_rev >= 0.0)) throw std::invalid_argument("eps_rev must be non-negative");

    EvolutionPlan rescan = plan;
    rescan.master_seed = mix_seed(plan.master_seed, kRescanTag);

    std::vector<BlpSeries> result;
    result.reserve(pairs.size());
    for (const auto& pair : pairs) {
        const Eigen::VectorXcd psi1 = pair.state1.build(plan.config.n_sites);
        const Eigen::VectorXcd psi2 = pair.state2.build(plan.config.n_sites);

        const auto rho1 = ensemble_density(plan, psi1, options);
        const auto rho2 = ensemble_density(plan, psi2, options);
        const auto rho1b = ensemble_density(rescan, psi1, options);
        const auto rho2b = ensemble_density(rescan, psi2, options);

        BlpSeries series;
        series.label = pair.label;
        series.taus = plan.checkpoints;
        const int nc = static_cast<int>(plan.checkpoints.size());
        series.distances.resize(nc);
        series.noise_floor.resize(nc);
        for (int c = 0; c < nc; ++c) {
            series.distances[c] = trace_distance(rho1[c], rho2[c]);
            series.noise_floor[c] =
                std::abs(series.distances[c] - trace_distance(rho1b[c], rho2b[c]));
        }
        const double max_floor =
            *std::max_element(series.noise_floor.begin(), series.noise_floor.end());
        series.threshold = std::max(2.0 * max_floor, eps_rev);
        const auto report = detect_revival(series.distances, series.threshold);
        series.revival = report.revival;
        series.max_rise = report.max_rise;
        result.push_back(std::move(series));
    }
    return result;
}

std::vector<StatePairSpec> default_pair_list(int n_sites, double delta, double k0) {
    if (n_sites < 30)
        throw std::invalid_argument("reference pair list needs a lattice of at least 30 sites");
    const int x0 = (n_sites + 1) / 2;
    const double dk = 20.0 * M_PI / n_sites;
    using SD = StateDescriptor;

    std::vector<StatePairSpec> pairs;
    pairs.push_back({"loc-vs-packet", SD::make_localized(x0), SD::make_gaussian(x0, delta, k0)});
    pairs.push_back({"packet-vs-kshift", SD::make_gaussian(x0, delta, k0),
                     SD::make_gaussian(x0, delta, k0 + dk)});
    pairs.push_back({"loc-vs-splitpair", SD::make_localized(x0),
                     SD::make_superposition(x0 + 3, x0 - 3)});
    pairs.push_back({"loc-vs-loc10", SD::make_localized(x0), SD::make_localized(x0 + 10)});
    pairs.push_back({"packet-vs-shifted", SD::make_gaussian(x0, delta, k0),
                     SD::make_gaussian(x0 + 20, delta, k0 + dk)});
    pairs.push_back({"loc-vs-packet6", SD::make_localized(x0),
                     SD::make_gaussian(x0 + 6, delta, k0)});
    return pairs;
}

}  // namespace ctqw
