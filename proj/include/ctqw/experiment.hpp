#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctqw/lattice.hpp"
#include "ctqw/nonmarkov.hpp"
#include "ctqw/states.hpp"

namespace ctqw {

enum class ExperimentKind {
    distribution_snapshots,
    variance_series,
    negentropy_series,
    coherence_series,
    mean_position_series,
    composition_gap,
    gap_vs_tau1,
    blp_scan,
    noise_audit,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& text);

// Pure noise-statistics run (no walker): switch-count chi-square plus
// autocorrelation estimates against the exponential decay law.
struct AuditParams {
    int samples = 100000;
    double window = 5.0;
    std::vector<double> lags = {0.1, 0.5, 1.0, 2.0};
};

// One self-contained run description. Fields that do not apply to the
// chosen kind are ignored and left out of the serialized form.
struct ExperimentConfig {
    std::string label = "run";
    ExperimentKind kind = ExperimentKind::variance_series;
    LatticeConfig lattice;
    StateDescriptor initial_state;
    std::vector<double> checkpoints;
    int n_realizations = 500;
    std::uint64_t master_seed = 1;
    double chebyshev_tol = 1e-10;
    std::string out_dir = "runs";

    double tau1 = 0.0;                 // composition_gap split time
    std::vector<double> tau1_list;     // gap_vs_tau1 (empty -> default grid)
    std::vector<StatePairSpec> pairs;  // blp_scan (empty -> default list)
    double eps_rev = 0.01;             // blp_scan revival threshold floor
    AuditParams audit;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Canonical [section] / key = value text. parse_config(serialize_config(c))
// reproduces every field the kind uses; numbers are written in shortest
// round-trip form so the cycle is lossless.
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// FNV-1a over the canonical serialization, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// start, start+step, ..., through stop (inclusive within half a step).
std::vector<double> checkpoint_grid(double start, double stop, double step);

// A named bundle of runs reproducing one published figure, in the original
// scale and in a reduced desk scale.
struct Preset {
    std::string name;
    std::string summary;
    std::vector<ExperimentConfig> paper;
    std::vector<ExperimentConfig> desk;
};

const std::vector<Preset>& preset_catalog();
const Preset* find_preset(const std::string& name);

struct SeriesOutput {
    std::string name;
    std::string path;
    double max_mc_error = 0.0;
};

struct SnapshotOutput {
    double tau = 0.0;
    std::string path;
};

struct RunManifest {
    std::string label;
    ExperimentKind kind = ExperimentKind::variance_series;
    std::string version;
    std::uint64_t seed = 0;
    std::string hash;
    int threads = 1;
    double wall_seconds = 0.0;
    std::vector<SeriesOutput> series;
    std::vector<SnapshotOutput> snapshots;
    std::string manifest_path;
};

// Runs one experiment: writes the CSV series/snapshots plus a JSON manifest
// under config.out_dir and logs one line per artifact to `log`. All output
// bytes are deterministic in (config, seed); wall time lives only in the
// manifest.
RunManifest run_experiment(const ExperimentConfig& config, int threads, std::ostream& log);

}  // namespace ctqw
