#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ctqw/experiment.hpp"
#include "ctqw/noise.hpp"
#include "ctqw/observables.hpp"
#include "ctqw/propagator.hpp"
#include "ctqw/rng.hpp"

namespace fs = std::filesystem;

namespace ctqw {

namespace {

constexpr const char* kVersionTag = "ctqw-1.0.0";
constexpr std::uint64_t kAuditCountTag = 0x434f554e54ull;  // independent counting stream

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

EvolutionPlan make_plan(const ExperimentConfig& cfg) {
    EvolutionPlan plan;
    plan.config = cfg.lattice;
    plan.checkpoints = cfg.checkpoints;
    plan.n_realizations = cfg.n_realizations;
    plan.master_seed = cfg.master_seed;
    plan.chebyshev_tol = cfg.chebyshev_tol;
    return plan;
}

const char* series_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::variance_series: return "variance";
        case ExperimentKind::negentropy_series: return "negentropy";
        case ExperimentKind::coherence_series: return "coherence";
        case ExperimentKind::mean_position_series: return "mean_position";
        default: throw std::logic_error("not a scalar series kind");
    }
}

double evaluate_scalar(ExperimentKind kind, const Eigen::VectorXd& site_weights,
                       const Eigen::MatrixXcd* density) {
    switch (kind) {
        case ExperimentKind::variance_series:
            return position_moments(site_distribution(site_weights)).variance;
        case ExperimentKind::negentropy_series:
            return negentropy(site_distribution(site_weights));
        case ExperimentKind::mean_position_series:
            return position_moments(site_distribution(site_weights)).mean;
        case ExperimentKind::coherence_series:
            return coherence_l1(*density);
        default: throw std::logic_error("not a scalar series kind");
    }
}

// All artifact writing funnels through one sink so every file gets logged
// and recorded the same way.
struct OutputSink {
    fs::path dir;
    std::string header;  // "# seed=... config_hash=..."
    std::ostream& log;
    RunManifest& manifest;

    std::string write(const std::string& filename, const std::string& columns,
                      const std::string& body, const std::string& note = "") {
        const fs::path path = dir / filename;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << header;
        if (!note.empty()) out << " " << note;
        out << "\n" << columns << "\n" << body;
        out.close();
        log << "wrote " << path.string() << "\n";
        return path.string();
    }
};

std::string series_body(const std::vector<double>& x, const std::vector<double>& value,
                        const std::vector<double>& err) {
    std::ostringstream body;
    for (std::size_t i = 0; i < x.size(); ++i)
        body << fmt(x[i]) << "," << fmt(value[i]) << "," << fmt(err[i]) << "\n";
    return body.str();
}

void run_snapshots(const ExperimentConfig& cfg, int threads, OutputSink& sink) {
    EnsembleSpec spec;
    spec.plan = make_plan(cfg);
    spec.initial_block = cfg.initial_state.build(cfg.lattice.n_sites);
    spec.options.threads = threads;
    const auto acc = run_ensemble(spec);

    for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
        const auto p = site_distribution(acc.site_weights[c]);
        std::ostringstream body;
        for (std::size_t i = 0; i < p.size(); ++i)
            body << (i + 1) << "," << fmt(p[i]) << "\n";
        const std::string name =
            cfg.label + ".snapshot.tau" + fmt(cfg.checkpoints[c]) + ".csv";
        const std::string path = sink.write(name, "site,probability", body.str(),
                                            "tau=" + fmt(cfg.checkpoints[c]));
        sink.manifest.snapshots.push_back({cfg.checkpoints[c], path});
    }
}

void run_scalar_series(const ExperimentConfig& cfg, int threads, OutputSink& sink) {
    const ExperimentKind kind = cfg.kind;
    EnsembleSpec spec;
    spec.plan = make_plan(cfg);
    spec.initial_block = cfg.initial_state.build(cfg.lattice.n_sites);
    spec.want_density = kind == ExperimentKind::coherence_series;
    spec.options.threads = threads;
    spec.batch_observables.emplace_back(
        series_name(kind), [kind](int, const Eigen::VectorXd& w, const Eigen::MatrixXcd* rho) {
            return evaluate_scalar(kind, w, rho);
        });
    const auto acc = run_ensemble(spec);

    const int nc = static_cast<int>(cfg.checkpoints.size());
    std::vector<double> values(nc);
    for (int c = 0; c < nc; ++c)
        values[c] = evaluate_scalar(kind, acc.site_weights[c],
                                    spec.want_density ? &acc.densities[c] : nullptr);
    const auto err = batch_standard_error(acc.batch_series[0]);

    const std::string path = sink.write(cfg.label + "." + series_name(kind) + ".csv",
                                        "tau,value,mc_error",
                                        series_body(cfg.checkpoints, values, err));
    const double max_err = err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
    sink.manifest.series.push_back({series_name(kind), path, max_err});
}

void run_composition_gap(const ExperimentConfig& cfg, int threads, OutputSink& sink,
                         nlohmann::ordered_json& extra) {
    EnsembleOptions opts;
    opts.threads = threads;
    const auto rho0 = pure_density(cfg.initial_state.build(cfg.lattice.n_sites));
    const auto series = composition_gap(make_plan(cfg), rho0, cfg.tau1, opts);

    const std::string path =
        sink.write(cfg.label + ".gap.csv", "tau,value,mc_error",
                   series_body(series.taus, series.gamma_values, series.noise_floor),
                   "tau1=" + fmt(series.tau1));
    const double max_floor = series.noise_floor.empty()
                                 ? 0.0
                                 : *std::max_element(series.noise_floor.begin(),
                                                     series.noise_floor.end());
    sink.manifest.series.push_back({"gap", path, max_floor});
    extra["tau1"] = series.tau1;
}

void run_gap_vs_tau1(const ExperimentConfig& cfg, int threads, OutputSink& sink,
                     nlohmann::ordered_json& extra) {
    EnsembleOptions opts;
    opts.threads = threads;
    const auto rho0 = pure_density(cfg.initial_state.build(cfg.lattice.n_sites));
    const auto tau1s = cfg.tau1_list.empty() ? default_tau1_grid(cfg.checkpoints.back())
                                             : cfg.tau1_list;
    const auto maxima = gap_maximum_vs_tau1(make_plan(cfg), rho0, tau1s, opts);

    std::vector<double> x, v, f;
    for (const auto& m : maxima) {
        x.push_back(m.tau1);
        v.push_back(m.max_gamma);
        f.push_back(m.max_floor);
    }
    const std::string path = sink.write(cfg.label + ".gapmax.csv", "tau1,value,mc_error",
                                        series_body(x, v, f));
    sink.manifest.series.push_back(
        {"gapmax", path, f.empty() ? 0.0 : *std::max_element(f.begin(), f.end())});
    extra["tau1_list"] = tau1s;
}

void run_blp(const ExperimentConfig& cfg, int threads, OutputSink& sink,
             nlohmann::ordered_json& extra) {
    EnsembleOptions opts;
    opts.threads = threads;
    const auto pairs =
        cfg.pairs.empty() ? default_pair_list(cfg.lattice.n_sites) : cfg.pairs;
    const auto scans = blp_scan(make_plan(cfg), pairs, cfg.eps_rev, opts);

    auto pair_reports = nlohmann::ordered_json::array();
    for (const auto& scan : scans) {
        const std::string path =
            sink.write(cfg.label + "." + scan.label + ".csv", "tau,value,mc_error",
                       series_body(scan.taus, scan.distances, scan.noise_floor));
        const double max_floor = scan.noise_floor.empty()
                                     ? 0.0
                                     : *std::max_element(scan.noise_floor.begin(),
                                                         scan.noise_floor.end());
        sink.manifest.series.push_back({scan.label, path, max_floor});
        pair_reports.push_back({{"label", scan.label},
                                {"path", path},
                                {"revival", scan.revival},
                                {"max_rise", scan.max_rise},
                                {"threshold", scan.threshold}});
    }
    extra["pairs"] = std::move(pair_reports);
}

void run_noise_audit(const ExperimentConfig& cfg, OutputSink& sink,
                     nlohmann::ordered_json& extra) {
    const double gamma = cfg.lattice.gamma;
    const double a = cfg.lattice.a;
    const auto ac = empirical_autocorrelation(gamma, a, cfg.audit.lags, cfg.audit.samples,
                                              cfg.master_seed);

    std::ostringstream body;
    double max_err = 0.0;
    for (std::size_t i = 0; i < ac.lags.size(); ++i) {
        const double exact = a * a * std::exp(-2.0 * gamma * ac.lags[i]);
        body << fmt(ac.lags[i]) << "," << fmt(ac.estimates[i]) << "," << fmt(ac.std_errors[i])
             << "," << fmt(exact) << "\n";
        max_err = std::max(max_err, ac.std_errors[i]);
    }
    const std::string path =
        sink.write(cfg.label + ".autocorr.csv", "lag,estimate,std_error,exact", body.str());
    sink.manifest.series.push_back({"autocorr", path, max_err});

    const auto chi = switch_count_chi_square(gamma, cfg.audit.window, cfg.audit.samples,
                                             mix_seed(cfg.master_seed, kAuditCountTag));
    extra["switch_count_test"] = {{"statistic", chi.statistic},
                                  {"dof", chi.dof},
                                  {"critical_value", chi.critical_value},
                                  {"consistent", chi.consistent},
                                  {"window", cfg.audit.window},
                                  {"samples", cfg.audit.samples}};
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, int threads, std::ostream& log) {
    cfg.validate();
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    const auto t0 = std::chrono::steady_clock::now();

    RunManifest manifest;
    manifest.label = cfg.label;
    manifest.kind = cfg.kind;
    manifest.version = kVersionTag;
    manifest.seed = cfg.master_seed;
    manifest.hash = config_hash(cfg);
    manifest.threads = threads;

    fs::create_directories(cfg.out_dir);
    log << "run " << cfg.label << " kind=" << to_string(cfg.kind)
        << " n_sites=" << cfg.lattice.n_sites << " gamma=" << fmt(cfg.lattice.gamma)
        << " a=" << fmt(cfg.lattice.a) << " threads=" << threads << "\n";

    OutputSink sink{cfg.out_dir,
                    "# seed=" + std::to_string(cfg.master_seed) + " config_hash=" + manifest.hash,
                    log, manifest};
    auto extra = nlohmann::ordered_json::object();

    switch (cfg.kind) {
        case ExperimentKind::distribution_snapshots: run_snapshots(cfg, threads, sink); break;
        case ExperimentKind::variance_series:
        case ExperimentKind::negentropy_series:
        case ExperimentKind::coherence_series:
        case ExperimentKind::mean_position_series: run_scalar_series(cfg, threads, sink); break;
        case ExperimentKind::composition_gap:
            run_composition_gap(cfg, threads, sink, extra);
            break;
        case ExperimentKind::gap_vs_tau1: run_gap_vs_tau1(cfg, threads, sink, extra); break;
        case ExperimentKind::blp_scan: run_blp(cfg, threads, sink, extra); break;
        case ExperimentKind::noise_audit: run_noise_audit(cfg, sink, extra); break;
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::ordered_json j;
    j["version"] = manifest.version;
    j["label"] = manifest.label;
    j["kind"] = to_string(manifest.kind);
    j["seed"] = manifest.seed;
    j["config_hash"] = manifest.hash;
    j["threads"] = manifest.threads;
    j["wall_seconds"] = manifest.wall_seconds;
    auto series = nlohmann::ordered_json::array();
    for (const auto& s : manifest.series)
        series.push_back({{"name", s.name}, {"path", s.path}, {"max_mc_error", s.max_mc_error}});
    j["series"] = std::move(series);
    auto snapshots = nlohmann::ordered_json::array();
    for (const auto& s : manifest.snapshots)
        snapshots.push_back({{"tau", s.tau}, {"path", s.path}});
    j["snapshots"] = std::move(snapshots);
    j.update(extra);
    j["config"] = serialize_config(cfg);

    const fs::path mpath = fs::path(cfg.out_dir) / (cfg.label + ".manifest.json");
    std::ofstream out(mpath, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + mpath.string() + "'");
    out << j.dump(2) << "\n";
    out.close();
    manifest.manifest_path = mpath.string();
    log << "wrote " << mpath.string() << "\n";
    return manifest;
}

}  // namespace ctqw
