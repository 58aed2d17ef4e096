#include "ctqw/experiment.hpp"

namespace ctqw {

namespace {

constexpr double kPacketK0 = 4.71238898038468985769;  // 3 pi / 2
constexpr double kPacketDelta = 3.0;
constexpr double kPairDelta = 4.0;

struct Scale {
    int n_sites;
    int n_realizations;
    double tau_max;
};

constexpr Scale kPaperDynamics{500, 1000, 120.0};
constexpr Scale kDeskDynamics{201, 500, 40.0};
constexpr Scale kPaperMemory{500, 1000, 30.0};
constexpr Scale kDeskMemory{101, 400, 12.0};

int center_site(int n_sites) { return (n_sites + 1) / 2; }

ExperimentConfig base_config(const Scale& scale, double gamma, double a, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.lattice.n_sites = scale.n_sites;
    cfg.lattice.boundary = Boundary::ring;
    cfg.lattice.epsilon = 2.0;
    cfg.lattice.gamma = gamma;
    cfg.lattice.a = a;
    cfg.n_realizations = scale.n_realizations;
    cfg.master_seed = seed;
    cfg.initial_state = StateDescriptor::make_localized(center_site(scale.n_sites));
    return cfg;
}

std::string speed_tag(double gamma) { return gamma >= 1.0 ? "fast" : "slow"; }

const char* amp_tag(double a) {
    if (a == 0.2) return "a0.2";
    if (a == 0.5) return "a0.5";
    return "a0.9";
}

// fig1 / fig4: three distributions per requested time.
void snapshot_bundle(std::vector<ExperimentConfig>& out, const std::string& name,
                     const Scale& scale, double gamma, bool packet, std::uint64_t& seed) {
    for (double a : {0.2, 0.5, 0.9}) {
        ExperimentConfig cfg = base_config(scale, gamma, a, seed++);
        cfg.kind = ExperimentKind::distribution_snapshots;
        cfg.label = name + "-" + amp_tag(a);
        cfg.checkpoints = {scale.tau_max / 4.0, scale.tau_max / 2.0, scale.tau_max};
        if (packet)
            cfg.initial_state = StateDescriptor::make_gaussian(center_site(scale.n_sites),
                                                               kPacketDelta, kPacketK0);
        out.push_back(std::move(cfg));
    }
}

// fig2 / fig3: scalar series over a dense grid, both regimes, three strengths.
void series_bundle(std::vector<ExperimentConfig>& out, const std::string& name,
                   ExperimentKind kind, const Scale& scale, double step, std::uint64_t& seed) {
    for (double gamma : {10.0, 0.01}) {
        for (double a : {0.2, 0.5, 0.9}) {
            ExperimentConfig cfg = base_config(scale, gamma, a, seed++);
            cfg.kind = kind;
            cfg.label = name + "-" + speed_tag(gamma) + "-" + amp_tag(a);
            cfg.checkpoints = checkpoint_grid(step, scale.tau_max, step);
            out.push_back(std::move(cfg));
        }
    }
}

// fig5: wave-packet transport, three observables per (gamma, a).
void transport_bundle(std::vector<ExperimentConfig>& out, const Scale& scale, double step,
                      double coherence_step, std::uint64_t& seed) {
    struct Piece {
        ExperimentKind kind;
        const char* tag;
        bool coarse;
    };
    const Piece pieces[] = {
        {ExperimentKind::mean_position_series, "mean", false},
        {ExperimentKind::variance_series, "var", false},
        {ExperimentKind::coherence_series, "coh", true},
    };
    for (double gamma : {10.0, 0.01}) {
        for (double a : {0.2, 0.9}) {
            for (const auto& piece : pieces) {
                ExperimentConfig cfg = base_config(scale, gamma, a, seed++);
                cfg.kind = piece.kind;
                cfg.label =
                    "fig5-" + speed_tag(gamma) + "-" + std::string(amp_tag(a)) + "-" + piece.tag;
                const double s = piece.coarse ? coherence_step : step;
                cfg.checkpoints = checkpoint_grid(s, scale.tau_max, s);
                cfg.initial_state = StateDescriptor::make_gaussian(center_site(scale.n_sites),
                                                                   kPacketDelta, kPacketK0);
                out.push_back(std::move(cfg));
            }
        }
    }
}

// fig6: composition gap at a fixed split plus the maximum-vs-split scan.
void gap_bundle(std::vector<ExperimentConfig>& out, const Scale& scale, std::uint64_t& seed) {
    for (double gamma : {10.0, 0.01}) {
        ExperimentConfig cfg = base_config(scale, gamma, 0.9, seed++);
        cfg.kind = ExperimentKind::composition_gap;
        cfg.label = "fig6-" + speed_tag(gamma) + "-gap";
        cfg.checkpoints = checkpoint_grid(0.5, scale.tau_max, 0.5);
        cfg.tau1 = scale.tau_max / 4.0;
        out.push_back(std::move(cfg));
    }
    for (double gamma : {10.0, 0.01}) {
        ExperimentConfig cfg = base_config(scale, gamma, 0.9, seed++);
        cfg.kind = ExperimentKind::gap_vs_tau1;
        cfg.label = "fig6-" + speed_tag(gamma) + "-scan";
        cfg.checkpoints = checkpoint_grid(0.5, scale.tau_max, 0.5);
        out.push_back(std::move(cfg));
    }
}

// fig7: BLP trace-distance scan over the six reference pairs.
void blp_bundle(std::vector<ExperimentConfig>& out, const Scale& scale, double tau_max,
                double step, std::uint64_t& seed) {
    for (double gamma : {10.0, 0.01}) {
        ExperimentConfig cfg = base_config(scale, gamma, 0.9, seed++);
        cfg.kind = ExperimentKind::blp_scan;
        cfg.label = "fig7-" + speed_tag(gamma);
        cfg.checkpoints = checkpoint_grid(step, tau_max, step);
        cfg.pairs = default_pair_list(scale.n_sites, kPairDelta, kPacketK0);
        cfg.eps_rev = 0.01;
        out.push_back(std::move(cfg));
    }
}

std::vector<Preset> build_catalog() {
    std::vector<Preset> catalog;
    std::uint64_t seed = 1001;

    const auto add = [&](Preset preset) { catalog.push_back(std::move(preset)); };

    {
        Preset p{"fig1-fast",
                 "site distributions of a localized start under fast noise, a in {0.2,0.5,0.9}",
                 {},
                 {}};
        snapshot_bundle(p.paper, p.name, kPaperDynamics, 10.0, false, seed);
        snapshot_bundle(p.desk, p.name, kDeskDynamics, 10.0, false, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig1-slow",
                 "site distributions of a localized start under slow noise, a in {0.2,0.5,0.9}",
                 {},
                 {}};
        snapshot_bundle(p.paper, p.name, kPaperDynamics, 0.01, false, seed);
        snapshot_bundle(p.desk, p.name, kDeskDynamics, 0.01, false, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig2", "negentropy of the site distribution vs time, both regimes", {}, {}};
        series_bundle(p.paper, p.name, ExperimentKind::negentropy_series, kPaperDynamics, 1.0,
                      seed);
        series_bundle(p.desk, p.name, ExperimentKind::negentropy_series, kDeskDynamics, 0.5,
                      seed);
        add(std::move(p));
    }
    {
        Preset p{"fig3", "position variance vs time, both regimes", {}, {}};
        series_bundle(p.paper, p.name, ExperimentKind::variance_series, kPaperDynamics, 1.0,
                      seed);
        series_bundle(p.desk, p.name, ExperimentKind::variance_series, kDeskDynamics, 0.5, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig4-fast",
                 "site distributions of a moving Gaussian packet under fast noise",
                 {},
                 {}};
        snapshot_bundle(p.paper, p.name, kPaperDynamics, 10.0, true, seed);
        snapshot_bundle(p.desk, p.name, kDeskDynamics, 10.0, true, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig4-slow",
                 "site distributions of a moving Gaussian packet under slow noise",
                 {},
                 {}};
        snapshot_bundle(p.paper, p.name, kPaperDynamics, 0.01, true, seed);
        snapshot_bundle(p.desk, p.name, kDeskDynamics, 0.01, true, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig5", "packet transport: mean position, variance and coherence", {}, {}};
        transport_bundle(p.paper, kPaperDynamics, 1.0, 4.0, seed);
        transport_bundle(p.desk, kDeskDynamics, 0.5, 1.0, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig6", "divisibility gap of the averaged map, fixed split and split scan", {},
                 {}};
        gap_bundle(p.paper, kPaperMemory, seed);
        gap_bundle(p.desk, kDeskMemory, seed);
        add(std::move(p));
    }
    {
        Preset p{"fig7-pairs", "trace-distance scan over the six reference state pairs", {}, {}};
        blp_bundle(p.paper, kPaperMemory, 30.0, 0.25, seed);
        blp_bundle(p.desk, kDeskMemory, 10.0, 0.25, seed);
        add(std::move(p));
    }
    {
        Preset p{"noise-audit", "telegraph-noise statistics against the closed-form laws", {},
                 {}};
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::noise_audit;
        cfg.label = "noise-audit";
        cfg.lattice.n_sites = 3;
        cfg.lattice.epsilon = 2.0;
        cfg.lattice.gamma = 1.0;
        cfg.lattice.a = 1.0;
        cfg.master_seed = seed++;
        p.paper.push_back(cfg);
        p.desk.push_back(cfg);
        add(std::move(p));
    }
    return catalog;
}

}  // namespace

const std::vector<Preset>& preset_catalog() {
    static const std::vector<Preset> catalog = build_catalog();
    return catalog;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& preset : preset_catalog())
        if (preset.name == name) return &preset;
    return nullptr;
}

}  // namespace ctqw
