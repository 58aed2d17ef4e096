#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctqw/experiment.hpp"
#include "ctqw/propagator.hpp"

namespace {

void print_catalog(std::ostream& out) {
    for (const auto& preset : ctqw::preset_catalog()) {
        out << preset.name << "\n    " << preset.summary << "\n";
        const auto brief = [&](const char* tag, const std::vector<ctqw::ExperimentConfig>& v) {
            out << "    " << tag << ": " << v.size() << " run(s), n_sites="
                << v.front().lattice.n_sites;
            if (v.front().kind != ctqw::ExperimentKind::noise_audit)
                out << ", realizations=" << v.front().n_realizations
                    << ", tau_max=" << v.front().checkpoints.back();
            out << "\n";
        };
        brief("paper", preset.paper);
        brief("desk", preset.desk);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-time quantum walk on a 1-D lattice with telegraph-noise couplings"};

    std::string config_path, preset_name, out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    int realizations = 0;
    bool desk = false, list = false;

    auto* config_opt =
        app.add_option("--config", config_path, "run a single experiment from a config file");
    auto* preset_opt = app.add_option("--preset", preset_name, "run a named preset bundle");
    app.add_flag("--list-presets", list, "print the preset catalog and exit");
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    auto* real_opt =
        app.add_option("--realizations", realizations, "ensemble size (overrides the config)")
            ->check(CLI::PositiveNumber);
    app.add_flag("--desk-scale", desk, "run the reduced desk-scale variant of the preset");
    config_opt->excludes(preset_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list) {
            print_catalog(std::cout);
            return 0;
        }

        std::vector<ctqw::ExperimentConfig> configs;
        if (config_opt->count() > 0) {
            configs.push_back(ctqw::load_config_file(config_path));
        } else if (preset_opt->count() > 0) {
            const ctqw::Preset* preset = ctqw::find_preset(preset_name);
            if (!preset)
                throw std::invalid_argument("unknown preset '" + preset_name +
                                            "' (see --list-presets)");
            configs = desk ? preset->desk : preset->paper;
        } else {
            throw std::invalid_argument(
                "one of --config, --preset or --list-presets is required");
        }

        for (auto& cfg : configs) {
            if (seed_opt->count() > 0) cfg.master_seed = seed;
            if (real_opt->count() > 0) cfg.n_realizations = realizations;
            if (out_opt->count() > 0) cfg.out_dir = out_dir;
            ctqw::run_experiment(cfg, threads, std::cout);
        }
        return 0;
    } catch (const ctqw::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
