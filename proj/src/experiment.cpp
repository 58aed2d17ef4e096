#include "ctqw/experiment.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ctqw {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::distribution_snapshots: return "distribution_snapshots";
        case ExperimentKind::variance_series: return "variance_series";
        case ExperimentKind::negentropy_series: return "negentropy_series";
        case ExperimentKind::coherence_series: return "coherence_series";
        case ExperimentKind::mean_position_series: return "mean_position_series";
        case ExperimentKind::composition_gap: return "composition_gap";
        case ExperimentKind::gap_vs_tau1: return "gap_vs_tau1";
        case ExperimentKind::blp_scan: return "blp_scan";
        case ExperimentKind::noise_audit: return "noise_audit";
    }
    throw std::logic_error("unreachable experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& text) {
    static const std::pair<const char*, ExperimentKind> table[] = {
        {"distribution_snapshots", ExperimentKind::distribution_snapshots},
        {"variance_series", ExperimentKind::variance_series},
        {"negentropy_series", ExperimentKind::negentropy_series},
        {"coherence_series", ExperimentKind::coherence_series},
        {"mean_position_series", ExperimentKind::mean_position_series},
        {"composition_gap", ExperimentKind::composition_gap},
        {"gap_vs_tau1", ExperimentKind::gap_vs_tau1},
        {"blp_scan", ExperimentKind::blp_scan},
        {"noise_audit", ExperimentKind::noise_audit},
    };
    for (const auto& [name, kind] : table)
        if (text == name) return kind;
    throw std::invalid_argument("experiment.kind '" + text + "' is not a known experiment kind");
}

namespace {

bool uses_walker(ExperimentKind k) { return k != ExperimentKind::noise_audit; }

bool uses_initial_state(ExperimentKind k) {
    return uses_walker(k) && k != ExperimentKind::blp_scan;
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += fmt(values[i]);
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument("config: " + field + " expects a number, got '" + t + "'");
    return v;
}

long long parse_int(const std::string& text, const std::string& field) {
    const double v = parse_double(text, field);
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: " + field + " expects an integer, got '" +
                                    trim(text) + "'");
    return i;
}

std::uint64_t parse_u64(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw std::invalid_argument("config: " + field + " expects an unsigned integer, got '" +
                                    t + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    for (const auto& part : split(text, ','))
        out.push_back(parse_double(part, field));
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (label.empty()) throw std::invalid_argument("experiment.label must not be empty");
    for (char c : label)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-'))
            throw std::invalid_argument(
                "experiment.label may only contain letters, digits, '.', '_' and '-'");
    if (out_dir.empty()) throw std::invalid_argument("experiment.out must not be empty");
    if (!(chebyshev_tol > 0.0))
        throw std::invalid_argument("experiment.chebyshev_tol must be positive");
    lattice.validate();

    if (kind == ExperimentKind::noise_audit) {
        if (audit.samples < 1000)
            throw std::invalid_argument("audit.samples must be at least 1000");
        if (!(audit.window > 0.0)) throw std::invalid_argument("audit.window must be positive");
        if (audit.lags.empty()) throw std::invalid_argument("audit.lags must not be empty");
        for (double lag : audit.lags)
            if (lag < 0.0)
                throw std::invalid_argument("audit.lags entries must be non-negative");
        return;
    }

    if (n_realizations < 1)
        throw std::invalid_argument("experiment.realizations must be at least 1");
    if (checkpoints.empty())
        throw std::invalid_argument("checkpoints.list must not be empty");
    double prev = -1.0;
    for (double t : checkpoints) {
        if (t < 0.0) throw std::invalid_argument("checkpoints.list must be non-negative");
        if (!(t > prev))
            throw std::invalid_argument("checkpoints.list must be strictly increasing");
        prev = t;
    }
    if (uses_initial_state(kind)) initial_state.build(lattice.n_sites);

    if (kind == ExperimentKind::composition_gap) {
        if (tau1 < 0.0) throw std::invalid_argument("nonmarkov.tau1 must be non-negative");
        if (!(tau1 < checkpoints.back()))
            throw std::invalid_argument("nonmarkov.tau1 must lie below the last checkpoint");
    }
    if (kind == ExperimentKind::gap_vs_tau1) {
        for (double t1 : tau1_list)
            if (t1 < 0.0 || !(t1 < checkpoints.back()))
                throw std::invalid_argument(
                    "nonmarkov.tau1_list entries must lie in [0, last checkpoint)");
    }
    if (kind == ExperimentKind::blp_scan) {
        if (eps_rev < 0.0)
            throw std::invalid_argument("nonmarkov.eps_rev must be non-negative");
        for (const auto& pair : pairs) {
            if (pair.label.empty() || pair.label.find('|') != std::string::npos)
                throw std::invalid_argument(
                    "pairs.pair labels must be non-empty and free of '|'");
            pair.state1.build(lattice.n_sites);
            pair.state2.build(lattice.n_sites);
        }
    }
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "label = " << config.label << "\n";
    out << "kind = " << to_string(config.kind) << "\n";
    out << "seed = " << config.master_seed << "\n";
    if (uses_walker(config.kind)) {
        out << "realizations = " << config.n_realizations << "\n";
        out << "chebyshev_tol = " << fmt(config.chebyshev_tol) << "\n";
    }
    out << "out = " << config.out_dir << "\n";

    out << "\n[lattice]\n";
    out << "n_sites = " << config.lattice.n_sites << "\n";
    out << "boundary = " << to_string(config.lattice.boundary) << "\n";
    out << "epsilon = " << fmt(config.lattice.epsilon) << "\n";
    out << "a = " << fmt(config.lattice.a) << "\n";
    out << "gamma = " << fmt(config.lattice.gamma) << "\n";

    if (uses_initial_state(config.kind)) {
        out << "\n[state]\n";
        out << "value = " << config.initial_state.to_string() << "\n";
    }
    if (uses_walker(config.kind)) {
        out << "\n[checkpoints]\n";
        out << "list = " << fmt_list(config.checkpoints) << "\n";
    }

    if (config.kind == ExperimentKind::composition_gap) {
        out << "\n[nonmarkov]\n";
        out << "tau1 = " << fmt(config.tau1) << "\n";
    } else if (config.kind == ExperimentKind::gap_vs_tau1 && !config.tau1_list.empty()) {
        out << "\n[nonmarkov]\n";
        out << "tau1_list = " << fmt_list(config.tau1_list) << "\n";
    } else if (config.kind == ExperimentKind::blp_scan) {
        out << "\n[nonmarkov]\n";
        out << "eps_rev = " << fmt(config.eps_rev) << "\n";
        if (!config.pairs.empty()) {
            out << "\n[pairs]\n";
            for (const auto& pair : config.pairs)
                out << "pair = " << pair.label << " | " << pair.state1.to_string() << " | "
                    << pair.state2.to_string() << "\n";
        }
    } else if (config.kind == ExperimentKind::noise_audit) {
        out << "\n[audit]\n";
        out << "samples = " << config.audit.samples << "\n";
        out << "window = " << fmt(config.audit.window) << "\n";
        out << "lags = " << fmt_list(config.audit.lags) << "\n";
    }
    return out.str();
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "lattice" && section != "state" &&
                section != "checkpoints" && section != "nonmarkov" && section != "pairs" &&
                section != "audit")
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string field = section + "." + key;

        if (section == "experiment") {
            if (key == "label") cfg.label = value;
            else if (key == "kind") cfg.kind = experiment_kind_from_string(value);
            else if (key == "seed") cfg.master_seed = parse_u64(value, field);
            else if (key == "realizations")
                cfg.n_realizations = static_cast<int>(parse_int(value, field));
            else if (key == "chebyshev_tol") cfg.chebyshev_tol = parse_double(value, field);
            else if (key == "out") cfg.out_dir = value;
            else goto unknown;
        } else if (section == "lattice") {
            if (key == "n_sites") cfg.lattice.n_sites = static_cast<int>(parse_int(value, field));
            else if (key == "boundary") cfg.lattice.boundary = boundary_from_string(value);
            else if (key == "epsilon") cfg.lattice.epsilon = parse_double(value, field);
            else if (key == "a") cfg.lattice.a = parse_double(value, field);
            else if (key == "gamma") cfg.lattice.gamma = parse_double(value, field);
            else goto unknown;
        } else if (section == "state") {
            if (key == "value") cfg.initial_state = StateDescriptor::parse(value);
            else goto unknown;
        } else if (section == "checkpoints") {
            if (key == "list") cfg.checkpoints = parse_double_list(value, field);
            else if (key == "grid") {
                const auto parts = split(value, ':');
                if (parts.size() != 3)
                    throw std::invalid_argument(
                        "config: checkpoints.grid expects start:stop:step");
                cfg.checkpoints = checkpoint_grid(parse_double(parts[0], field),
                                                  parse_double(parts[1], field),
                                                  parse_double(parts[2], field));
            } else goto unknown;
        } else if (section == "nonmarkov") {
            if (key == "tau1") cfg.tau1 = parse_double(value, field);
            else if (key == "tau1_list") cfg.tau1_list = parse_double_list(value, field);
            else if (key == "eps_rev") cfg.eps_rev = parse_double(value, field);
            else goto unknown;
        } else if (section == "pairs") {
            if (key == "pair") {
                const auto parts = split(value, '|');
                if (parts.size() != 3)
                    throw std::invalid_argument(
                        "config: pairs.pair expects 'label | state | state'");
                StatePairSpec pair;
                pair.label = trim(parts[0]);
                pair.state1 = StateDescriptor::parse(trim(parts[1]));
                pair.state2 = StateDescriptor::parse(trim(parts[2]));
                cfg.pairs.push_back(std::move(pair));
            } else goto unknown;
        } else if (section == "audit") {
            if (key == "samples") cfg.audit.samples = static_cast<int>(parse_int(value, field));
            else if (key == "window") cfg.audit.window = parse_double(value, field);
            else if (key == "lags") cfg.audit.lags = parse_double_list(value, field);
            else goto unknown;
        } else {
            throw std::invalid_argument("config: key '" + key + "' appears before any section");
        }
        continue;
    unknown:
        throw std::invalid_argument("config: unknown key '" + key + "' in section [" + section +
                                    "]");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

std::vector<double> checkpoint_grid(double start, double stop, double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("checkpoints.grid step must be positive");
    if (stop < start)
        throw std::invalid_argument("checkpoints.grid stop must not precede start");
    const int count = static_cast<int>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) out.push_back(start + k * step);
    return out;
}

}  // namespace ctqw
