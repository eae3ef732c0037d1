#include "hfsg/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hfsg/errors.hpp"

namespace hfsg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    std::uint64_t v;
    try {
        if (!value.empty() && value[0] == '-')
            throw config_error(key + ": must be non-negative, got '" + value + "'");
        v = std::stoull(value, &pos);
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error(key + ": expected an integer, got '" + value + "'");
    }
    if (pos != value.size())
        throw config_error(key + ": expected an integer, got '" + value + "'");
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw config_error(key + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size())
        throw config_error(key + ": expected a number, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw config_error(key + ": expected a boolean (0/1/true/false), got '" + value + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(line_no) +
                               " is not key=value: '" + t + "'");
        cfg.apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "seed")
        seed = parse_u64(key, value);
    else if (key == "n_samples")
        n_samples = parse_u64(key, value);
    else if (key == "n_classes")
        n_classes = parse_u64(key, value);
    else if (key == "modes_per_class")
        modes_per_class = parse_u64(key, value);
    else if (key == "brands_per_class")
        brands_per_class = parse_u64(key, value);
    else if (key == "separability")
        separability = parse_double(key, value);
    else if (key == "sigma_min")
        sigma_min = parse_double(key, value);
    else if (key == "sigma_max")
        sigma_max = parse_double(key, value);
    else if (key == "z_min")
        z_min = parse_double(key, value);
    else if (key == "z_max")
        z_max = parse_double(key, value);
    else if (key == "aggregates")
        aggregates = parse_u64(key, value);
    else if (key == "k_min")
        k_min = parse_u64(key, value);
    else if (key == "k_max")
        k_max = parse_u64(key, value);
    else if (key == "split_mode")
        split_mode = split_mode_from_string(value);
    else if (key == "tau")
        tau = parse_double(key, value);
    else if (key == "normalize_shares")
        normalize_shares = parse_bool(key, value);
    else if (key == "voltage_amplitude")
        voltage_amplitude = parse_double(key, value);
    else if (key == "components")
        components = parse_u64(key, value);
    else if (key == "variance_threshold")
        variance_threshold = parse_double(key, value);
    else if (key == "knn_k")
        knn_k = parse_u64(key, value);
    else if (key == "tree_max_depth")
        tree_max_depth = parse_u64(key, value);
    else if (key == "tree_min_leaf")
        tree_min_leaf = parse_u64(key, value);
    else if (key == "wavelet_levels")
        wavelet_levels = parse_u64(key, value);
    else if (key == "vi_points")
        vi_points = parse_u64(key, value);
    else if (key == "period_energy") {
        if (value == "sum_squares")
            period_energy = PeriodEnergy::sum_squares;
        else if (value == "rms")
            period_energy = PeriodEnergy::rms;
        else
            throw config_error("period_energy: expected 'sum_squares' or 'rms', got '" + value +
                               "'");
    } else if (key == "model_path")
        model_path = value;
    else if (key == "out_dir")
        out_dir = value;
    else
        throw config_error("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
    if (n_samples < 1) throw config_error("n_samples: must be >= 1");
    if (n_classes < 1) throw config_error("n_classes: must be >= 1");
    if (modes_per_class < 1) throw config_error("modes_per_class: must be >= 1");
    if (brands_per_class < 1) throw config_error("brands_per_class: must be >= 1");
    if (n_samples < n_classes * modes_per_class)
        throw config_error("n_samples: must be >= n_classes * modes_per_class");
    if (separability < 0.0) throw config_error("separability: must be >= 0");
    if (!(sigma_min > 0.0)) throw config_error("sigma_min: must be > 0");
    if (sigma_min > sigma_max) throw config_error("sigma_max: must be >= sigma_min");
    if (z_min.has_value() != z_max.has_value())
        throw config_error("z_min/z_max: must be set together");
    if (z_min && *z_min > *z_max) throw config_error("z_min: must be <= z_max");
    if (aggregates < 1) throw config_error("aggregates: must be >= 1");
    if (k_min < 1) throw config_error("k_min: must be >= 1");
    if (k_min > k_max) throw config_error("k_max: must be >= k_min");
    if (!(tau > 0.0) || !(tau < 1.0)) throw config_error("tau: must be in (0, 1)");
    if (!(voltage_amplitude > 0.0)) throw config_error("voltage_amplitude: must be > 0");
    if (components < 1) throw config_error("components: must be >= 1");
    if (variance_threshold < 0.0 || variance_threshold > 1.0)
        throw config_error("variance_threshold: must be in [0, 1]");
    if (knn_k < 1) throw config_error("knn_k: must be >= 1");
    if (tree_min_leaf < 1) throw config_error("tree_min_leaf: must be >= 1");
    if (wavelet_levels < 1) throw config_error("wavelet_levels: must be >= 1");
    if (vi_points < 1) throw config_error("vi_points: must be >= 1");
    if (split_mode == SplitMode::brand && brands_per_class < 2)
        throw config_error("split_mode: brand split requires brands_per_class >= 2");
}

std::string RunConfig::manifest_text() const {
    std::ostringstream os;
    os << "seed=" << seed << "\n"
       << "n_samples=" << n_samples << "\n"
       << "n_classes=" << n_classes << "\n"
       << "modes_per_class=" << modes_per_class << "\n"
       << "brands_per_class=" << brands_per_class << "\n"
       << "separability=" << format_double(separability) << "\n"
       << "sigma_min=" << format_double(sigma_min) << "\n"
       << "sigma_max=" << format_double(sigma_max) << "\n";
    if (z_min) os << "z_min=" << format_double(*z_min) << "\n";
    if (z_max) os << "z_max=" << format_double(*z_max) << "\n";
    os << "aggregates=" << aggregates << "\n"
       << "k_min=" << k_min << "\n"
       << "k_max=" << k_max << "\n"
       << "split_mode=" << to_string(split_mode) << "\n"
       << "tau=" << format_double(tau) << "\n"
       << "normalize_shares=" << (normalize_shares ? 1 : 0) << "\n"
       << "voltage_amplitude=" << format_double(voltage_amplitude) << "\n"
       << "components=" << components << "\n"
       << "variance_threshold=" << format_double(variance_threshold) << "\n"
       << "knn_k=" << knn_k << "\n"
       << "tree_max_depth=" << tree_max_depth << "\n"
       << "tree_min_leaf=" << tree_min_leaf << "\n"
       << "wavelet_levels=" << wavelet_levels << "\n"
       << "vi_points=" << vi_points << "\n"
       << "period_energy="
       << (period_energy == PeriodEnergy::sum_squares ? "sum_squares" : "rms") << "\n";
    if (!model_path.empty()) os << "model_path=" << model_path << "\n";
    os << "out_dir=" << out_dir << "\n";
    return os.str();
}

SynthConfig RunConfig::to_synth_config(std::size_t latent_dim) const {
    validate();
    SynthConfig cfg;
    cfg.gen.n_samples = n_samples;
    cfg.gen.n_classes = n_classes;
    cfg.gen.modes_per_class = modes_per_class;
    cfg.gen.brands_per_class = brands_per_class;
    cfg.gen.separability = separability;
    cfg.gen.sigma_min = sigma_min;
    cfg.gen.sigma_max = sigma_max;
    cfg.gen.seed = seed;
    if (z_min && z_max) {
        cfg.gen.z_min.assign(latent_dim, *z_min);
        cfg.gen.z_max.assign(latent_dim, *z_max);
    }
    cfg.aggregates = aggregates;
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    cfg.split_mode = split_mode;
    cfg.tau = tau;
    cfg.normalize_shares = normalize_shares;
    cfg.voltage_amplitude = voltage_amplitude;
    return cfg;
}

BenchSettings RunConfig::to_bench_settings() const {
    BenchSettings s;
    s.knn_k = knn_k;
    s.tree_max_depth = tree_max_depth;
    s.tree_min_leaf = tree_min_leaf;
    s.wavelet_levels = wavelet_levels;
    s.vi_points = vi_points;
    s.period_energy = period_energy;
    return s;
}

}  // namespace hfsg
