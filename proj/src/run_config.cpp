#include "nls/run_config.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "nls/errors.hpp"

namespace nls {

namespace {

using Value = std::variant<long, double, bool, std::string, std::vector<double>>;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& tok, long& as_int, double& as_float, bool& is_int) {
    if (tok.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const long l = std::strtol(tok.c_str(), &end, 10);
    if (errno == 0 && end && *end == '\0') {
        as_int = l;
        is_int = true;
        return true;
    }
    errno = 0;
    const double d = std::strtod(tok.c_str(), &end);
    if (errno == 0 && end && *end == '\0' && std::isfinite(d)) {
        as_float = d;
        is_int = false;
        return true;
    }
    return false;
}

Value parse_value(const std::string& key, const std::string& raw) {
    const std::string tok = trim(raw);
    if (tok.empty()) throw ConfigError("config: empty value for key '" + key + "'");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"')
            throw ConfigError("config: unterminated string for key '" + key + "'");
        return tok.substr(1, tok.size() - 2);
    }
    if (tok.front() == '[') {
        if (tok.back() != ']')
            throw ConfigError("config: unterminated array for key '" + key + "'");
        std::vector<double> vals;
        std::string inner = tok.substr(1, tok.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            long li;
            double dv;
            bool is_int;
            if (!parse_number(item, li, dv, is_int))
                throw ConfigError("config: non-numeric array entry for key '" + key + "'");
            vals.push_back(is_int ? static_cast<double>(li) : dv);
        }
        return vals;
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    long li;
    double dv;
    bool is_int;
    if (parse_number(tok, li, dv, is_int)) {
        if (is_int) return li;
        return dv;
    }
    // bare word: treat as string (preset names)
    return tok;
}

std::map<std::string, Value> parse_document(const std::string& text) {
    std::map<std::string, Value> kv;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = parse_value(key, line.substr(eq + 1));
    }
    return kv;
}

// Typed extraction helpers; each error names the key path.
long take_int(std::map<std::string, Value>& kv, const std::string& key, long fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (auto* l = std::get_if<long>(&it->second)) {
        const long v = *l;
        kv.erase(it);
        return v;
    }
    throw ConfigError("config: key '" + key + "' must be an integer");
}

double take_float(std::map<std::string, Value>& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    double v = 0.0;
    if (auto* d = std::get_if<double>(&it->second))
        v = *d;
    else if (auto* l = std::get_if<long>(&it->second))
        v = static_cast<double>(*l);
    else
        throw ConfigError("config: key '" + key + "' must be a number");
    kv.erase(it);
    return v;
}

std::string take_string(std::map<std::string, Value>& kv, const std::string& key,
                        const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (auto* s = std::get_if<std::string>(&it->second)) {
        const std::string v = *s;
        kv.erase(it);
        return v;
    }
    throw ConfigError("config: key '" + key + "' must be a string");
}

std::vector<double> take_array(std::map<std::string, Value>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return {};
    if (auto* a = std::get_if<std::vector<double>>(&it->second)) {
        const std::vector<double> v = *a;
        kv.erase(it);
        return v;
    }
    throw ConfigError("config: key '" + key + "' must be an array of numbers");
}

RunConfig from_map(std::map<std::string, Value> kv) {
    RunConfig cfg;
    cfg.dimension = static_cast<int>(take_int(kv, "dimension", cfg.dimension));
    cfg.n = static_cast<int>(take_int(kv, "n", cfg.n));
    cfg.L = take_float(kv, "L", cfg.L);
    cfg.mu = static_cast<int>(take_int(kv, "mu", cfg.mu));
    cfg.preset = take_string(kv, "preset", cfg.preset);
    cfg.preset_amplitude = take_float(kv, "preset.amplitude", cfg.preset_amplitude);
    cfg.preset_width = take_float(kv, "preset.width", cfg.preset_width);
    const std::vector<double> boost = take_array(kv, "preset.boost");
    if (boost.size() > 3) throw ConfigError("config: key 'preset.boost' takes at most 3 entries");
    for (std::size_t i = 0; i < boost.size(); ++i) cfg.preset_boost[i] = boost[i];
    cfg.preset_seed = take_int(kv, "preset.seed", cfg.preset_seed);
    cfg.preset_size = take_float(kv, "preset.size", cfg.preset_size);
    cfg.preset_scale = take_float(kv, "preset.scale", cfg.preset_scale);

    cfg.evolution.dt0 = take_float(kv, "evolution.dt0", cfg.evolution.dt0);
    cfg.evolution.t_end = take_float(kv, "evolution.t_end", cfg.evolution.t_end);
    cfg.evolution.cfl_safety = take_float(kv, "evolution.cfl_safety", cfg.evolution.cfl_safety);
    cfg.evolution.blowup_gradient_factor =
        take_float(kv, "evolution.blowup_gradient_factor", cfg.evolution.blowup_gradient_factor);
    cfg.evolution.record_stride =
        static_cast<int>(take_int(kv, "evolution.record_stride", cfg.evolution.record_stride));
    cfg.evolution.nonlinear_rate_constant =
        take_float(kv, "evolution.rate_constant", cfg.evolution.nonlinear_rate_constant);
    cfg.evolution.nyquist_guard_fraction =
        take_float(kv, "evolution.nyquist_guard", cfg.evolution.nyquist_guard_fraction);

    cfg.morawetz_radius = take_float(kv, "morawetz.R", cfg.morawetz_radius);
    if (kv.count("morawetz.cutoff")) cfg.cutoff = take_float(kv, "morawetz.cutoff", 0.0);
    cfg.sample_times = take_array(kv, "sample_times");
    cfg.output_dir = take_string(kv, "output_dir", cfg.output_dir);

    if (!kv.empty()) throw ConfigError("config: unknown key '" + kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

}  // namespace

void RunConfig::validate() const {
    make_grid(dimension, n, L);  // validates dimension / n / L
    if (mu != -1 && mu != 1) throw ConfigError("config: key 'mu' must be -1 or +1");
    evolution.validate();
    const bool named = preset == "gaussian" || preset == "soliton" || preset == "boosted_soliton" ||
                       preset == "perturbed_soliton" || preset == "scaled_soliton";
    const bool from_file = preset.rfind("file:", 0) == 0;
    if (!named && !from_file)
        throw ConfigError("config: key 'preset' has unknown value '" + preset + "'");
    if (from_file) {
        const std::string path = preset.substr(5);
        if (!std::filesystem::exists(path))
            throw ConfigError("config: preset file does not exist: " + path);
    }
    if (!(preset_amplitude > 0.0)) throw ConfigError("config: key 'preset.amplitude' must be > 0");
    if (!(preset_width > 0.0)) throw ConfigError("config: key 'preset.width' must be > 0");
    if (!(preset_size >= 0.0)) throw ConfigError("config: key 'preset.size' must be >= 0");
    if (!(preset_scale >= kMinApplyScale && preset_scale <= kMaxApplyScale))
        throw ConfigError("config: key 'preset.scale' must lie in [1/4, 4]");
    if (morawetz_radius < 0.0) throw ConfigError("config: key 'morawetz.R' must be >= 0");
    if (cutoff && !(*cutoff >= 0.0)) throw ConfigError("config: key 'morawetz.cutoff' must be >= 0");
    for (double t : sample_times)
        if (!(t >= 0.0)) throw ConfigError("config: key 'sample_times' entries must be >= 0");
}

RunConfig parse_config(const std::string& text) { return from_map(parse_document(text)); }

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("override has an empty key: '" + assignment + "'");

    // Round-trip through the same typed map as the file parser, so overrides
    // get identical validation and unknown-key errors.
    std::map<std::string, Value> kv;
    kv["dimension"] = static_cast<long>(cfg.dimension);
    kv["n"] = static_cast<long>(cfg.n);
    kv["L"] = cfg.L;
    kv["mu"] = static_cast<long>(cfg.mu);
    kv["preset"] = cfg.preset;
    kv["preset.amplitude"] = cfg.preset_amplitude;
    kv["preset.width"] = cfg.preset_width;
    kv["preset.boost"] = std::vector<double>{cfg.preset_boost[0], cfg.preset_boost[1],
                                             cfg.preset_boost[2]};
    kv["preset.seed"] = cfg.preset_seed;
    kv["preset.size"] = cfg.preset_size;
    kv["preset.scale"] = cfg.preset_scale;
    kv["evolution.dt0"] = cfg.evolution.dt0;
    kv["evolution.t_end"] = cfg.evolution.t_end;
    kv["evolution.cfl_safety"] = cfg.evolution.cfl_safety;
    kv["evolution.blowup_gradient_factor"] = cfg.evolution.blowup_gradient_factor;
    kv["evolution.record_stride"] = static_cast<long>(cfg.evolution.record_stride);
    kv["evolution.rate_constant"] = cfg.evolution.nonlinear_rate_constant;
    kv["evolution.nyquist_guard"] = cfg.evolution.nyquist_guard_fraction;
    kv["morawetz.R"] = cfg.morawetz_radius;
    if (cfg.cutoff) kv["morawetz.cutoff"] = *cfg.cutoff;
    kv["sample_times"] = cfg.sample_times;
    kv["output_dir"] = cfg.output_dir;

    static const std::vector<std::string> known = {
        "dimension", "n", "L", "mu", "preset", "preset.amplitude", "preset.width",
        "preset.boost", "preset.seed", "preset.size", "preset.scale", "evolution.dt0",
        "evolution.t_end", "evolution.cfl_safety", "evolution.blowup_gradient_factor",
        "evolution.record_stride", "evolution.rate_constant", "evolution.nyquist_guard",
        "morawetz.R", "morawetz.cutoff", "sample_times", "output_dir"};
    if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("config: unknown key '" + key + "'");
    kv[key] = parse_value(key, assignment.substr(eq + 1));
    cfg = from_map(std::move(kv));
}

}  // namespace nls
