#pragma once

/**
 * @file config.hpp
 * @brief Experiment configuration: a line-oriented `key = value` file with
 *        `#` comments and complex literals written `re+imi`.
 *
 * Every key is optional and falls back to the unit-disk defaults below.
 * Unknown and repeated keys are rejected so that typos never pass silently.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/text.hpp>
#include <bpd/rational.hpp>
#include <bpd/region.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bpd::harness {

struct RegionSpec {
    /// disk | square | swiss_cheese | file
    std::string shape = "disk";
    Complex center = 0.0;
    double radius = 1.0;
    int resolution = 1024;
    int holes = 0;
    double hole_scale = 0.5;
    std::uint64_t seed = 1;
    /// RGN1 file for shape = file
    std::string file;
};

struct Tolerances {
    double theorem1 = 1e-2;
    double theorem2 = 2e-2;
    double functional = 2e-3;
    double derivative = 2e-3;
    double second_derivative = 5e-3;
    double compose = 1e-10;
    double bound_slack = 1.1;
};

struct ExperimentConfig {
    RegionSpec region;
    double p = 3.0;
    Complex x0 = 0.0;
    int t = 1;
    double delta0 = 0.1;
    std::vector<Complex> target_poles{Complex(2.0)};
    std::vector<Complex> target_poly;
    std::vector<int> basis_degrees{0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> density_n{4, 8, 16, 32};
    std::optional<Complex> density_control;
    std::vector<Complex> diffquot_h{Complex(0.1), Complex(0.05), Complex(0.025), Complex(0.0125), Complex(0.00625)};
    Complex bishop_x = 0.5;
    double bishop_delta = 0.95;
    Tolerances tol;
    /// calibrated | analytic | moment_matched, for the built-in disk weight
    std::string normalization = "calibrated";
    /// WGT1 file holding an order-t representing weight at x0
    std::string weights_file;
    std::string out = "out";
    bool allow_p_le_2 = false;
    unsigned threads = 0;
    int irls_max_iters = 60;
    double irls_tol = 1e-9;

    double q() const { return p / (p - 1.0); }

    RationalFunction target() const {
        RationalFunction f = RationalFunction::polynomial(target_poly);
        for (const Complex a : target_poles) f = f + RationalFunction::pole(a);
        return f;
    }

    std::string target_label() const {
        std::string s;
        for (std::size_t k = 0; k < target_poly.size(); ++k) {
            if (!s.empty()) s += " + ";
            s += "(" + text::format_complex(target_poly[k]) + ")z^" + std::to_string(k);
        }
        for (const Complex a : target_poles) {
            if (!s.empty()) s += " + ";
            s += "1/(z-(" + text::format_complex(a) + "))";
        }
        return s.empty() ? "0" : s;
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            out.emplace_back(text::trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!text::trim(cur).empty() || !out.empty()) out.emplace_back(text::trim(cur));
    for (const auto& s : out)
        if (s.empty()) throw ConfigError("empty entry in list '" + v + "'");
    return out;
}

inline double as_double(const std::string& key, const std::string& v) {
    try {
        return text::parse_double(v);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

inline long long as_int(const std::string& key, const std::string& v) {
    try {
        return text::parse_int(v);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

inline Complex as_complex(const std::string& key, const std::string& v) {
    try {
        return text::parse_complex(v);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a complex number written re+imi, got '" + v + "'");
    }
}

inline bool as_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<int> as_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(static_cast<int>(as_int(key, s)));
    return out;
}

inline std::vector<Complex> as_complex_list(const std::string& key, const std::string& v) {
    std::vector<Complex> out;
    for (const auto& s : split_list(v)) out.push_back(as_complex(key, s));
    return out;
}

inline std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace detail

/// Parses `key = value` lines. Relative file paths are resolved against base_dir.
inline ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = "") {
    ExperimentConfig cfg;
    std::map<std::string, std::string> seen;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = text::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(text::trim(t.substr(0, eq)));
        const std::string v(text::trim(t.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": missing key");
        if (v.empty()) throw ConfigError("line " + std::to_string(lineno) + ": missing value for '" + key + "'");
        if (seen.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": '" + key + "' given twice");
        seen[key] = v;
        using namespace detail;
        if (key == "region.shape") cfg.region.shape = v;
        else if (key == "region.center") cfg.region.center = as_complex(key, v);
        else if (key == "region.radius") cfg.region.radius = as_double(key, v);
        else if (key == "region.resolution") cfg.region.resolution = static_cast<int>(as_int(key, v));
        else if (key == "region.holes") cfg.region.holes = static_cast<int>(as_int(key, v));
        else if (key == "region.hole_scale") cfg.region.hole_scale = as_double(key, v);
        else if (key == "region.seed") cfg.region.seed = static_cast<std::uint64_t>(as_int(key, v));
        else if (key == "region.file") cfg.region.file = resolve_path(v, base_dir);
        else if (key == "p") cfg.p = as_double(key, v);
        else if (key == "x0") cfg.x0 = as_complex(key, v);
        else if (key == "t") cfg.t = static_cast<int>(as_int(key, v));
        else if (key == "delta0") cfg.delta0 = as_double(key, v);
        else if (key == "target.poles") cfg.target_poles = v == "none" ? std::vector<Complex>{} : as_complex_list(key, v);
        else if (key == "target.poly") cfg.target_poly = as_complex_list(key, v);
        else if (key == "basis.degrees") cfg.basis_degrees = as_int_list(key, v);
        else if (key == "density.n") cfg.density_n = as_int_list(key, v);
        else if (key == "density.control") cfg.density_control = as_complex(key, v);
        else if (key == "diffquot.h") cfg.diffquot_h = as_complex_list(key, v);
        else if (key == "bishop.x") cfg.bishop_x = as_complex(key, v);
        else if (key == "bishop.delta") cfg.bishop_delta = as_double(key, v);
        else if (key == "tol.theorem1") cfg.tol.theorem1 = as_double(key, v);
        else if (key == "tol.theorem2") cfg.tol.theorem2 = as_double(key, v);
        else if (key == "tol.functional") cfg.tol.functional = as_double(key, v);
        else if (key == "tol.D1") cfg.tol.derivative = as_double(key, v);
        else if (key == "tol.D2") cfg.tol.second_derivative = as_double(key, v);
        else if (key == "tol.compose") cfg.tol.compose = as_double(key, v);
        else if (key == "tol.bound_slack") cfg.tol.bound_slack = as_double(key, v);
        else if (key == "functional.normalization") cfg.normalization = v;
        else if (key == "weights.file") cfg.weights_file = resolve_path(v, base_dir);
        else if (key == "out") cfg.out = v;
        else if (key == "allow_p_le_2") cfg.allow_p_le_2 = as_bool(key, v);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(as_int(key, v));
        else if (key == "irls.max_iters") cfg.irls_max_iters = static_cast<int>(as_int(key, v));
        else if (key == "irls.tol") cfg.irls_tol = as_double(key, v);
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text_body, const std::string& base_dir = "") {
    std::istringstream in(text_body);
    return parse_config(in, base_dir);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, std::filesystem::path(path).parent_path().string());
}

/// Checks the invariants every experiment relies on. Called after command-line
/// overrides have been applied.
inline void validate(const ExperimentConfig& cfg) {
    if (!(cfg.p > 1.0) || !std::isfinite(cfg.p))
        throw ConfigError("p = " + text::format_double(cfg.p) + " must be a finite number above 1");
    if (!(cfg.p > 2.0) && !cfg.allow_p_le_2)
        throw ConfigError("p = " + text::format_double(cfg.p) +
                          " is outside the supported range p > 2: for 1 <= p < 2 rational functions are dense in "
                          "L^p and no bounded point derivations exist, and p = 2 is open; pass --allow-p-le-2 to "
                          "run anyway");
    if (!(cfg.delta0 > 0.0 && cfg.delta0 < 1.0)) throw ConfigError("delta0 must lie in (0, 1)");
    if (cfg.t < 0 || cfg.t > 8) throw ConfigError("t must lie in [0, 8]");
    const auto& r = cfg.region;
    if (r.shape != "disk" && r.shape != "square" && r.shape != "swiss_cheese" && r.shape != "file")
        throw ConfigError("region.shape must be disk, square, swiss_cheese or file");
    if (r.shape == "file" && r.file.empty()) throw ConfigError("region.shape = file needs region.file");
    if (r.resolution < 8) throw ConfigError("region.resolution must be at least 8");
    if (!(r.radius > 0.0)) throw ConfigError("region.radius must be positive");
    if (cfg.density_n.empty()) throw ConfigError("density.n must list at least one n");
    for (std::size_t i = 0; i < cfg.density_n.size(); ++i)
        if (cfg.density_n[i] < 1 || (i > 0 && cfg.density_n[i] <= cfg.density_n[i - 1]))
            throw ConfigError("density.n must be positive and increasing");
    if (cfg.basis_degrees.empty()) throw ConfigError("basis.degrees must list at least one degree");
    for (std::size_t i = 0; i < cfg.basis_degrees.size(); ++i)
        if (cfg.basis_degrees[i] < 0 || (i > 0 && cfg.basis_degrees[i] <= cfg.basis_degrees[i - 1]))
            throw ConfigError("basis.degrees must be non-negative and increasing");
    for (const Complex h : cfg.diffquot_h)
        if (h == Complex(0.0)) throw ConfigError("diffquot.h entries must be nonzero");
    if (!(cfg.bishop_delta > 0.0 && cfg.bishop_delta < 1.0)) throw ConfigError("bishop.delta must lie in (0, 1)");
    if (cfg.normalization != "calibrated" && cfg.normalization != "analytic" && cfg.normalization != "moment_matched")
        throw ConfigError("functional.normalization must be calibrated, analytic or moment_matched");
    if (cfg.irls_max_iters < 1) throw ConfigError("irls.max_iters must be positive");
}

inline RegionPtr make_region(const RegionSpec& spec) {
    try {
        if (spec.shape == "disk") return std::make_shared<const Region>(build_disk(spec.center, spec.radius, spec.resolution));
        if (spec.shape == "square") {
            const Complex origin = spec.center - Complex(spec.radius, spec.radius);
            return std::make_shared<const Region>(build_square(origin, 2.0 * spec.radius, spec.resolution));
        }
        if (spec.shape == "swiss_cheese") {
            if (spec.center != Complex(0.0)) throw ConfigError("swiss_cheese regions are centered at 0");
            return std::make_shared<const Region>(
                build_swiss_cheese(spec.radius, spec.holes, spec.hole_scale, spec.seed, spec.resolution));
        }
        std::ifstream in(spec.file);
        if (!in) throw ConfigError("cannot open region file '" + spec.file + "'");
        return std::make_shared<const Region>(Region::from_rgn1(in));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("region: ") + e.what());
    }
}

}  // namespace bpd::harness
