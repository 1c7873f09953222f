#include "nslab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nslab {

namespace {

using nlohmann::json;

const json& need(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

double need_number(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number()) throw ConfigError(path.empty() ? key : path + "." + key, "expected a number");
    return v.get<double>();
}

double opt_number(const json& j, const std::string& key, double fallback, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(path.empty() ? key : path + "." + key, "expected a number");
    return it->get<double>();
}

std::vector<double> opt_number_list(const json& j, const std::string& key, std::vector<double> fallback,
                                    const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_array()) throw ConfigError(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_number())
            throw ConfigError(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back((*it)[i].get<double>());
    }
    if (out.empty()) throw ConfigError(path + "." + key, "empty list");
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("<document>", "top level must be an object");

    ExperimentConfig cfg;
    cfg.trunc = static_cast<int>(need_number(j, "N", ""));
    if (cfg.trunc < 1) throw ConfigError("N", "truncation must be >= 1");
    cfg.integrator.nu = need_number(j, "nu", "");
    if (cfg.integrator.nu < 0) throw ConfigError("nu", "viscosity must be nonnegative");
    cfg.integrator.dt = need_number(j, "dt", "");
    if (cfg.integrator.dt <= 0) throw ConfigError("dt", "time step must be positive");
    cfg.horizon = opt_number(j, "T", 1.0, "");
    if (cfg.horizon < 0) throw ConfigError("T", "horizon must be nonnegative");
    cfg.integrator.seed = static_cast<std::uint64_t>(opt_number(j, "seed", 0.0, ""));

    if (auto it = j.find("scheme"); it != j.end()) {
        if (!it->is_string()) throw ConfigError("scheme", "expected a string");
        const std::string s = it->get<std::string>();
        if (s == "exp_euler_maruyama" || s == "exp_euler") cfg.integrator.scheme = Scheme::ExpEulerMaruyama;
        else if (s == "deterministic_rk4" || s == "rk4") cfg.integrator.scheme = Scheme::DeterministicRK4;
        else throw ConfigError("scheme", "unknown scheme '" + s + "'");
    }
    if (auto it = j.find("nonlinear"); it != j.end()) {
        if (!it->is_boolean()) throw ConfigError("nonlinear", "expected a boolean");
        cfg.integrator.nonlinear = it->get<bool>();
    }

    if (auto noise = j.find("noise"); noise != j.end()) {
        if (!noise->is_object()) throw ConfigError("noise", "expected an object");
        const json& modes = need(*noise, "modes", "noise");
        if (!modes.is_array()) throw ConfigError("noise.modes", "expected an array");
        std::set<std::pair<int, int>> seen;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const std::string path = "noise.modes[" + std::to_string(i) + "]";
            const json& entry = modes[i];
            if (!entry.is_object()) throw ConfigError(path, "expected an object {k:[k1,k2], q}");
            const json& k = need(entry, "k", path);
            if (!k.is_array() || k.size() != 2 || !k[0].is_number_integer() || !k[1].is_number_integer())
                throw ConfigError(path + ".k", "expected an integer pair [k1,k2]");
            const int k1 = k[0].get<int>(), k2 = k[1].get<int>();
            if (k1 == 0 && k2 == 0) throw ConfigError(path + ".k", "the zero mode cannot be forced");
            if (std::max(std::abs(k1), std::abs(k2)) > cfg.trunc)
                throw ConfigError(path, "mode outside the truncation N=" + std::to_string(cfg.trunc));
            if (!seen.insert({k1, k2}).second) throw ConfigError(path, "duplicate mode");
            const double q = need_number(entry, "q", path);
            if (q <= 0) throw ConfigError(path + ".q", "amplitude must be positive");
            cfg.modes.push_back({Mode(k1, k2), q});
        }
        ModeSet ms;
        for (const auto& e : cfg.modes) ms.insert(e.k);
        if (!cfg.modes.empty() && !ms.is_symmetric())
            throw ConfigError("noise.modes", "forced mode set must be symmetric");
    }
    if (cfg.integrator.scheme == Scheme::ExpEulerMaruyama && cfg.modes.empty() && cfg.integrator.nu == 0.0)
        throw ConfigError("nu", "nu = 0 requires the rk4 scheme and no forcing");

    if (auto exp = j.find("experiment"); exp != j.end()) {
        if (!exp->is_object()) throw ConfigError("experiment", "expected an object");
        ExperimentBlock& b = cfg.experiment;
        b.betas = opt_number_list(*exp, "betas", b.betas, "experiment");
        for (std::size_t i = 0; i < b.betas.size(); ++i)
            if (b.betas[i] <= 0)
                throw ConfigError("experiment.betas[" + std::to_string(i) + "]", "beta must be positive");
        b.intervals = static_cast<std::size_t>(opt_number(*exp, "intervals", static_cast<double>(b.intervals), "experiment"));
        b.replicas = static_cast<std::size_t>(opt_number(*exp, "replicas", static_cast<double>(b.replicas), "experiment"));
        b.cut = static_cast<int>(opt_number(*exp, "cut", b.cut, "experiment"));
        b.alpha = opt_number(*exp, "alpha", b.alpha, "experiment");
        b.eps_list = opt_number_list(*exp, "eps", b.eps_list, "experiment");
        b.horizons = opt_number_list(*exp, "horizons", b.horizons, "experiment");
        b.ensemble = static_cast<std::size_t>(opt_number(*exp, "ensemble", static_cast<double>(b.ensemble), "experiment"));
        b.xi_seed = static_cast<std::uint64_t>(opt_number(*exp, "xi_seed", static_cast<double>(b.xi_seed), "experiment"));
        b.fd_eps = opt_number(*exp, "fd_eps", b.fd_eps, "experiment");
        if (b.cut > cfg.trunc) throw ConfigError("experiment.cut", "cut exceeds the truncation");
        // elliptic consistency: the cut may not exceed the forced set
        if (!cfg.modes.empty()) {
            ModeSet forced;
            for (const auto& e : cfg.modes) forced.insert(e.k);
            int max_full = 0;
            bool full = true;
            for (int c = 1; c <= cfg.trunc && full; ++c) {
                for (int k1 = -c; k1 <= c && full; ++k1)
                    for (int k2 = -c; k2 <= c; ++k2) {
                        if (std::max(std::abs(k1), std::abs(k2)) != c) continue;
                        if (k1 == 0 && k2 == 0) continue;
                        if (!forced.contains(Mode(k1, k2))) { full = false; break; }
                    }
                if (full) max_full = c;
            }
            if (exp->contains("cut") && b.cut > max_full)
                throw ConfigError("experiment.cut",
                                  "elliptic cut exceeds the fully forced shell (max " +
                                      std::to_string(max_full) + ")");
        }
    }

    if (auto it = j.find("out"); it != j.end()) {
        if (!it->is_string()) throw ConfigError("out", "expected a string path");
        cfg.out_path = it->get<std::string>();
    }

    cfg.raw_json = j.dump();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("<file>", "cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : cfg.raw_json) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace nslab
