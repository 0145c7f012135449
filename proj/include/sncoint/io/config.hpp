#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sncoint/estimators/restriction.hpp"
#include "sncoint/io/csv.hpp"
#include "sncoint/montecarlo/experiment.hpp"

namespace sncoint {

/// Flat key = value settings. '#' starts a comment; blank lines are skipped.
using KeyValueConfig = std::map<std::string, std::string>;

inline KeyValueConfig read_key_value(std::istream& is) {
    KeyValueConfig out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed == "\r") continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = detail::trim(trimmed.substr(0, eq));
        std::string value = detail::trim(trimmed.substr(eq + 1));
        if (!value.empty() && value.back() == '\r') value.pop_back();
        if (key.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline KeyValueConfig read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    return read_key_value(in);
}

/// A Monte Carlo run described by a config file.
struct ExperimentSpec {
    enum class Kind { Size, Power };
    Kind kind = Kind::Size;
    DgpConfig dgp;
    TestBattery battery;
    Index reps = 1000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::vector<double> grid = default_power_grid();
};

namespace detail {

inline long parse_integer(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("config key '" + key + "': expected an integer, got '" + text + "'");
}

} // namespace detail

/// Recognised keys: kind (size|power), T, m, rho1, rho2, rho (sets both),
/// rho3, phi, a1, b1, beta, burn_in, det, reps, seed, workers, tests
/// (comma list of test names), alpha, kernel, bandwidth, B, order, grid.
inline ExperimentSpec experiment_from_config(const KeyValueConfig& cfg) {
    static const std::set<std::string> known{"kind", "T",    "m",    "rho1",  "rho2",  "rho",    "rho3",
                                             "phi",  "a1",   "b1",   "beta",  "burn_in", "det",  "reps",
                                             "seed", "workers", "tests", "alpha", "kernel", "bandwidth", "B",
                                             "order", "grid"};
    for (const auto& [k, v] : cfg)
        if (!known.count(k)) throw InputError("unknown config key '" + k + "'");

    ExperimentSpec spec;
    auto num = [&](const std::string& key, double& target) {
        if (auto it = cfg.find(key); it != cfg.end()) target = detail::parse_double(it->second, key);
    };
    auto integer = [&](const std::string& key, auto& target) {
        if (auto it = cfg.find(key); it != cfg.end())
            target = static_cast<std::remove_reference_t<decltype(target)>>(detail::parse_integer(it->second, key));
    };
    if (auto it = cfg.find("kind"); it != cfg.end()) {
        if (it->second == "size") spec.kind = ExperimentSpec::Kind::Size;
        else if (it->second == "power") spec.kind = ExperimentSpec::Kind::Power;
        else throw InputError("config key 'kind': expected size or power");
    }
    integer("T", spec.dgp.T);
    Index m = spec.dgp.m();
    integer("m", m);
    detail::require(m >= 1, "m must be at least 1");
    spec.dgp.beta = Vector::Ones(m);
    if (auto it = cfg.find("beta"); it != cfg.end()) {
        const Vector b = parse_vector(it->second);
        spec.dgp.beta = b.size() == 1 ? Vector(Vector::Constant(m, b(0))) : b;
        detail::require(spec.dgp.beta.size() == m, "beta must have 1 or m entries");
    }
    double rho = 0.0;
    if (cfg.count("rho")) {
        num("rho", rho);
        spec.dgp.rho1 = spec.dgp.rho2 = rho;
    }
    num("rho1", spec.dgp.rho1);
    num("rho2", spec.dgp.rho2);
    num("rho3", spec.dgp.rho3);
    num("phi", spec.dgp.phi);
    num("a1", spec.dgp.a1);
    num("b1", spec.dgp.b1);
    integer("burn_in", spec.dgp.burn_in);
    if (auto it = cfg.find("det"); it != cfg.end()) spec.dgp.det = parse_deterministic(it->second);
    integer("reps", spec.reps);
    integer("seed", spec.seed);
    integer("workers", spec.workers);
    num("alpha", spec.battery.alpha);
    integer("B", spec.battery.B);
    spec.battery.burn_in = spec.dgp.burn_in;
    if (auto it = cfg.find("kernel"); it != cfg.end()) spec.battery.kernel.kind = parse_kernel(it->second);
    if (auto it = cfg.find("bandwidth"); it != cfg.end() && it->second != "andrews")
        spec.battery.kernel = KernelSpec::fixed(spec.battery.kernel.kind, detail::parse_double(it->second, "bandwidth"));
    if (auto it = cfg.find("order"); it != cfg.end()) spec.battery.order_rule = parse_order_rule(it->second);
    if (auto it = cfg.find("tests"); it != cfg.end()) {
        spec.battery.methods.clear();
        for (auto name : detail::split(it->second, ','))
            spec.battery.methods.push_back(parse_test_method(detail::trim(name)));
        detail::require(!spec.battery.methods.empty(), "empty test list");
    }
    if (auto it = cfg.find("grid"); it != cfg.end()) {
        const Vector g = parse_vector(it->second);
        spec.grid.assign(g.data(), g.data() + g.size());
    }
    spec.dgp.validate();
    return spec;
}

} // namespace sncoint
