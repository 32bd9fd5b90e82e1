#include "lossav/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lossav/errors.hpp"

namespace lossav {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
    double x = 0.0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ArgumentError("config: " + key + " must be a number, got '" + v + "'");
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ArgumentError("config: " + key + " must be a non-negative integer, got '" + v + "'");
    return x;
}

}  // namespace

void parse_grid_spec(const std::string& s, std::size_t& ne, std::size_t& ny) {
    auto x = s.find('x');
    if (x == std::string::npos) throw ArgumentError("grid: expected <ne>x<ny>, got '" + s + "'");
    ne = to_uint("grid", s.substr(0, x));
    ny = to_uint("grid", s.substr(x + 1));
    if (ne < 2 || ny < 2) throw ArgumentError("grid: each axis needs at least 2 nodes");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(ln) + ": expected key = value");
        std::string k = trim(line.substr(0, eq));
        if (k.empty()) throw ArgumentError("config line " + std::to_string(ln) + ": empty key");
        kv[k] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

void apply_setting(RunConfig& c, const std::string& k, const std::string& v) {
    if (k == "beta") c.prefs.beta = to_real(k, v);
    else if (k == "theta") c.prefs.theta = to_real(k, v);
    else if (k == "b") c.prefs.b = to_real(k, v);
    else if (k == "lambda") c.prefs.lambda = to_real(k, v);
    else if (k == "gamma") c.prefs.gamma = to_real(k, v);
    else if (k == "mu_c") c.params.mu_c = to_real(k, v);
    else if (k == "sigma_c") c.params.sigma_c = to_real(k, v);
    else if (k == "phi") c.params.phi = to_real(k, v);
    else if (k == "kappa") c.params.kappa = to_real(k, v);
    else if (k == "sigma_y") c.params.sigma_y = to_real(k, v);
    else if (k == "model") c.model = static_cast<int>(to_uint(k, v));
    else if (k == "grid") parse_grid_spec(v, c.grid_ne, c.grid_ny);
    else if (k == "quad_order") c.quad_order = static_cast<int>(to_uint(k, v));
    else if (k == "n_paths") c.sim.n_paths = to_uint(k, v);
    else if (k == "horizon") c.sim.horizon = to_uint(k, v);
    else if (k == "burn_in") c.sim.burn_in = to_uint(k, v);
    else if (k == "seed") c.sim.seed = to_uint(k, v);
    else if (k == "format") c.format = v;
    else if (k == "dividend_law") c.law = dividend_law_from_string(v);
    else if (k == "tol") c.solver.tol = to_real(k, v);
    else if (k == "max_iter") c.solver.max_iter = static_cast<int>(to_uint(k, v));
    else throw ArgumentError("config: unknown key '" + k + "'");
}

void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
}

void RunConfig::validate() const {
    prefs.validate();
    params.validate();
    if (model != 1 && model != 2) throw ArgumentError("model must be 1 or 2");
    if (grid_ne < 2 || grid_ny < 2) throw ArgumentError("grid: each axis needs at least 2 nodes");
    if (quad_order < 1 || quad_order > 200) throw ArgumentError("quad_order must be in [1,200]");
    if (format != "csv" && format != "json") throw ArgumentError("format must be csv or json");
    if (!(solver.tol > 0.0)) throw ArgumentError("tol must be > 0");
    if (solver.max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    if (sim.n_paths < 1) throw ArgumentError("n_paths must be >= 1");
    if (!(sim.burn_in + 1 < sim.horizon)) throw ArgumentError("burn_in must be < horizon - 1");
}

ModelSpec RunConfig::spec() const {
    ModelSpec s;
    s.model = model;
    s.rule = rule();
    s.law = law;
    s.grid_ne = grid_ne;
    s.grid_ny = grid_ny;
    s.solver = solver;
    return s;
}

}  // namespace lossav
