#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lossav/model1.hpp"
#include "lossav/model2.hpp"
#include "lossav/montecarlo.hpp"

namespace lossav {

struct RunConfig {
    PreferenceParams prefs;
    ProcessParams params;
    int model = 2;
    std::size_t grid_ne = 41, grid_ny = 41;
    int quad_order = 21;
    SimConfig sim;
    std::string format = "json";
    DividendLaw law = DividendLaw::stationary;
    SolverOptions solver;

    void validate() const;
    QuadratureRule rule() const { return gauss_hermite(quad_order); }
    ModelSpec spec() const;
};

// flat `key = value` lines, `#` starts a comment
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);
// applies one setting; unknown keys and bad values throw ArgumentError naming the key
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& kv);
void parse_grid_spec(const std::string& s, std::size_t& ne, std::size_t& ny);

}  // namespace lossav
