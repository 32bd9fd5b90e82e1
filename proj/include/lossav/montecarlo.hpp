#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lossav/model1.hpp"
#include "lossav/model2.hpp"

namespace lossav {

struct SimConfig {
    std::size_t n_paths = 200;
    std::size_t horizon = 600;
    std::size_t burn_in = 100;
    std::uint64_t seed = 1;
    bool enforce_min_panel = true;  // n_paths * (horizon - burn_in) >= 1e4
};

struct MomentReport {
    double rf_mean = 0, rf_sd = 0, pd_mean = 0, pd_sd = 0, erp_mean = 0, erp_sd = 0;
    std::size_t n_paths = 0, horizon = 0, burn_in = 0;
    std::uint64_t seed = 0;
};

// Either model; model 1 carries its solved h.
struct ModelRef {
    const Model1* m1 = nullptr;
    const Model2* m2 = nullptr;
};

MomentReport simulate_moments(const ModelRef& model, const ProcessParams& p, const SimConfig& cfg);

// Model choice plus everything needed to rebuild it for a different preference point.
struct ModelSpec {
    int model = 2;
    QuadratureRule rule;
    DividendLaw law = DividendLaw::stationary;
    std::size_t grid_ne = 41, grid_ny = 41;
    SolverOptions solver;
};

struct SweepRow {
    double value;
    PreferenceParams prefs;
    MomentReport report;
};

void set_pref(PreferenceParams& prefs, const std::string& axis, double value);

std::vector<SweepRow> sweep(const PreferenceParams& base, const ProcessParams& p, const ModelSpec& spec,
                            const std::string& axis, const std::vector<double>& values,
                            const SimConfig& cfg);

struct SeriesRow {
    double x, rf, pd, erp;
};

// axis "eps" sweeps eps_c at fixed y; axis "y" sweeps Y at fixed eps_c
std::vector<SeriesRow> conditional_series(const ModelRef& model, const std::string& axis,
                                          const std::vector<double>& xs, double fixed);

}  // namespace lossav
