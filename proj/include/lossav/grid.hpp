#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "lossav/processes.hpp"

namespace lossav {

struct Grid2D {
    std::vector<double> eps_axis;
    std::vector<double> logy_axis;

    Grid2D() = default;
    Grid2D(std::vector<double> eps, std::vector<double> logy);
    std::size_t ne() const { return eps_axis.size(); }
    std::size_t ny() const { return logy_axis.size(); }
};

// eps over exp(mu_c +- 4 sigma_c) log-uniform, log Y over kappa +- (4 + extra) sigma_stat,
// floored at 0. Tiny spans are padded so that degenerate processes still get a 2-D grid.
Grid2D make_default_grid(const ProcessParams& p, std::size_t ne = 41, std::size_t ny = 41,
                         double extra_sd = 0.0);

// linear interpolation weight on one axis
struct Stencil {
    std::size_t lo = 0;
    double t = 0.0;  // weight on lo+1
    bool clamped = false;
};
Stencil locate(const std::vector<double>& axis, double x);

struct GridFunction {
    Grid2D grid;
    std::vector<double> values;  // index i*ny + j, i over eps, j over logy

    GridFunction() = default;
    GridFunction(Grid2D g, double fill = 0.0);
    double& at(std::size_t i, std::size_t j) { return values[i * grid.ny() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * grid.ny() + j]; }
    void check_finite() const;
};

struct ClampCounter {
    std::size_t evaluations = 0;
    std::size_t clamped = 0;
};

double interp(const GridFunction& gf, double eps, double logy, ClampCounter* counter = nullptr);
inline double interp(const GridFunction& gf, const Stencil& se, const Stencil& sy) {
    const std::size_t ny = gf.grid.ny();
    const double* v = gf.values.data() + se.lo * ny + sy.lo;
    double a = v[0] + sy.t * (v[1] - v[0]);
    double b = v[ny] + sy.t * (v[ny + 1] - v[ny]);
    return a + se.t * (b - a);
}

double sup_diff(const GridFunction& a, const GridFunction& b);

// CSV `eps,logy,value` at <stem>.csv plus <stem>.json holding axes and `meta`
void save_grid_function(const GridFunction& gf, const std::string& stem, const nlohmann::json& meta);
GridFunction load_grid_function(const std::string& stem, nlohmann::json* meta = nullptr);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace lossav
