#include "lossav/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lossav/errors.hpp"

namespace lossav {

Grid2D::Grid2D(std::vector<double> eps, std::vector<double> logy)
    : eps_axis(std::move(eps)), logy_axis(std::move(logy)) {
    if (eps_axis.size() < 2 || logy_axis.size() < 2)
        throw ArgumentError("grid: each axis needs at least 2 nodes");
    for (std::size_t i = 0; i < eps_axis.size(); ++i) {
        if (!(eps_axis[i] > 0.0)) throw ArgumentError("grid: eps axis must be > 0");
        if (i && !(eps_axis[i] > eps_axis[i - 1]))
            throw ArgumentError("grid: eps axis must be strictly ascending");
    }
    for (std::size_t j = 0; j < logy_axis.size(); ++j) {
        if (!(logy_axis[j] >= 0.0)) throw ArgumentError("grid: log Y axis must be >= 0");
        if (j && !(logy_axis[j] > logy_axis[j - 1]))
            throw ArgumentError("grid: log Y axis must be strictly ascending");
    }
}

Grid2D make_default_grid(const ProcessParams& p, std::size_t ne, std::size_t ny, double extra_sd) {
    if (ne < 2 || ny < 2) throw ArgumentError("grid: need at least 2 nodes per axis");
    double he = std::max(4.0 * p.sigma_c, 0.02);
    std::vector<double> eps(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        double u = -he + 2.0 * he * static_cast<double>(i) / static_cast<double>(ne - 1);
        eps[i] = std::exp(p.mu_c + u);
    }
    double sd = std::sqrt(stationary_log_y(p).variance);
    double hy = std::max((4.0 + extra_sd) * sd, 0.1);
    double lo = std::max(0.0, p.kappa - hy);
    double hi = std::max(p.kappa + hy, lo + 0.2);
    std::vector<double> ly(ny);
    for (std::size_t j = 0; j < ny; ++j)
        ly[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(ny - 1);
    ly.front() = lo;
    ly.back() = hi;
    return Grid2D(std::move(eps), std::move(ly));
}

Stencil locate(const std::vector<double>& axis, double x) {
    Stencil s;
    const std::size_t n = axis.size();
    if (x <= axis.front()) {
        s.lo = 0;
        s.t = 0.0;
        s.clamped = x < axis.front();
        return s;
    }
    if (x >= axis.back()) {
        s.lo = n - 2;
        s.t = 1.0;
        s.clamped = x > axis.back();
        return s;
    }
    auto it = std::upper_bound(axis.begin(), axis.end(), x);
    s.lo = static_cast<std::size_t>(it - axis.begin()) - 1;
    s.t = (x - axis[s.lo]) / (axis[s.lo + 1] - axis[s.lo]);
    return s;
}

GridFunction::GridFunction(Grid2D g, double fill) : grid(std::move(g)) {
    values.assign(grid.ne() * grid.ny(), fill);
}

void GridFunction::check_finite() const {
    if (values.size() != grid.ne() * grid.ny())
        throw NumericalError("grid function: value count does not match grid");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) {
            std::ostringstream os;
            os.precision(17);
            os << "grid function: non-finite value at eps=" << grid.eps_axis[k / grid.ny()]
               << ", logy=" << grid.logy_axis[k % grid.ny()];
            throw NumericalError(os.str());
        }
    }
}

double interp(const GridFunction& gf, double eps, double logy, ClampCounter* counter) {
    Stencil se = locate(gf.grid.eps_axis, eps);
    Stencil sy = locate(gf.grid.logy_axis, logy);
    if (counter) {
        ++counter->evaluations;
        if (se.clamped || sy.clamped) ++counter->clamped;
    }
    // exact node hits return the stored value untouched
    if (se.t == 0.0 && sy.t == 0.0) return gf.at(se.lo, sy.lo);
    return interp(gf, se, sy);
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        d = std::max(d, std::fabs(a.values[k] - b.values[k]));
    return d;
}

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

static double parse_exact(const std::string& s, std::size_t line) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw DataError("grid cache line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

void save_grid_function(const GridFunction& gf, const std::string& stem, const nlohmann::json& meta) {
    std::ofstream csv(stem + ".csv");
    if (!csv) throw ArgumentError("cannot write " + stem + ".csv");
    csv << "eps,logy,value\n";
    for (std::size_t i = 0; i < gf.grid.ne(); ++i)
        for (std::size_t j = 0; j < gf.grid.ny(); ++j)
            csv << format_double(gf.grid.eps_axis[i]) << ',' << format_double(gf.grid.logy_axis[j])
                << ',' << format_double(gf.at(i, j)) << '\n';
    nlohmann::json side;
    side["eps_axis"] = gf.grid.eps_axis;
    side["logy_axis"] = gf.grid.logy_axis;
    side["meta"] = meta;
    std::ofstream js(stem + ".json");
    if (!js) throw ArgumentError("cannot write " + stem + ".json");
    js << side.dump(2) << '\n';
}

GridFunction load_grid_function(const std::string& stem, nlohmann::json* meta) {
    std::ifstream js(stem + ".json");
    if (!js) throw DataError("cannot open " + stem + ".json");
    nlohmann::json side;
    try {
        js >> side;
    } catch (const std::exception& e) {
        throw DataError(stem + ".json: " + e.what());
    }
    Grid2D g(side.at("eps_axis").get<std::vector<double>>(),
             side.at("logy_axis").get<std::vector<double>>());
    if (meta) *meta = side.value("meta", nlohmann::json::object());
    GridFunction gf(g);
    std::ifstream csv(stem + ".csv");
    if (!csv) throw DataError("cannot open " + stem + ".csv");
    std::string line;
    std::getline(csv, line);
    if (line.rfind("eps,logy,value", 0) != 0) throw DataError(stem + ".csv: bad header");
    std::size_t k = 0, ln = 1;
    while (std::getline(csv, line)) {
        ++ln;
        if (line.empty()) continue;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw DataError(stem + ".csv line " + std::to_string(ln) + ": expected 3 fields");
        if (k >= gf.values.size()) throw DataError(stem + ".csv: too many rows");
        double e = parse_exact(line.substr(0, c1), ln);
        double ly = parse_exact(line.substr(c1 + 1, c2 - c1 - 1), ln);
        std::size_t i = k / g.ny(), j = k % g.ny();
        if (e != g.eps_axis[i] || ly != g.logy_axis[j])
            throw DataError(stem + ".csv line " + std::to_string(ln) + ": node does not match axes");
        gf.values[k++] = parse_exact(line.substr(c2 + 1), ln);
    }
    if (k != gf.values.size()) throw DataError(stem + ".csv: too few rows");
    return gf;
}

}  // namespace lossav
