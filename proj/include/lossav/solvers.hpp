#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lossav/errors.hpp"
#include "lossav/grid.hpp"

namespace lossav {

struct FixedPointResult {
    GridFunction value;
    int iterations = 0;
    std::vector<double> residual_history;
};

// v <- map(v) until the sup-norm step drops below tol
template <class Map>
FixedPointResult fixed_point(Map&& map, GridFunction init, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ArgumentError("fixed_point: tol must be > 0");
    if (max_iter < 1) throw ArgumentError("fixed_point: max_iter must be >= 1");
    FixedPointResult r;
    r.value = std::move(init);
    for (int it = 1; it <= max_iter; ++it) {
        GridFunction next = map(r.value);
        double d = sup_diff(next, r.value);
        r.value = std::move(next);
        r.residual_history.push_back(d);
        r.iterations = it;
        if (!std::isfinite(d))
            throw ConvergenceError("fixed_point: iterate became non-finite at step " +
                                       std::to_string(it), r.residual_history);
        if (d < tol) return r;
    }
    throw ConvergenceError("fixed_point: no convergence after " + std::to_string(max_iter) +
                               " iterations, last residual " + format_double(r.residual_history.back()),
                           r.residual_history);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace lossav
