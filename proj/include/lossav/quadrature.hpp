#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "lossav/errors.hpp"
#include "lossav/processes.hpp"

namespace lossav {

// Gauss-Hermite rule for E[g(Z)], Z ~ N(0,1); weights sum to 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
};

QuadratureRule gauss_hermite(int order);

namespace detail {
[[noreturn]] void non_finite(const char* where, double a, double b);
}

// E[f(eps)] with log eps ~ N(mu_c, sigma_c^2)
template <class F>
double expect_eps(const QuadratureRule& rule, F&& f, const ProcessParams& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double e = std::exp(p.mu_c + p.sigma_c * rule.nodes[i]);
        double v = f(e);
        if (!std::isfinite(v)) detail::non_finite("expect_eps", e, NAN);
        s += rule.weights[i] * v;
    }
    return s;
}

// E_t[f(eps', logy')] with logy' from the AR(1) step out of logy_now
template <class F>
double expect_joint(const QuadratureRule& rule, F&& f, const ProcessParams& p, double logy_now) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        double ly = step_log_y(p, logy_now, rule.nodes[j]);
        double inner = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double e = std::exp(p.mu_c + p.sigma_c * rule.nodes[i]);
            double v = f(e, ly);
            if (!std::isfinite(v)) detail::non_finite("expect_joint", e, ly);
            inner += rule.weights[i] * v;
        }
        s += rule.weights[j] * inner;
    }
    return s;
}

// 1-D expectation of k(logy') under the AR(1) step
template <class F>
double expect_logy(const QuadratureRule& rule, F&& k, const ProcessParams& p, double logy_now) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        double ly = step_log_y(p, logy_now, rule.nodes[j]);
        double v = k(ly);
        if (!std::isfinite(v)) detail::non_finite("expect_logy", NAN, ly);
        s += rule.weights[j] * v;
    }
    return s;
}

}  // namespace lossav
