#include "lossav/preferences.hpp"

#include <cmath>
#include <string>

#include "lossav/errors.hpp"
#include "lossav/processes.hpp"

namespace lossav {

void PreferenceParams::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0,1)");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw ArgumentError("theta must be > 0");
    if (!(b >= 0.0) || !std::isfinite(b)) throw ArgumentError("b must be >= 0");
    if (!(lambda >= 1.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be >= 1");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be >= 0");
}

double PreferenceParams::growth_factor(const ProcessParams& p) const {
    return beta * lognormal_moment(p, 1.0 - theta);
}

void PreferenceParams::require_growth_condition(const ProcessParams& p) const {
    double g = growth_factor(p);
    if (!(g < 1.0))
        throw PricingError("growth condition violated: beta*E[eps^(1-theta)] = " +
                           std::to_string(g) + " >= 1 (theta = " + std::to_string(theta) + ")");
}

double m(double x, double theta) {
    if (!(x > 0.0)) throw DomainError("m: x must be > 0");
    if (theta == 1.0) return std::log(x);
    return std::pow(x, 1.0 - theta) / (1.0 - theta);
}

double mu(double x, double lambda) { return x >= 0.0 ? x : lambda * x; }

static void check_F(double F) {
    if (!(F >= 0.0 && F <= 1.0)) throw DomainError("F must lie in [0,1]");
}

double weight_contemp(const PreferenceParams& prefs, double F) {
    check_F(F);
    return 1.0 + prefs.b * F + prefs.b * prefs.lambda * (1.0 - F);
}

double weight_prosp(const PreferenceParams& prefs, double F) {
    check_F(F);
    return F + prefs.lambda * (1.0 - F);
}

}  // namespace lossav
