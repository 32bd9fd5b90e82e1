#pragma once

namespace lossav {

struct ProcessParams;

struct PreferenceParams {
    double beta = 0.98;
    double theta = 4.0;
    double b = 1.0;
    double lambda = 2.0;
    double gamma = 0.1;

    void validate() const;
    // beta * E[eps^(1-theta)], must be < 1 for Model I
    double growth_factor(const ProcessParams& p) const;
    // throws PricingError when beta * E[eps^(1-theta)] >= 1
    void require_growth_condition(const ProcessParams& p) const;
};

double m(double x, double theta);
double mu(double x, double lambda);

// Lambda(F) = 1 + bF + b lambda (1-F)
double weight_contemp(const PreferenceParams& prefs, double F);
// Gamma(F) = F + lambda (1-F)
double weight_prosp(const PreferenceParams& prefs, double F);

}  // namespace lossav
