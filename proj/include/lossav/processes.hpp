#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lossav {

struct ProcessParams {
    double mu_c = 0.058;
    double sigma_c = 0.053;
    double phi = 0.961;
    double kappa = 2.816;
    double sigma_y = 0.099;

    // sigma == 0 is accepted as the degenerate limit; |phi| < 1 is required
    void validate() const;
};

struct MarketState {
    double eps_c = 1.0;
    double y = 1.0;

    MarketState() = default;
    // throws DomainError unless eps_c > 0 and y >= 1
    MarketState(double eps_c, double y);
    double log_y() const;
};

// Y < 1 is clamped to 1 instead of rejected when strict == false
MarketState make_state(double eps_c, double y, bool strict = true);

struct SamplePath {
    std::vector<double> eps_c_series;
    std::vector<double> log_y_series;
    std::uint64_t seed = 0;
};

struct StationaryLogY {
    double mean;
    double variance;
    double level_mean;  // E[Y]
    double level_sd;    // sd(Y)
};

struct LogYRatioDists {
    double cond_mean;
    double cond_var;
    double uncond_var;
};

double normal_cdf(double z);

double lognormal_moment(const ProcessParams& p, double a);
double cdf_eps(const ProcessParams& p, double x);
double step_log_y(const ProcessParams& p, double log_y, double shock);
double dividend_growth(double eps_c, double y_now, double y_next);
StationaryLogY stationary_log_y(const ProcessParams& p);
LogYRatioDists log_y_ratio_dists(const ProcessParams& p, double log_y_ratio_prev);

// eps_c_series[t] is the growth realised at t; log_y_series[0] is the initial log Y
SamplePath sample_path(const ProcessParams& p, std::size_t n, std::uint64_t seed,
                       std::optional<double> init_log_y = std::nullopt);

struct Calibration {
    ProcessParams params;
    struct {
        double mu_c = 0, sigma_c = 0, phi = 0, kappa = 0, sigma_y = 0;
    } se;
    std::size_t n_obs = 0;
    bool phi_identified = true;  // false when log Y has no variation
    bool nonstationary = false;  // |phi| >= 1
    std::vector<std::string> warnings;
};

Calibration mle_calibrate(const std::vector<double>& consumption,
                          const std::vector<double>& dividends);
// same, from log levels; avoids overflow on very long simulated panels
Calibration mle_calibrate_log(const std::vector<double>& log_consumption,
                              const std::vector<double>& log_dividends);

struct AnnualSeries {
    std::vector<int> years;
    std::vector<double> consumption;
    std::vector<double> dividends;
};

// header `year,consumption,dividends`; rejects duplicate/missing years
AnnualSeries read_annual_csv(const std::string& path);
AnnualSeries parse_annual_csv(const std::string& text);

}  // namespace lossav
