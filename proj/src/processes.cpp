#include "lossav/processes.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "lossav/errors.hpp"
#include "lossav/rng.hpp"

namespace lossav {

void ProcessParams::validate() const {
    if (!std::isfinite(mu_c) || !std::isfinite(kappa))
        throw ArgumentError("process params: mu_c and kappa must be finite");
    if (!(sigma_c >= 0.0) || !std::isfinite(sigma_c))
        throw ArgumentError("process params: sigma_c must be >= 0");
    if (!(sigma_y >= 0.0) || !std::isfinite(sigma_y))
        throw ArgumentError("process params: sigma_y must be >= 0");
    if (!(std::fabs(phi) < 1.0))
        throw StationarityError("process params: |phi| must be < 1, got " + std::to_string(phi));
}

MarketState::MarketState(double e, double yy) : eps_c(e), y(yy) {
    if (!(e > 0.0) || !std::isfinite(e))
        throw DomainError("market state: eps_c must be > 0, got " + std::to_string(e));
    if (!(yy >= 1.0) || !std::isfinite(yy))
        throw DomainError("market state: y must be >= 1, got " + std::to_string(yy));
}

double MarketState::log_y() const { return std::log(y); }

MarketState make_state(double eps_c, double y, bool strict) {
    if (!strict && y < 1.0) y = 1.0;
    return MarketState(eps_c, y);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double lognormal_moment(const ProcessParams& p, double a) {
    return std::exp(a * p.mu_c + 0.5 * a * a * p.sigma_c * p.sigma_c);
}

double cdf_eps(const ProcessParams& p, double x) {
    if (!(x > 0.0)) throw DomainError("cdf_eps: x must be > 0");
    double lx = std::log(x);
    if (p.sigma_c == 0.0) return lx < p.mu_c ? 0.0 : (lx > p.mu_c ? 1.0 : 0.5);
    return normal_cdf((lx - p.mu_c) / p.sigma_c);
}

double step_log_y(const ProcessParams& p, double log_y, double shock) {
    return (1.0 - p.phi) * p.kappa + p.phi * log_y + p.sigma_y * shock;
}

double dividend_growth(double eps_c, double y_now, double y_next) {
    if (!(eps_c > 0.0) || !(y_now > 0.0) || !(y_next > 0.0))
        throw DomainError("dividend_growth: inputs must be > 0");
    return eps_c * y_now / y_next;
}

StationaryLogY stationary_log_y(const ProcessParams& p) {
    if (!(std::fabs(p.phi) < 1.0)) throw StationarityError("stationary_log_y: |phi| >= 1");
    double v = p.sigma_y * p.sigma_y / (1.0 - p.phi * p.phi);
    double m = std::exp(p.kappa + 0.5 * v);
    return {p.kappa, v, m, m * std::sqrt(std::expm1(v))};
}

LogYRatioDists log_y_ratio_dists(const ProcessParams& p, double prev) {
    if (!(std::fabs(p.phi) < 1.0)) throw StationarityError("log_y_ratio_dists: |phi| >= 1");
    double s2 = p.sigma_y * p.sigma_y;
    return {p.phi * prev, 2.0 * s2, 2.0 * (1.0 - p.phi) * s2 / (1.0 - p.phi * p.phi)};
}

SamplePath sample_path(const ProcessParams& p, std::size_t n, std::uint64_t seed,
                       std::optional<double> init_log_y) {
    if (n == 0) throw ArgumentError("sample_path: n must be >= 1");
    p.validate();
    SamplePath out;
    out.seed = seed;
    out.eps_c_series.resize(n);
    out.log_y_series.resize(n);
    NormalStream rng(seed, 0);
    double ly = init_log_y ? *init_log_y
                           : p.kappa + std::sqrt(stationary_log_y(p).variance) * rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) ly = step_log_y(p, ly, rng.normal());
        out.log_y_series[t] = ly;
        out.eps_c_series[t] = std::exp(p.mu_c + p.sigma_c * rng.normal());
    }
    return out;
}

Calibration mle_calibrate(const std::vector<double>& c, const std::vector<double>& d) {
    if (c.size() != d.size()) throw DataError("mle_calibrate: series lengths differ");
    if (c.size() < 3) throw DataError("mle_calibrate: need at least 3 observations");
    std::vector<double> lc(c.size()), ld(d.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!(c[i] > 0.0) || !(d[i] > 0.0) || !std::isfinite(c[i]) || !std::isfinite(d[i]))
            throw DataError("mle_calibrate: non-positive entry at index " + std::to_string(i));
        lc[i] = std::log(c[i]);
        ld[i] = std::log(d[i]);
    }
    return mle_calibrate_log(lc, ld);
}

Calibration mle_calibrate_log(const std::vector<double>& lc, const std::vector<double>& ld) {
    if (lc.size() != ld.size()) throw DataError("mle_calibrate: series lengths differ");
    if (lc.size() < 3) throw DataError("mle_calibrate: need at least 3 observations");
    for (std::size_t i = 0; i < lc.size(); ++i)
        if (!std::isfinite(lc[i]) || !std::isfinite(ld[i]))
            throw DataError("mle_calibrate: non-finite log entry at index " + std::to_string(i));
    const std::size_t n = lc.size();
    Calibration out;
    out.n_obs = n;

    // consumption growth
    const std::size_t ne = n - 1;
    double mean = 0.0;
    for (std::size_t t = 1; t < n; ++t) mean += (lc[t] - lc[t - 1]);
    mean /= static_cast<double>(ne);
    double ss = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        double u = (lc[t] - lc[t - 1]) - mean;
        ss += u * u;
    }
    double sc = std::sqrt(ss / static_cast<double>(ne));
    out.params.mu_c = mean;
    out.params.sigma_c = sc;
    out.se.mu_c = sc / std::sqrt(static_cast<double>(ne));
    out.se.sigma_c = sc / std::sqrt(2.0 * static_cast<double>(ne));

    // AR(1) for log Y, conditional on the first observation
    std::vector<double> ly(n);
    for (std::size_t t = 0; t < n; ++t) ly[t] = lc[t] - ld[t];
    const std::size_t m = n - 1;
    double xb = 0.0, yb = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        xb += ly[t - 1];
        yb += ly[t];
    }
    xb /= static_cast<double>(m);
    yb /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        sxx += (ly[t - 1] - xb) * (ly[t - 1] - xb);
        sxy += (ly[t - 1] - xb) * (ly[t] - yb);
    }
    double scale = 0.0;
    for (double v : ly) scale = std::max(scale, std::fabs(v));
    if (sxx <= 1e-24 * std::max(1.0, scale * scale) * static_cast<double>(m)) {
        // no variation in log Y: phi is not identified
        out.phi_identified = false;
        out.warnings.push_back("phi not identified: log Y has no variation");
        double all = 0.0;
        for (double v : ly) all += v;
        all /= static_cast<double>(n);
        double r = 0.0;
        for (double v : ly) r += (v - all) * (v - all);
        out.params.phi = 0.0;
        out.params.kappa = all;
        out.params.sigma_y = std::sqrt(r / static_cast<double>(n));
        double nan = std::numeric_limits<double>::quiet_NaN();
        out.se.phi = nan;
        out.se.kappa = nan;
        out.se.sigma_y = nan;
        return out;
    }
    double phi = sxy / sxx;
    double icpt = yb - phi * xb;
    double ssr = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        double e = ly[t] - icpt - phi * ly[t - 1];
        ssr += e * e;
    }
    double s2 = ssr / static_cast<double>(m);
    out.params.phi = phi;
    out.params.sigma_y = std::sqrt(s2);
    out.se.phi = std::sqrt(s2 / sxx);
    out.se.sigma_y = out.params.sigma_y / std::sqrt(2.0 * static_cast<double>(m));
    if (std::fabs(phi) >= 1.0) {
        out.nonstationary = true;
        out.warnings.push_back("estimated |phi| >= 1: kappa is not meaningful");
        out.params.kappa = std::numeric_limits<double>::quiet_NaN();
        out.se.kappa = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.params.kappa = icpt / (1.0 - phi);
    // delta method on kappa = c/(1-phi)
    double var_c = s2 * (1.0 / static_cast<double>(m) + xb * xb / sxx);
    double var_p = s2 / sxx;
    double cov = -xb * s2 / sxx;
    double g1 = 1.0 / (1.0 - phi);
    double g2 = icpt / ((1.0 - phi) * (1.0 - phi));
    out.se.kappa = std::sqrt(std::max(0.0, g1 * g1 * var_c + g2 * g2 * var_p + 2 * g1 * g2 * cov));
    return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        auto b = cur.find_first_not_of(" \t\r");
        auto e = cur.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
    }
    return out;
}

double parse_num(const std::string& s, std::size_t row, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty())
        throw DataError("row " + std::to_string(row) + ": cannot parse " + what + " '" + s + "'");
    return v;
}

}  // namespace

AnnualSeries parse_annual_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    AnnualSeries out;
    bool header = false;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = split_csv(line);
        if (!header) {
            if (f.size() != 3 || f[0] != "year" || f[1] != "consumption" || f[2] != "dividends")
                throw DataError("row " + std::to_string(row) +
                                ": expected header 'year,consumption,dividends'");
            header = true;
            continue;
        }
        if (f.size() != 3)
            throw DataError("row " + std::to_string(row) + ": expected 3 fields");
        double yr = parse_num(f[0], row, "year");
        if (yr != std::floor(yr)) throw DataError("row " + std::to_string(row) + ": year not integral");
        int year = static_cast<int>(yr);
        double cons = parse_num(f[1], row, "consumption");
        double div = parse_num(f[2], row, "dividends");
        if (!out.years.empty()) {
            int prev = out.years.back();
            if (year == prev)
                throw DataError("duplicate year " + std::to_string(year) + " (row " +
                                std::to_string(row) + ")");
            if (year < prev)
                throw DataError("year " + std::to_string(year) + " out of order (row " +
                                std::to_string(row) + ")");
            if (year != prev + 1)
                throw DataError("gap before year " + std::to_string(year) + ": missing " +
                                std::to_string(prev + 1) + " (row " + std::to_string(row) + ")");
        }
        if (!(cons > 0.0))
            throw DataError("year " + std::to_string(year) + ": consumption must be > 0 (row " +
                            std::to_string(row) + ")");
        if (!(div > 0.0))
            throw DataError("year " + std::to_string(year) + ": dividends must be > 0 (row " +
                            std::to_string(row) + ")");
        out.years.push_back(year);
        out.consumption.push_back(cons);
        out.dividends.push_back(div);
    }
    if (!header) throw DataError("empty calibration file");
    return out;
}

AnnualSeries read_annual_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_annual_csv(ss.str());
}

}  // namespace lossav
