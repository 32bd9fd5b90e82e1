#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lossav/errors.hpp"
#include "lossav/model2.hpp"
#include "lossav/rng.hpp"

using namespace lossav;

namespace {

const ProcessParams kTable1{};
const QuadratureRule kRule = gauss_hermite(21);

Model2 make(PreferenceParams pr = {}, ProcessParams p = kTable1, DividendLaw law = DividendLaw::stationary) {
    pr.gamma = 0.0;
    return Model2(pr, p, kRule, law);
}

std::vector<double> eps_grid(int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(std::exp(kTable1.mu_c + kTable1.sigma_c * (-2.0 + 4.0 * i / (n - 1))));
    return out;
}

std::vector<double> logy_grid(int n) {
    double sd = std::sqrt(stationary_log_y(kTable1).variance);
    std::vector<double> out;
    for (int j = 0; j < n; ++j) out.push_back(kTable1.kappa + sd * (-2.0 + 4.0 * j / (n - 1)));
    return out;
}

}  // namespace

TEST(GrowthCondition2, DeterministicUnitGrowth) {
    ProcessParams p;
    p.sigma_c = p.sigma_y = p.mu_c = 0.0;
    for (auto law : {DividendLaw::stationary, DividendLaw::conditional})
        EXPECT_NEAR(make({}, p, law).growth_condition(p.kappa), 0.98, 1e-15);
}

TEST(GrowthCondition2, ClosedFormAtMean) {
    auto m = make({}, kTable1, DividendLaw::conditional);
    double expect = 0.98 * std::exp(-3 * 0.058 + 9 * 0.053 * 0.053 / 2) * std::exp(0.099 * 0.099 / 2);
    EXPECT_NEAR(m.growth_condition(kTable1.kappa), expect, 1e-14);
}

TEST(GrowthCondition2, SmallThetaViolates) {
    PreferenceParams pr;
    pr.theta = 0.05;
    auto m = make(pr);
    EXPECT_GT(m.growth_condition(3.0), 1.0);
    EXPECT_THROW(m.pd(1.05, 3.0), PricingError);
    EXPECT_THROW(m.price(MarketState(1.05, 21.07)), PricingError);
}

TEST(ExpectedYRatio, MatchesQuadrature) {
    for (auto law : {DividendLaw::stationary, DividendLaw::conditional}) {
        auto m = make({}, kTable1, law);
        for (double ly : {2.2, 2.816, 3.4}) {
            auto r = gauss_hermite(41);
            double q = 0.0;
            for (std::size_t j = 0; j < r.nodes.size(); ++j)
                q += r.weights[j] * std::exp(ly - m.next_logy(ly, r.nodes[j]));
            EXPECT_NEAR(m.expected_y_ratio(ly), q, 1e-13) << to_string(law) << " " << ly;
        }
    }
}

TEST(ExpectedYRatio, StationaryLawIgnoresState) {
    auto m = make();
    EXPECT_EQ(m.expected_y_ratio(1.0), m.expected_y_ratio(4.0));
    EXPECT_NEAR(m.expected_y_ratio(2.0), std::exp(0.099 * 0.099 / (1 + 0.961)), 1e-15);
}

TEST(DividendLaw, RoundTrip) {
    for (auto law : {DividendLaw::stationary, DividendLaw::conditional})
        EXPECT_EQ(dividend_law_from_string(to_string(law)), law);
    EXPECT_THROW(dividend_law_from_string("random"), ArgumentError);
}

TEST(Price2, NoLossAversionRiskFree) {
    PreferenceParams pr;
    pr.b = 0.0;
    auto m = make(pr);
    double oracle = 1.0 / (0.98 * std::exp(-4 * 0.058 + 16 * 0.053 * 0.053 / 2));
    for (double e : eps_grid(7)) EXPECT_NEAR(m.risk_free(e), oracle, 1e-12);
    EXPECT_NEAR(oracle, 1.2582, 1e-4);
}

TEST(Price2, LinearLossAversionMatchesNoGainLoss) {
    PreferenceParams a, b;
    a.lambda = 1.0;
    b.b = 0.0;
    auto ma = make(a), mb = make(b);
    std::vector<double> rf;
    for (double e : eps_grid(25)) {
        rf.push_back(ma.risk_free(e));
        EXPECT_NEAR(rf.back(), mb.risk_free(e), 1e-13);
    }
    double mean = 0, var = 0;
    for (double v : rf) mean += v / rf.size();
    for (double v : rf) var += (v - mean) * (v - mean) / rf.size();
    EXPECT_LT(var, 1e-20);
}

TEST(Price2, ErpIdentityAndPositivity) {
    auto m = make();
    for (double e : eps_grid(10))
        for (double ly : logy_grid(10)) {
            auto pz = m.price(MarketState(e, std::exp(ly)));
            EXPECT_EQ(pz.erp, pz.e_rs - pz.r_f);
            EXPECT_GT(pz.r_f, 0.0);
            EXPECT_GT(pz.pd, 0.0);
        }
}

TEST(Price2, ErpTwoWays) {
    for (auto law : {DividendLaw::stationary, DividendLaw::conditional}) {
        auto m = make({}, kTable1, law);
        for (double e : eps_grid(10))
            for (double ly : logy_grid(10)) {
                MarketState s(e, std::exp(ly));
                EXPECT_NEAR(m.price(s).erp, m.erp_closed_form(s), 1e-10);
            }
    }
}

TEST(Price2, CentreStateNearPublished) {
    auto pz = make().price(MarketState(1.05, 21.07));
    EXPECT_NEAR(pz.r_f / 1.24 - 1, 0.0, 0.05);
    EXPECT_NEAR(pz.pd / 5.224 - 1, 0.0, 0.05);
    EXPECT_NEAR(pz.erp / 0.061 - 1, 0.0, 0.05);
}

TEST(Price2, ConstantWeightPremiumIsStateFree) {
    PreferenceParams pr;
    pr.lambda = 1.0;
    auto m = make(pr);
    double ref = m.price(MarketState(1.05, 21.07)).erp;
    for (double e : eps_grid(5))
        for (double ly : logy_grid(5)) EXPECT_NEAR(m.price(MarketState(e, std::exp(ly))).erp, ref, 1e-12);
    // unconditional mean published as 0.014
    EXPECT_NEAR(ref, 0.014, 0.014 * 0.02);
}

TEST(Sdf2, Examples) {
    PreferenceParams pr;
    pr.b = 0.0;
    EXPECT_DOUBLE_EQ(sdf2(pr, kTable1, 1.1, 1.0), 0.98);
    PreferenceParams lin;
    lin.lambda = 1.0;
    for (double a : {0.95, 1.05})
        for (double n : {0.9, 1.0, 1.2}) EXPECT_NEAR(sdf2(lin, kTable1, a, n), sdf2(pr, kTable1, a, n), 1e-15);
    EXPECT_THROW(sdf2(pr, kTable1, 0.0, 1.0), DomainError);
    EXPECT_THROW(sdf2(pr, kTable1, 1.0, -1.0), DomainError);
}

TEST(Euler2, ResidualsOnStateGrid) {
    for (auto law : {DividendLaw::stationary, DividendLaw::conditional}) {
        auto m = make({}, kTable1, law);
        for (double e : eps_grid(10))
            for (double ly : logy_grid(10)) {
                auto r = m.euler_residuals(MarketState(e, std::exp(ly)));
                EXPECT_LT(std::fabs(r.res_stock), 1e-8);
                EXPECT_LT(std::fabs(r.res_bond), 1e-8);
            }
    }
}

TEST(CwRatio2, TraditionalFormula) {
    PreferenceParams pr;
    pr.b = 0.0;
    ProcessParams p = kTable1;
    p.sigma_y = 0.0;
    p.kappa = 0.0;
    auto m = make(pr, p);
    double x = 0.98 * lognormal_moment(p, -3.0);
    for (double e : {0.95, 1.05, 1.15}) EXPECT_NEAR(m.cw_ratio(MarketState(e, 1.0)), 1.0 - x, 1e-12);
}

TEST(CwRatio2, ImpatientLimit) {
    PreferenceParams pr;
    pr.beta = 1e-9;
    EXPECT_NEAR(make(pr).cw_ratio(MarketState(1.05, 21.07)), 1.0, 1e-8);
}

TEST(CwRatio2, MatchesMonteCarlo) {
    auto m = make();
    MarketState s(1.05, 21.07);
    double quad = 1.0 / m.cw_ratio(s) - 1.0 - m.cw_term1(s);
    NormalStream rng(2024, 0);
    const int n = 10000000;
    double sum = 0, sum2 = 0;
    for (int k = 0; k < n; ++k) {
        double e = std::exp(kTable1.mu_c + kTable1.sigma_c * rng.normal());
        double v = m.cw_term2_integrand(s, e, m.next_logy(s.log_y(), rng.normal()));
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_LT(std::fabs(quad - mean), 3 * se);
}

TEST(CwRatio2, InUnitInterval) {
    auto m = make();
    for (double e : eps_grid(5))
        for (double ly : logy_grid(5)) {
            double r = m.cw_ratio(MarketState(e, std::exp(ly)));
            EXPECT_GT(r, 0.0);
            EXPECT_LT(r, 1.0);
        }
}

TEST(Thresholds, Range) {
    auto t = statics_thresholds({}, kTable1, kRule, kTable1.kappa);
    EXPECT_GT(t.rf_threshold, 0.0);
    EXPECT_LT(t.rf_threshold, 0.5);
    EXPECT_GT(t.pd_threshold, 0.0);
    EXPECT_LT(t.pd_threshold, 0.5);
}

TEST(Thresholds, NoRiskAversionIsUniformMean) {
    PreferenceParams pr;
    pr.theta = 1e-12;
    auto t = statics_thresholds(pr, kTable1, gauss_hermite(41), kTable1.kappa);
    EXPECT_NEAR(t.rf_threshold, 0.5, 1e-9);
}

TEST(Thresholds, DegenerateConsumption) {
    ProcessParams p = kTable1;
    p.sigma_c = 0.0;
    auto t = statics_thresholds({}, p, kRule, p.kappa);
    double f = cdf_eps(p, std::exp(p.mu_c));
    EXPECT_EQ(t.rf_threshold, f);
    EXPECT_EQ(t.pd_threshold, f);
}

TEST(ComparativeStatics, MonotoneInConsumptionGrowth) {
    for (double lam : {1.5, 2.0, 3.0}) {
        PreferenceParams pr;
        pr.lambda = lam;
        auto m = make(pr);
        double prev_rf = INFINITY, prev_pd = -INFINITY;
        for (double e : eps_grid(100)) {
            double rf = m.risk_free(e), pd = m.pd(e, kTable1.kappa);
            EXPECT_LT(rf, prev_rf);
            EXPECT_GT(pd, prev_pd);
            prev_rf = rf;
            prev_pd = pd;
        }
    }
}

TEST(ComparativeStatics, SignsFollowThresholds) {
    PreferenceParams base;
    auto t = statics_thresholds(base, kTable1, kRule, kTable1.kappa);
    auto m0 = make(base);
    PreferenceParams lam = base, bb = base;
    lam.lambda = 2.01;
    bb.b = 1.01;
    auto ml = make(lam), mb = make(bb);
    int checked = 0;
    for (double e : eps_grid(40)) {
        double F = cdf_eps(kTable1, e);
        if (std::fabs(F - t.rf_threshold) > 1e-3) {
            double drf_l = ml.risk_free(e) - m0.risk_free(e);
            double drf_b = mb.risk_free(e) - m0.risk_free(e);
            if (F > t.rf_threshold) {
                EXPECT_LT(drf_l, 0.0) << e;
                EXPECT_LT(drf_b, 0.0) << e;
            } else {
                EXPECT_GT(drf_l, 0.0) << e;
                EXPECT_GT(drf_b, 0.0) << e;
            }
            ++checked;
        }
        if (std::fabs(F - t.pd_threshold) > 1e-3) {
            double dpd_l = ml.pd(e, kTable1.kappa) - m0.pd(e, kTable1.kappa);
            double dpd_b = mb.pd(e, kTable1.kappa) - m0.pd(e, kTable1.kappa);
            if (F > t.pd_threshold) {
                EXPECT_GT(dpd_l, 0.0) << e;
                EXPECT_GT(dpd_b, 0.0) << e;
            } else {
                EXPECT_LT(dpd_l, 0.0) << e;
                EXPECT_LT(dpd_b, 0.0) << e;
            }
        }
    }
    EXPECT_GT(checked, 30);
}
