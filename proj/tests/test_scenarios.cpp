#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "deepalm/rng.hpp"
#include "deepalm/scenarios.hpp"
#include "fixtures.hpp"

using namespace deepalm;

namespace {

std::vector<YieldCurve> cumulative_history(const Eigen::MatrixXd& increments, double level) {
    const auto n = increments.cols();
    std::vector<YieldCurve> h;
    YieldCurve c{std::vector<double>(static_cast<std::size_t>(n), level)};
    h.push_back(c);
    for (Eigen::Index r = 0; r < increments.rows(); ++r) {
        for (Eigen::Index j = 0; j < n; ++j) c.yields[static_cast<std::size_t>(j)] += increments(r, j);
        h.push_back(c);
    }
    return h;
}

PcaModel toy_model() {
    // Three orthonormal factors on a 12-point curve.
    const int n = 12;
    Eigen::MatrixXd raw(n, 3);
    for (int j = 0; j < n; ++j) {
        const double x = (j + 0.5) / n;
        raw(j, 0) = 1.0;
        raw(j, 1) = x - 0.5;
        raw(j, 2) = (x - 0.5) * (x - 0.5) - 1.0 / 12.0;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    PcaModel m;
    m.mu = Eigen::VectorXd::LinSpaced(n, -2e-5, 1e-5);
    m.eigvecs = q;
    m.eigvals = Eigen::VectorXd::Zero(n);
    m.eigvals(0) = 4e-6;
    m.eigvals(1) = 1e-6;
    m.eigvals(2) = 2.5e-7;
    m.n_factors = 3;
    m.trading_days_per_month = 22;
    return m;
}

}  // namespace

TEST(Calibrate, ConstantHistory) {
    std::vector<YieldCurve> h(30, YieldCurve{std::vector<double>(8, 0.03)});
    const auto m = calibrate_pca(h, 3);
    EXPECT_EQ(m.mu, Eigen::VectorXd::Zero(8));
    EXPECT_EQ(m.eigvals, Eigen::VectorXd::Zero(8));
}

TEST(Calibrate, TwoCurvesGiveSingleDifference) {
    std::vector<YieldCurve> h = {YieldCurve{{0.01, 0.02, 0.03}}, YieldCurve{{0.015, 0.01, 0.035}}};
    const auto m = calibrate_pca(h, 0);
    EXPECT_DOUBLE_EQ(m.mu(0), 0.005);
    EXPECT_DOUBLE_EQ(m.mu(1), -0.01);
    EXPECT_DOUBLE_EQ(m.mu(2), 0.035 - 0.03);
}

TEST(Calibrate, TooShortHistory) {
    std::vector<YieldCurve> h(4, YieldCurve{std::vector<double>(8, 0.03)});
    EXPECT_THROW(calibrate_pca(h, 3), CalibrationError);
    EXPECT_NO_THROW(calibrate_pca(h, 2));
    std::vector<YieldCurve> ragged = {YieldCurve{{0.1, 0.2}}, YieldCurve{{0.1}}, YieldCurve{{0.1, 0.2}}};
    EXPECT_THROW(calibrate_pca(ragged, 0), CalibrationError);
}

TEST(Calibrate, RecoversKnownFactors) {
    const PcaModel truth = toy_model();
    const int samples = 10000;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z;
    Eigen::MatrixXd inc(samples, 12);
    for (int r = 0; r < samples; ++r) {
        Eigen::VectorXd d = truth.mu;
        for (int k = 0; k < 3; ++k) d += std::sqrt(truth.eigvals(k)) * z(rng) * truth.eigvecs.col(k);
        inc.row(r) = d.transpose();
    }
    const auto fitted = calibrate_pca(cumulative_history(inc, 0.03), 3);
    for (int k = 0; k < 3; ++k) {
        const double lambda = truth.eigvals(k);
        // sampling sd of an eigenvalue estimate is about lambda * sqrt(2 / m)
        EXPECT_NEAR(fitted.eigvals(k), lambda, 4.0 * lambda * std::sqrt(2.0 / samples)) << "factor " << k;
        EXPECT_GT(std::fabs(fitted.eigvecs.col(k).dot(truth.eigvecs.col(k))), 0.995) << "factor " << k;
    }
    for (int k = 3; k < 12; ++k) EXPECT_LT(fitted.eigvals(k), 1e-18);
    for (int j = 0; j < 12; ++j) {
        EXPECT_NEAR(fitted.mu(j), truth.mu(j), 4.0 * std::sqrt(4e-6 / samples));
    }
}

TEST(Calibrate, EigenvectorsOrthonormalOnDeskData) {
    const auto& desk = fixture::Desk::get();
    const Eigen::MatrixXd& v = desk.model.eigvecs;
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index k = 1; k < desk.model.eigvals.size(); ++k) {
        EXPECT_LE(desk.model.eigvals(k), desk.model.eigvals(k - 1));
        EXPECT_GE(desk.model.eigvals(k), 0.0);
    }
}

TEST(CurveIncrement, DeterministicWithoutVariance) {
    PcaModel m = toy_model();
    m.eigvals.setZero();
    CounterStream rng(1234);
    const Eigen::VectorXd d = sample_curve_increment(m, rng);
    EXPECT_EQ(d, 22.0 * m.mu);
}

TEST(CurveIncrement, MonteCarloMoments) {
    const PcaModel m = toy_model();
    const int draws = 100000;
    CounterStream rng(2024);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(12);
    Eigen::MatrixXd scores(draws, 3);
    Eigen::VectorXd residual_max = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd drift = 22.0 * m.mu;
    for (int r = 0; r < draws; ++r) {
        const Eigen::VectorXd d = sample_curve_increment(m, rng);
        sum += d;
        const Eigen::VectorXd centred = d - drift;
        const Eigen::VectorXd proj = m.eigvecs.leftCols(3).transpose() * centred;
        scores.row(r) = proj.transpose();
        residual_max(0) = std::max(residual_max(0), (centred - m.eigvecs.leftCols(3) * proj).cwiseAbs().maxCoeff());
    }
    const Eigen::VectorXd mean = sum / draws;
    const Eigen::MatrixXd loadings = monthly_loadings(m);
    const Eigen::MatrixXd cov = loadings * loadings.transpose();
    for (int j = 0; j < 12; ++j) {
        EXPECT_NEAR(mean(j), drift(j), 4.0 * std::sqrt(cov(j, j) / draws)) << "maturity " << j;
    }
    // Rank-n covariance: draws live in the factor span, with diagonal
    // factor covariance 22 * lambda.
    EXPECT_LT(residual_max(0), 1e-15);
    const Eigen::MatrixXd sc = (scores.transpose() * scores) / draws;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double va = 22.0 * m.eigvals(a), vb = 22.0 * m.eigvals(b);
            const double expected = a == b ? va : 0.0;
            const double sd = a == b ? va * std::sqrt(2.0 / draws) : std::sqrt(va * vb / draws);
            EXPECT_NEAR(sc(a, b), expected, 4.0 * sd) << a << "," << b;
        }
    }
}

TEST(EquityStep, DeterministicWithoutVolatility) {
    CounterStream rng(7);
    const EquityParams eq{100.0, 0.05, 0.0};
    EXPECT_DOUBLE_EQ(sample_equity_step(80.0, eq, rng), 80.0 * std::exp(0.05 / 12.0));
    EXPECT_THROW(sample_equity_step(0.0, eq, rng), std::invalid_argument);
}

TEST(EquityStep, LogReturnMoments) {
    const EquityParams eq;  // 5% drift, 18% volatility
    const int draws = 100000;
    CounterStream rng(31337);
    double s1 = 0, s2 = 0;
    std::vector<double> g(draws);
    for (int i = 0; i < draws; ++i) {
        g[static_cast<std::size_t>(i)] = std::log(sample_equity_step(100.0, eq, rng) / 100.0);
        s1 += g[static_cast<std::size_t>(i)];
    }
    const double mean = s1 / draws;
    for (double v : g) s2 += (v - mean) * (v - mean);
    const double var = s2 / (draws - 1);
    const double mu = (0.05 - 0.5 * 0.18 * 0.18) / 12.0;
    const double sigma2 = 0.18 * 0.18 / 12.0;
    EXPECT_NEAR(mean, mu, 4.0 * std::sqrt(sigma2 / draws));
    EXPECT_NEAR(var, sigma2, 4.0 * sigma2 * std::sqrt(2.0 / (draws - 1)));
}

TEST(Batch, EmptyCount) {
    const PcaModel m = toy_model();
    const auto b = generate_batch(YieldCurve{std::vector<double>(12, 0.03)}, m, EquityParams{}, 10, 0, 5);
    EXPECT_EQ(b.count(), 0u);
    EXPECT_TRUE(b.raw_curves().empty());
}

TEST(Batch, SeedDeterminismAndWorkerIndependence) {
    const PcaModel m = toy_model();
    const YieldCurve anchor{std::vector<double>(12, 0.03)};
    const auto a = generate_batch(anchor, m, EquityParams{}, 24, 37, 5, 1);
    const auto b = generate_batch(anchor, m, EquityParams{}, 24, 37, 5, 1);
    const auto c = generate_batch(anchor, m, EquityParams{}, 24, 37, 5, 4);
    const auto d = generate_batch(anchor, m, EquityParams{}, 24, 37, 6, 1);
    EXPECT_TRUE(a == b);
    EXPECT_TRUE(a == c);
    EXPECT_FALSE(a == d);
}

TEST(Batch, ScenarioSubstreamsDoNotDependOnCount) {
    const PcaModel m = toy_model();
    const YieldCurve anchor{std::vector<double>(12, 0.03)};
    const auto small = generate_batch(anchor, m, EquityParams{}, 12, 3, 9);
    const auto large = generate_batch(anchor, m, EquityParams{}, 12, 10, 9);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t t = 0; t <= 12; ++t) {
            EXPECT_EQ(small.equity(i, t), large.equity(i, t));
            EXPECT_TRUE(std::equal(small.curve(i, t).begin(), small.curve(i, t).end(), large.curve(i, t).begin()));
        }
    }
}

TEST(Batch, AnchorConsistencyAndCumulativeIncrements) {
    const auto& desk = fixture::Desk::get();
    const auto b = desk.batch(20, 77);
    for (std::size_t i = 0; i < b.count(); ++i) {
        EXPECT_EQ(b.yield_curve(i, 0), desk.ctx.anchor);
        EXPECT_EQ(b.equity(i, 0), desk.cfg.equity_s0);
        for (std::size_t t = 1; t <= b.steps(); ++t) EXPECT_GT(b.equity(i, t), 0.0);
    }
    EXPECT_THROW(generate_batch(YieldCurve{{0.01}}, desk.model, desk.cfg.equity(), 12, 1, 1), std::invalid_argument);
}

TEST(Rng, CounterStreamIsPureFunctionOfKey) {
    CounterStream a(1, 2, 3, StreamTag::curve);
    CounterStream b(1, 2, 3, StreamTag::curve);
    CounterStream c(1, 2, 3, StreamTag::equity);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        differs |= x != c();
    }
    EXPECT_TRUE(differs);
}
