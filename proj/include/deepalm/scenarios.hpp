#ifndef DEEPALM_SCENARIOS_HPP
#define DEEPALM_SCENARIOS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepalm/parallel.hpp"
#include "deepalm/rng.hpp"
#include "deepalm/termstructure.hpp"

namespace deepalm {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Low-rank Gaussian model of daily yield-curve increments.
struct PcaModel {
    Eigen::VectorXd mu;        // mean daily increment
    Eigen::MatrixXd eigvecs;   // orthonormal columns, ordered as eigvals
    Eigen::VectorXd eigvals;   // descending, clipped at zero
    int n_factors = 3;
    int trading_days_per_month = 22;

    std::size_t dimension() const { return static_cast<std::size_t>(mu.size()); }
};

struct EquityParams {
    double s0 = 100.0;
    double drift = 0.05;
    double volatility = 0.18;
};

inline PcaModel calibrate_pca(const std::vector<YieldCurve>& history, int n_factors,
                              int trading_days_per_month = 22) {
    if (n_factors < 0) throw CalibrationError("calibrate_pca: negative factor count");
    if (history.size() < static_cast<std::size_t>(n_factors) + 2) {
        throw CalibrationError("calibrate_pca: history of " + std::to_string(history.size()) +
                               " curves is too short for " + std::to_string(n_factors) +
                               " factors");
    }
    const auto n = static_cast<Eigen::Index>(history.front().size());
    if (n == 0) throw CalibrationError("calibrate_pca: empty curves");
    if (n_factors > n) throw CalibrationError("calibrate_pca: more factors than maturities");
    for (const auto& c : history) {
        if (static_cast<Eigen::Index>(c.size()) != n) {
            throw CalibrationError("calibrate_pca: curves of unequal length in history");
        }
    }

    const auto m = static_cast<Eigen::Index>(history.size() - 1);
    Eigen::MatrixXd inc(m, n);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto& a = history[static_cast<std::size_t>(r)].yields;
        const auto& b = history[static_cast<std::size_t>(r + 1)].yields;
        for (Eigen::Index c = 0; c < n; ++c) {
            inc(r, c) = b[static_cast<std::size_t>(c)] - a[static_cast<std::size_t>(c)];
        }
    }

    PcaModel model;
    model.n_factors = n_factors;
    model.trading_days_per_month = trading_days_per_month;
    model.mu = inc.colwise().mean().transpose();
    if (m < 2) {
        model.eigvecs = Eigen::MatrixXd::Identity(n, n);
        model.eigvals = Eigen::VectorXd::Zero(n);
        return model;
    }
    const Eigen::MatrixXd centered = inc.rowwise() - model.mu.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw CalibrationError("calibrate_pca: eigensolver failed");
    // Eigen returns ascending order.
    model.eigvals = solver.eigenvalues().reverse().cwiseMax(0.0);
    model.eigvecs = solver.eigenvectors().rowwise().reverse();
    return model;
}

// Monthly loadings: column k is sqrt(days * lambda_k) * eigvec_k.
inline Eigen::MatrixXd monthly_loadings(const PcaModel& model) {
    const auto k = static_cast<Eigen::Index>(model.n_factors);
    Eigen::MatrixXd out = model.eigvecs.leftCols(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        out.col(j) *= std::sqrt(model.trading_days_per_month * model.eigvals(j));
    }
    return out;
}

template <class Rng>
Eigen::VectorXd sample_curve_increment(const PcaModel& model, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd dy = model.trading_days_per_month * model.mu;
    for (int k = 0; k < model.n_factors; ++k) {
        const double sigma = std::sqrt(model.trading_days_per_month * model.eigvals(k));
        dy += (sigma * normal(rng)) * model.eigvecs.col(k);
    }
    return dy;
}

template <class Rng>
double sample_equity_step(double prev, const EquityParams& eq, Rng& rng) {
    if (!(prev > 0.0)) throw std::invalid_argument("sample_equity_step: price must be positive");
    const double mean = (eq.drift - 0.5 * eq.volatility * eq.volatility) / 12.0;
    const double sd = eq.volatility / std::sqrt(12.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    return prev * std::exp(mean + sd * normal(rng));
}

// Joint paths of monthly yield curves and equity prices, t = 0..steps.
class ScenarioBatch {
public:
    ScenarioBatch() = default;
    ScenarioBatch(std::size_t count, std::size_t steps, std::size_t curve_length, std::uint64_t seed)
        : count_(count), steps_(steps), curve_length_(curve_length), seed_(seed),
          curves_(count * (steps + 1) * curve_length, 0.0), equity_(count * (steps + 1), 0.0) {}

    std::size_t count() const { return count_; }
    std::size_t steps() const { return steps_; }
    std::size_t curve_length() const { return curve_length_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> curve(std::size_t scenario, std::size_t t) const {
        return {curves_.data() + offset(scenario, t), curve_length_};
    }
    std::span<double> curve(std::size_t scenario, std::size_t t) {
        return {curves_.data() + offset(scenario, t), curve_length_};
    }
    YieldCurve yield_curve(std::size_t scenario, std::size_t t) const {
        auto c = curve(scenario, t);
        return YieldCurve{std::vector<double>(c.begin(), c.end())};
    }
    double equity(std::size_t scenario, std::size_t t) const {
        return equity_[scenario * (steps_ + 1) + t];
    }
    double& equity(std::size_t scenario, std::size_t t) { return equity_[scenario * (steps_ + 1) + t]; }

    std::span<const double> raw_curves() const { return curves_; }
    std::span<const double> raw_equity() const { return equity_; }
    std::vector<double>& mutable_curves() { return curves_; }
    std::vector<double>& mutable_equity() { return equity_; }

    bool operator==(const ScenarioBatch&) const = default;

private:
    std::size_t offset(std::size_t scenario, std::size_t t) const {
        return (scenario * (steps_ + 1) + t) * curve_length_;
    }

    std::size_t count_ = 0;
    std::size_t steps_ = 0;
    std::size_t curve_length_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> curves_;
    std::vector<double> equity_;
};

inline ScenarioBatch generate_batch(const YieldCurve& anchor, const PcaModel& model,
                                    const EquityParams& eq, std::size_t steps, std::size_t count,
                                    std::uint64_t seed, unsigned workers = 1) {
    if (anchor.size() != model.dimension()) {
        throw std::invalid_argument("generate_batch: anchor length does not match the PCA model");
    }
    if (!(eq.s0 > 0.0) || eq.volatility < 0.0) {
        throw std::invalid_argument("generate_batch: invalid equity parameters");
    }
    const std::size_t n = anchor.size();
    ScenarioBatch batch(count, steps, n, seed);
    const Eigen::MatrixXd loadings = monthly_loadings(model);
    const Eigen::VectorXd drift = model.trading_days_per_month * model.mu;

    parallel_for(count, workers, [&](std::size_t i) {
        auto first = batch.curve(i, 0);
        std::copy(anchor.yields.begin(), anchor.yields.end(), first.begin());
        batch.equity(i, 0) = eq.s0;
        Eigen::VectorXd z(model.n_factors);
        for (std::size_t t = 1; t <= steps; ++t) {
            CounterStream curve_rng(seed, i, t, StreamTag::curve);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int k = 0; k < model.n_factors; ++k) z(k) = normal(curve_rng);
            const Eigen::VectorXd dy = drift + loadings * z;
            auto prev = batch.curve(i, t - 1);
            auto next = batch.curve(i, t);
            for (std::size_t j = 0; j < n; ++j) next[j] = prev[j] + dy(static_cast<Eigen::Index>(j));

            CounterStream equity_rng(seed, i, t, StreamTag::equity);
            batch.equity(i, t) = sample_equity_step(batch.equity(i, t - 1), eq, equity_rng);
        }
    });
    return batch;
}

}  // namespace deepalm

#endif  // DEEPALM_SCENARIOS_HPP
