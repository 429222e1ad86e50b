#ifndef DEEPALM_STRATEGIES_HPP
#define DEEPALM_STRATEGIES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "deepalm/balance_sheet.hpp"
#include "deepalm/rng.hpp"
#include "deepalm/termstructure.hpp"

namespace deepalm {

inline constexpr std::size_t kFeatureCount = 10;
inline constexpr std::size_t kHiddenWidth = 15;
inline constexpr std::size_t kActionCount = 7;

using FeatureVector = std::array<double, kFeatureCount>;

// Leverage, liquidity, risk portion, equity units, then the yields of the
// six issued series. Ratios are zero when assets are not positive.
inline FeatureVector features(const Valuation& v, double delta, std::span<const double> yields) {
    FeatureVector x{};
    if (v.assets > 0.0) {
        x[0] = v.net_worth / v.assets;
        x[1] = v.cash / v.assets;
        x[2] = v.stock / v.assets;
    }
    x[3] = delta;
    // Curves shorter than a series' maturity use their last point.
    const auto n = static_cast<int>(yields.size());
    for (std::size_t i = 0; i < kBondMaturities.size(); ++i) {
        x[4 + i] = yields[static_cast<std::size_t>(std::min(kBondMaturities[i], n) - 1)];
    }
    return x;
}

inline FeatureVector features(const Valuation& v, double delta, const YieldCurve& curve) {
    return features(v, delta, std::span<const double>(curve.yields));
}

inline FeatureVector features(const BalanceSheetState& s, const Market& m, const LiabilitySchedule& l) {
    return features(valuation(s, m, l), s.delta, m.curve);
}

// Parameter layout of one timestep network: three dense layers
// 10 -> 15 -> 15 -> 7, each stored as a row-major weight matrix followed by
// its bias.
struct LayerShape {
    std::size_t inputs;
    std::size_t outputs;
    std::size_t offset;

    constexpr std::size_t weight(std::size_t row, std::size_t col) const { return offset + row * inputs + col; }
    constexpr std::size_t bias(std::size_t row) const { return offset + outputs * inputs + row; }
    constexpr std::size_t size() const { return outputs * (inputs + 1); }
};

inline constexpr std::array<LayerShape, 3> kLayers = {
    LayerShape{kFeatureCount, kHiddenWidth, 0},
    LayerShape{kHiddenWidth, kHiddenWidth, kHiddenWidth * (kFeatureCount + 1)},
    LayerShape{kHiddenWidth, kActionCount,
               kHiddenWidth * (kFeatureCount + 1) + kHiddenWidth * (kHiddenWidth + 1)},
};
inline constexpr std::size_t kParamsPerNetwork = kLayers[2].offset + kLayers[2].size();

using NetworkParams = std::span<const double>;

// One independent network per decision time t = 0..N-1, stored contiguously.
class PolicyStack {
public:
    PolicyStack() = default;
    explicit PolicyStack(std::size_t steps) : steps_(steps), params_(steps * kParamsPerNetwork, 0.0) {}

    std::size_t steps() const { return steps_; }
    std::size_t parameter_count() const { return params_.size(); }

    NetworkParams network(std::size_t t) const {
        return {params_.data() + t * kParamsPerNetwork, kParamsPerNetwork};
    }
    std::span<double> network(std::size_t t) {
        return {params_.data() + t * kParamsPerNetwork, kParamsPerNetwork};
    }
    std::span<const double> flat() const { return params_; }
    std::span<double> flat() { return params_; }

    bool operator==(const PolicyStack&) const = default;

private:
    std::size_t steps_ = 0;
    std::vector<double> params_;
};

// Zero-mean Gaussian weights with standard deviation gain / sqrt(fan-in),
// zero biases.
inline PolicyStack init_policy(std::size_t steps, std::uint64_t seed, double gain) {
    PolicyStack p(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        auto net = p.network(t);
        for (std::size_t l = 0; l < kLayers.size(); ++l) {
            const LayerShape& layer = kLayers[l];
            CounterStream rng(seed, t, l, StreamTag::init);
            std::normal_distribution<double> normal(0.0, gain / std::sqrt(static_cast<double>(layer.inputs)));
            for (std::size_t r = 0; r < layer.outputs; ++r) {
                for (std::size_t c = 0; c < layer.inputs; ++c) net[layer.weight(r, c)] = normal(rng);
            }
        }
    }
    return p;
}

// Pre-activations and activations of one network evaluation.
struct ForwardCache {
    std::array<double, kHiddenWidth> z0{}, a0{}, z1{}, a1{};
    std::array<double, kActionCount> z2{}, out{};
};

namespace detail {

inline void dense_relu(NetworkParams net, const LayerShape& layer, std::span<const double> in,
                       std::span<double> z, std::span<double> a) {
    for (std::size_t r = 0; r < layer.outputs; ++r) {
        double s = net[layer.bias(r)];
        const double* w = net.data() + layer.weight(r, 0);
        for (std::size_t c = 0; c < layer.inputs; ++c) s += w[c] * in[c];
        z[r] = s;
        a[r] = s > 0.0 ? s : 0.0;
    }
}

// Accumulates weight/bias gradients and writes the input adjoint. The ReLU
// derivative is taken as 0 at exactly 0.
inline void dense_relu_backward(NetworkParams net, const LayerShape& layer, std::span<const double> in,
                                std::span<const double> z, std::span<const double> adj_a,
                                std::span<double> grad, std::span<double> adj_in) {
    std::fill(adj_in.begin(), adj_in.end(), 0.0);
    for (std::size_t r = 0; r < layer.outputs; ++r) {
        if (!(z[r] > 0.0)) continue;
        const double g = adj_a[r];
        if (g == 0.0) continue;
        grad[layer.bias(r)] += g;
        double* gw = grad.data() + layer.weight(r, 0);
        const double* w = net.data() + layer.weight(r, 0);
        for (std::size_t c = 0; c < layer.inputs; ++c) {
            gw[c] += g * in[c];
            adj_in[c] += g * w[c];
        }
    }
}

}  // namespace detail

inline Action action_from_output(std::span<const double> out) {
    Action a;
    for (std::size_t i = 0; i < a.holdings.size(); ++i) a.holdings[i] = out[i];
    a.delta_post = out[6];
    return a;
}

inline Action forward(NetworkParams net, const FeatureVector& x, ForwardCache& cache) {
    detail::dense_relu(net, kLayers[0], x, cache.z0, cache.a0);
    detail::dense_relu(net, kLayers[1], cache.a0, cache.z1, cache.a1);
    detail::dense_relu(net, kLayers[2], cache.a1, cache.z2, cache.out);
    return action_from_output(cache.out);
}

inline Action forward(NetworkParams net, const FeatureVector& x) {
    ForwardCache cache;
    return forward(net, x, cache);
}

// Backpropagates an adjoint on the 7 outputs into `grad` (same layout as
// the network) and returns the adjoint on the features.
inline FeatureVector backward(NetworkParams net, const FeatureVector& x, const ForwardCache& cache,
                              std::span<const double> adj_out, std::span<double> grad) {
    std::array<double, kHiddenWidth> adj_a1{}, adj_a0{};
    FeatureVector adj_x{};
    detail::dense_relu_backward(net, kLayers[2], cache.a1, cache.z2, adj_out, grad, adj_a1);
    detail::dense_relu_backward(net, kLayers[1], cache.a0, cache.z1, adj_a1, grad, adj_a0);
    detail::dense_relu_backward(net, kLayers[0], x, cache.z0, adj_a0, grad, adj_x);
    return adj_x;
}

// Everything a strategy may look at when deciding at time t.
struct DecisionContext {
    const BalanceSheetState& state;
    const Market& market;
    const Valuation& valuation;
    int t;
};

using Strategy = std::function<Action(const DecisionContext&)>;

// The strategy keeps its own copy of the parameters.
inline Strategy policy_strategy(const PolicyStack& policy) {
    return [p = std::make_shared<const PolicyStack>(policy)](const DecisionContext& ctx) {
        const FeatureVector x = features(ctx.valuation, ctx.state.delta, ctx.market.curve);
        Action a = forward(p->network(static_cast<std::size_t>(ctx.t)), x);
        // series that would mature beyond the cash-flow horizon are not traded
        for (std::size_t i = 0; i < a.holdings.size(); ++i) {
            if (static_cast<std::size_t>(kBondMaturities[i]) > ctx.state.bonds.size()) a.holdings[i] = 0.0;
        }
        return a;
    };
}

// Cash above the liquidity floor goes into 1m bonds while their coupon is
// positive; the initial equity position is sold down linearly to zero at the
// last decision date.
inline Action benchmark_action(const Valuation& v, const Market& m, int t, double delta0, int steps,
                               double liquidity_floor = 0.10) {
    Action a;
    if (par_coupon(m.discounts, BondSpec{1}) > 0.0) {
        a.holdings[0] = std::max(v.cash - liquidity_floor * v.assets, 0.0) / kFaceValue;
    }
    if (steps > 1) {
        a.delta_post = std::max(delta0 * static_cast<double>(steps - 1 - t) / static_cast<double>(steps - 1), 0.0);
    }
    return a;
}

inline Strategy benchmark_strategy(double delta0, int steps, double liquidity_floor = 0.10) {
    return [=](const DecisionContext& ctx) {
        return benchmark_action(ctx.valuation, ctx.market, ctx.t, delta0, steps, liquidity_floor);
    };
}

}  // namespace deepalm

#endif  // DEEPALM_STRATEGIES_HPP
