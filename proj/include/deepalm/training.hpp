#ifndef DEEPALM_TRAINING_HPP
#define DEEPALM_TRAINING_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepalm/balance_sheet.hpp"
#include "deepalm/episode.hpp"
#include "deepalm/parallel.hpp"
#include "deepalm/rng.hpp"
#include "deepalm/scenarios.hpp"
#include "deepalm/strategies.hpp"
#include "deepalm/termstructure.hpp"

namespace deepalm {

enum class ObjectiveKind { iso_elastic, quadratic };

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::iso_elastic;
    double gamma = 1.0;            // relative risk aversion
    double epsilon = 1e-4;         // floor inside the utility
    double target_return = 0.02;   // annualized, quadratic objective only
    int horizon = 120;             // objective date T in months

    void validate() const {
        if (!(gamma >= 0.0)) throw std::invalid_argument("objective: gamma must be nonnegative");
        if (kind == ObjectiveKind::iso_elastic && !(epsilon > 0.0)) {
            throw std::invalid_argument("objective: epsilon must be positive");
        }
        if (kind == ObjectiveKind::quadratic && !(target_return > 0.0)) {
            throw std::invalid_argument("objective: target return must be positive");
        }
        if (horizon < 1) throw std::invalid_argument("objective: horizon must be at least one month");
    }
};

inline double utility(double x, double gamma) {
    if (!(x > 0.0)) throw std::domain_error("utility: argument must be positive");
    if (gamma == 1.0) return std::log(x);
    return (std::pow(x, 1.0 - gamma) - 1.0) / (1.0 - gamma);
}

inline double utility_derivative(double x, double gamma) {
    if (!(x > 0.0)) throw std::domain_error("utility_derivative: argument must be positive");
    return gamma == 1.0 ? 1.0 / x : std::pow(x, -gamma);
}

struct TerminalLoss {
    double loss = 0.0;
    double slope = 0.0;  // d loss / d E_T
};

// Loss to minimize given terminal and initial net worth.
inline TerminalLoss terminal_loss(double terminal, double initial, const ObjectiveSpec& obj) {
    TerminalLoss r;
    if (std::isnan(terminal)) {
        // left for the caller to report with the scenario index
        r.loss = r.slope = terminal;
        return r;
    }
    if (obj.kind == ObjectiveKind::iso_elastic) {
        if (!(initial > 0.0)) throw std::domain_error("terminal_loss: initial net worth must be positive");
        const double x = (obj.epsilon + std::max(terminal, 0.0)) / initial;
        r.loss = -utility(x, obj.gamma);
        r.slope = terminal > 0.0 ? -utility_derivative(x, obj.gamma) / initial : 0.0;
        return r;
    }
    const double target = std::pow(1.0 + obj.target_return, obj.horizon / 12.0) * initial;
    const double gap = terminal - target;
    r.loss = gap * gap;
    r.slope = 2.0 * gap;
    return r;
}

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, std::size_t scenario)
        : std::runtime_error(what + " (scenario " + std::to_string(scenario) + ")"), scenario_(scenario) {}
    std::size_t scenario() const { return scenario_; }

private:
    std::size_t scenario_;
};

// Per-step intermediates kept by the forward sweep for the reverse sweep.
struct StepTape {
    std::vector<double> discounts;
    double cash = 0.0, bonds = 0.0, stock = 0.0, assets = 0.0, liabilities = 0.0;
    double spot = 0.0, delta = 0.0;
    FeatureVector x{};
    ForwardCache cache;
    std::array<double, 6> coupons{};
    std::array<bool, 6> available{};
    double trade_sign = 0.0;
    double cash_post = 0.0, assets_post = 0.0;
    bool penalty_active = false;
};

struct EpisodeTape {
    std::vector<StepTape> steps;
    std::vector<double> bonds;      // scratch: aggregated bond cash-flows
    std::vector<double> adj_bonds;  // scratch: their adjoint
};

struct EpisodeValue {
    double loss = 0.0;
    double initial_net_worth = 0.0;
    double terminal_net_worth = 0.0;
};

namespace detail {

inline void require_policy_covers(const PolicyStack& policy, int horizon, std::size_t steps) {
    const std::size_t needed = static_cast<std::size_t>(horizon) == steps ? steps
                                                                         : static_cast<std::size_t>(horizon) + 1;
    if (policy.steps() < needed) throw std::invalid_argument("policy has fewer networks than decision dates");
}

}  // namespace detail

// Forward sweep of one episode under a policy, recording what the reverse
// sweep needs. Mirrors restructure/roll_forward with V^post = V^pre + 100 sum h.
inline EpisodeValue record_episode(const PolicyStack& policy, const ScenarioBatch& batch, std::size_t scenario,
                                   const EpisodeSetup& setup, const ObjectiveSpec& obj, EpisodeTape& tape) {
    const int horizon = obj.horizon;
    if (horizon < 1 || static_cast<std::size_t>(horizon) > batch.steps()) {
        throw std::invalid_argument("episode: horizon outside the simulated grid");
    }
    detail::require_policy_covers(policy, horizon, batch.steps());
    const std::size_t n = batch.curve_length();
    if (setup.initial.bonds.size() != n) throw std::invalid_argument("episode: bond vector length");
    const bool terminal_pre = static_cast<std::size_t>(horizon) == batch.steps();
    const FrictionParams& fr = setup.frictions;
    const auto specs = all_bond_specs();

    tape.steps.resize(static_cast<std::size_t>(horizon) + 1);
    tape.bonds.assign(setup.initial.bonds.flows.begin(), setup.initial.bonds.flows.end());
    double cash = setup.initial.cash;
    double delta = setup.initial.delta;
    EpisodeValue ev;

    for (int t = 0; t <= horizon; ++t) {
        StepTape& st = tape.steps[static_cast<std::size_t>(t)];
        const auto curve = batch.curve(scenario, static_cast<std::size_t>(t));
        st.discounts.resize(n);
        discount_into(curve, st.discounts);
        st.spot = batch.equity(scenario, static_cast<std::size_t>(t));
        st.cash = cash;
        st.delta = delta;
        st.bonds = value(std::span<const double>(tape.bonds), std::span<const double>(st.discounts));
        st.stock = delta * st.spot;
        st.assets = st.cash + st.bonds + st.stock;
        st.liabilities = liability_value(setup.liabilities, t, st.discounts);
        const double net_worth = st.assets - st.liabilities;
        if (t == 0) ev.initial_net_worth = net_worth;
        if (t == horizon && terminal_pre) {
            ev.terminal_net_worth = net_worth;
            break;
        }

        Valuation v{st.cash, st.bonds, st.stock, st.assets, st.liabilities, net_worth};
        st.x = features(v, delta, curve);
        Action a = forward(policy.network(static_cast<std::size_t>(t)), st.x, st.cache);
        double purchases = 0.0;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            st.available[i] = static_cast<std::size_t>(specs[i].maturity_months) <= n;
            if (!st.available[i]) {
                a.holdings[i] = 0.0;
                continue;
            }
            st.coupons[i] = par_coupon(std::span<const double>(st.discounts), specs[i]);
            purchases += kFaceValue * a.holdings[i];
        }
        const double trade = a.delta_post - delta;
        st.trade_sign = trade > 0.0 ? 1.0 : (trade < 0.0 ? -1.0 : 0.0);
        st.cash_post = cash - purchases - (trade + fr.kappa * std::fabs(trade)) * st.spot;
        const double bonds_post = st.bonds + purchases;
        st.assets_post = st.cash_post + bonds_post + a.delta_post * st.spot;
        if (t == horizon) {
            ev.terminal_net_worth = st.assets_post - st.liabilities;
            break;
        }

        for (std::size_t i = 0; i < specs.size(); ++i) {
            const double h = a.holdings[i];
            if (h == 0.0) continue;
            for_each_payment(specs[i], st.coupons[i], [&](int offset, double amount) {
                tape.bonds[static_cast<std::size_t>(offset - 1)] += h * amount;
            });
        }
        const double shortfall = fr.liquidity_floor * st.assets_post - st.cash_post;
        st.penalty_active = shortfall > 0.0;
        const double penalty = fr.penalty_rate / 12.0 * (st.penalty_active ? shortfall : 0.0);
        cash = st.cash_post + tape.bonds[0] - liability_due(setup.liabilities, t) - penalty;
        std::rotate(tape.bonds.begin(), tape.bonds.begin() + 1, tape.bonds.end());
        tape.bonds.back() = 0.0;
        delta = a.delta_post;
    }
    ev.loss = terminal_loss(ev.terminal_net_worth, ev.initial_net_worth, obj).loss;
    return ev;
}

// Reverse sweep: accumulates scale * d loss / d params into grad (policy
// layout). Subgradient 0 is used at every kink.
inline void backpropagate_episode(const PolicyStack& policy, const EpisodeTape& tape, const EpisodeSetup& setup,
                                  const ObjectiveSpec& obj, const EpisodeValue& ev, std::size_t steps,
                                  double scale, std::span<double> grad, EpisodeTape& scratch) {
    const int horizon = obj.horizon;
    const bool terminal_pre = static_cast<std::size_t>(horizon) == steps;
    const FrictionParams& fr = setup.frictions;
    const auto specs = all_bond_specs();
    const double g = scale * terminal_loss(ev.terminal_net_worth, ev.initial_net_worth, obj).slope;
    const std::size_t n = tape.steps.front().discounts.size();

    std::vector<double>& adj_b = scratch.adj_bonds;
    adj_b.assign(n, 0.0);
    double adj_c = 0.0, adj_delta = 0.0;

    // Adjoints of the post-restructuring quantities at the step being processed.
    double adj_cash_post = 0.0, adj_bonds_post_value = 0.0, adj_delta_post = 0.0;
    std::vector<double> adj_b_post(n, 0.0);

    int t = horizon;
    if (terminal_pre) {
        const StepTape& st = tape.steps[static_cast<std::size_t>(t)];
        adj_c = g;
        for (std::size_t k = 0; k < n; ++k) adj_b[k] = g * st.discounts[k];
        adj_delta = g * st.spot;
        --t;
    } else {
        const StepTape& st = tape.steps[static_cast<std::size_t>(t)];
        adj_cash_post = g;
        adj_bonds_post_value = g;
        adj_delta_post = g * st.spot;
        std::fill(adj_b_post.begin(), adj_b_post.end(), 0.0);
    }

    bool roll_pending = terminal_pre;
    for (; t >= 0; --t) {
        const StepTape& st = tape.steps[static_cast<std::size_t>(t)];
        if (roll_pending) {
            // C' = C^post + B^post[0] - due - p/12 * max(f A^post - C^post, 0); B' = U B^post.
            const double active = st.penalty_active ? fr.penalty_rate / 12.0 : 0.0;
            const double adj_assets_post = -adj_c * active * fr.liquidity_floor;
            adj_cash_post = adj_c * (1.0 + active) + adj_assets_post;
            adj_bonds_post_value = adj_assets_post;
            adj_delta_post = adj_delta + adj_assets_post * st.spot;
            adj_b_post[0] = adj_c;
            for (std::size_t k = 1; k < n; ++k) adj_b_post[k] = adj_b[k - 1];
        }
        roll_pending = true;

        // Restructuring.
        const double trade_factor = (1.0 + fr.kappa * st.trade_sign) * st.spot;
        std::array<double, kActionCount> adj_out{};
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (!st.available[i]) continue;
            double a = kFaceValue * (adj_bonds_post_value - adj_cash_post);
            for_each_payment(specs[i], st.coupons[i], [&](int offset, double amount) {
                a += adj_b_post[static_cast<std::size_t>(offset - 1)] * amount;
            });
            adj_out[i] = a;
        }
        adj_out[6] = adj_delta_post - adj_cash_post * trade_factor;

        double adj_cash = adj_cash_post;
        double adj_bond_value = adj_bonds_post_value;
        double adj_dpre = adj_cash_post * trade_factor;
        std::copy(adj_b_post.begin(), adj_b_post.end(), adj_b.begin());

        const FeatureVector adj_x = backward(policy.network(static_cast<std::size_t>(t)), st.x, st.cache, adj_out,
                                             grad.subspan(static_cast<std::size_t>(t) * kParamsPerNetwork,
                                                          kParamsPerNetwork));
        double adj_assets = 0.0;
        if (st.assets > 0.0) {
            const double a2 = st.assets * st.assets;
            adj_assets = adj_x[0] * st.liabilities / a2 - adj_x[1] * st.cash / a2 - adj_x[2] * st.stock / a2;
            adj_cash += adj_x[1] / st.assets;
            adj_dpre += adj_x[2] * st.spot / st.assets;
        }
        adj_dpre += adj_x[3];
        adj_cash += adj_assets;
        adj_bond_value += adj_assets;
        adj_dpre += adj_assets * st.spot;
        for (std::size_t k = 0; k < n; ++k) adj_b[k] += adj_bond_value * st.discounts[k];
        adj_c = adj_cash;
        adj_delta = adj_dpre;
    }
}

// Sum of per-scenario gradients over fixed-size chunks, reduced pairwise in
// a fixed order so the result does not depend on the worker count.
struct BatchGradient {
    double mean_loss = 0.0;
    std::vector<double> grad;
};

inline constexpr std::size_t kGradientChunk = 8;

inline BatchGradient batch_gradient(const PolicyStack& policy, const ScenarioBatch& batch,
                                    std::span<const std::size_t> scenarios, const EpisodeSetup& setup,
                                    const ObjectiveSpec& obj, unsigned workers = 1) {
    if (scenarios.empty()) throw std::invalid_argument("gradient: empty batch");
    const std::size_t p = policy.parameter_count();
    const std::size_t chunks = (scenarios.size() + kGradientChunk - 1) / kGradientChunk;
    std::vector<std::vector<double>> partial(chunks);
    std::vector<double> losses(scenarios.size(), 0.0);
    const double scale = 1.0 / static_cast<double>(scenarios.size());

    parallel_for(chunks, workers, [&](std::size_t c) {
        partial[c].assign(p, 0.0);
        EpisodeTape tape, scratch;
        const std::size_t end = std::min(scenarios.size(), (c + 1) * kGradientChunk);
        for (std::size_t j = c * kGradientChunk; j < end; ++j) {
            const std::size_t s = scenarios[j];
            const EpisodeValue ev = record_episode(policy, batch, s, setup, obj, tape);
            if (!std::isfinite(ev.loss)) throw NonFiniteError("gradient: non-finite loss", s);
            losses[j] = ev.loss;
            backpropagate_episode(policy, tape, setup, obj, ev, batch.steps(), scale, partial[c], scratch);
        }
    });

    for (std::size_t stride = 1; stride < chunks; stride *= 2) {
        for (std::size_t c = 0; c + stride < chunks; c += 2 * stride) {
            auto& dst = partial[c];
            const auto& src = partial[c + stride];
            for (std::size_t k = 0; k < p; ++k) dst[k] += src[k];
        }
    }
    BatchGradient out;
    out.grad = std::move(partial[0]);
    for (double v : out.grad) {
        if (!std::isfinite(v)) {
            for (std::size_t j = 0; j < scenarios.size(); ++j) {
                if (!std::isfinite(losses[j])) throw NonFiniteError("gradient: non-finite value", scenarios[j]);
            }
            throw NonFiniteError("gradient: non-finite gradient component", scenarios.front());
        }
    }
    double total = 0.0;
    for (double l : losses) total += l;
    out.mean_loss = total / static_cast<double>(scenarios.size());
    return out;
}

inline BatchGradient gradient(const PolicyStack& policy, const ScenarioBatch& batch, const EpisodeSetup& setup,
                              const ObjectiveSpec& obj, unsigned workers = 1) {
    std::vector<std::size_t> all(batch.count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return batch_gradient(policy, batch, all, setup, obj, workers);
}

inline double episode_objective(const PolicyStack& policy, const ScenarioBatch& batch, std::size_t scenario,
                                const EpisodeSetup& setup, const ObjectiveSpec& obj) {
    EpisodeTape tape;
    return record_episode(policy, batch, scenario, setup, obj, tape).loss;
}

// Mean loss over the whole batch, forward sweep only.
inline double mean_loss(const PolicyStack& policy, const ScenarioBatch& batch, const EpisodeSetup& setup,
                        const ObjectiveSpec& obj, unsigned workers = 1) {
    std::vector<double> losses(batch.count(), 0.0);
    const std::size_t chunks = (batch.count() + kGradientChunk - 1) / kGradientChunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        EpisodeTape tape;
        const std::size_t end = std::min(batch.count(), (c + 1) * kGradientChunk);
        for (std::size_t s = c * kGradientChunk; s < end; ++s) {
            losses[s] = record_episode(policy, batch, s, setup, obj, tape).loss;
        }
    });
    double total = 0.0;
    for (double l : losses) total += l;
    return batch.count() ? total / static_cast<double>(batch.count()) : 0.0;
}

struct OptimizerConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t epochs = 10;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double clip_norm = 10.0;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    void validate() const {
        if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning rate must be positive");
        if (batch_size < 1) throw std::invalid_argument("optimizer: batch size must be at least 1");
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
            throw std::invalid_argument("optimizer: moment decays must lie in [0, 1)");
        }
        if (!(clip_norm > 0.0)) throw std::invalid_argument("optimizer: clip norm must be positive");
    }
};

struct AdamState {
    std::vector<double> first;
    std::vector<double> second;
    std::uint64_t step = 0;

    bool operator==(const AdamState&) const = default;
};

// Clips to the global norm, then takes one adaptive-moment step.
inline void adam_step(std::span<double> params, std::span<double> grad, AdamState& state,
                      const OptimizerConfig& cfg) {
    if (state.first.size() != params.size()) {
        state.first.assign(params.size(), 0.0);
        state.second.assign(params.size(), 0.0);
    }
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    if (norm > cfg.clip_norm) {
        const double s = cfg.clip_norm / norm;
        for (double& g : grad) g *= s;
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.first[k] = cfg.beta1 * state.first[k] + (1.0 - cfg.beta1) * grad[k];
        state.second[k] = cfg.beta2 * state.second[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
        params[k] -= cfg.learning_rate * (state.first[k] / c1) / (std::sqrt(state.second[k] / c2) + cfg.adam_epsilon);
    }
}

inline std::uint64_t checksum(std::span<const double> values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFFu;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double wall_seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    double initial_validation_loss = 0.0;
    double best_validation_loss = 0.0;
    std::size_t best_epoch = 0;  // 0 = initial parameters
    std::uint64_t parameter_checksum = 0;
    bool diverged = false;
};

// Resumable optimizer state.
struct Checkpoint {
    PolicyStack current;
    PolicyStack best;
    AdamState adam;
    std::size_t epoch = 0;
    double best_validation_loss = 0.0;
    std::size_t best_epoch = 0;
    double initial_validation_loss = 0.0;
    std::vector<EpochRecord> history;
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& what, TrainReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const TrainReport& report() const { return report_; }

private:
    TrainReport report_;
};

struct TrainResult {
    PolicyStack policy;  // best on validation
    TrainReport report;
    Checkpoint checkpoint;
};

inline Checkpoint start_checkpoint(const PolicyStack& initial, const ScenarioBatch& validation,
                                   const EpisodeSetup& setup, const ObjectiveSpec& obj, unsigned workers) {
    Checkpoint ck;
    ck.current = initial;
    ck.best = initial;
    ck.initial_validation_loss = mean_loss(initial, validation, setup, obj, workers);
    ck.best_validation_loss = ck.initial_validation_loss;
    return ck;
}

// Minibatch Adam over cfg.epochs total epochs, continuing from `ck`.
// on_epoch, when set, is called after every epoch (e.g. to write a checkpoint).
inline TrainResult train(Checkpoint ck, const ScenarioBatch& training, const ScenarioBatch& validation,
                         const EpisodeSetup& setup, const ObjectiveSpec& obj, const OptimizerConfig& cfg,
                         const std::function<void(const Checkpoint&)>& on_epoch = {}) {
    cfg.validate();
    obj.validate();
    if (training.count() == 0) throw std::invalid_argument("train: empty training batch");
    if (training.seed() == validation.seed()) {
        throw std::invalid_argument("train: training and validation batches share a seed");
    }
    auto make_report = [&] {
        TrainReport r;
        r.epochs = ck.history;
        r.initial_validation_loss = ck.initial_validation_loss;
        r.best_validation_loss = ck.best_validation_loss;
        r.best_epoch = ck.best_epoch;
        r.parameter_checksum = checksum(ck.best.flat());
        return r;
    };

    std::vector<std::size_t> order(training.count());
    for (std::size_t epoch = ck.epoch + 1; epoch <= cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 shuffle_rng(hash_key({cfg.seed, epoch, static_cast<std::uint64_t>(StreamTag::shuffle)}));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
            BatchGradient bg;
            try {
                bg = batch_gradient(ck.current, training,
                                    std::span<const std::size_t>(order.data() + begin, end - begin), setup, obj,
                                    cfg.workers);
            } catch (const NonFiniteError& e) {
                TrainReport r = make_report();
                r.diverged = true;
                throw TrainingDiverged(std::string("train: ") + e.what(), r);
            }
            adam_step(ck.current.flat(), bg.grad, ck.adam, cfg);
            loss_sum += bg.mean_loss;
            ++batches;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches);
        rec.validation_loss = mean_loss(ck.current, validation, setup, obj, cfg.workers);
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        ck.history.push_back(rec);
        ck.epoch = epoch;
        if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.validation_loss)) {
            TrainReport r = make_report();
            r.diverged = true;
            throw TrainingDiverged("train: loss became non-finite at epoch " + std::to_string(epoch), r);
        }
        if (rec.validation_loss < ck.best_validation_loss) {
            ck.best_validation_loss = rec.validation_loss;
            ck.best_epoch = epoch;
            ck.best = ck.current;
        }
        if (on_epoch) on_epoch(ck);
    }
    TrainResult out;
    out.report = make_report();
    out.policy = ck.best;
    out.checkpoint = std::move(ck);
    return out;
}

inline TrainResult train(const PolicyStack& initial, const ScenarioBatch& training, const ScenarioBatch& validation,
                         const EpisodeSetup& setup, const ObjectiveSpec& obj, const OptimizerConfig& cfg) {
    return train(start_checkpoint(initial, validation, setup, obj, cfg.workers), training, validation, setup, obj,
                 cfg);
}

}  // namespace deepalm

#endif  // DEEPALM_TRAINING_HPP
