#ifndef DEEPALM_EPISODE_HPP
#define DEEPALM_EPISODE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "deepalm/balance_sheet.hpp"
#include "deepalm/scenarios.hpp"
#include "deepalm/strategies.hpp"

namespace deepalm {

// Fixed ingredients shared by every scenario of a run.
struct EpisodeSetup {
    LiabilitySchedule liabilities;
    BalanceSheetState initial;
    FrictionParams frictions;
};

struct NodeRecord {
    int t = 0;
    Valuation pre;
    Action action;
    Valuation post;
    double equity_trade_cost = 0.0;  // kappa * |delta_post - delta_pre| * S_t
    double bond_inflow = 0.0;
    double liability_outflow = 0.0;
    double penalty = 0.0;
};

struct EpisodeOutcome {
    double initial_net_worth = 0.0;
    double terminal_net_worth = 0.0;  // E_T^post
    double liability_paid = 0.0;
    double penalties = 0.0;
    bool finite = true;
    std::vector<NodeRecord> trace;
};

inline Market market_at(const ScenarioBatch& batch, std::size_t scenario, std::size_t t) {
    return Market::make(batch.yield_curve(scenario, t), batch.equity(scenario, t));
}

// Plain roll-forward through the balance-sheet operations up to the
// objective date `horizon` (1..steps); no derivative bookkeeping.
inline EpisodeOutcome run_episode(const EpisodeSetup& setup, const ScenarioBatch& batch,
                                  std::size_t scenario, const Strategy& strategy, int horizon,
                                  bool record = false) {
    if (horizon < 1 || static_cast<std::size_t>(horizon) > batch.steps()) {
        throw std::invalid_argument("run_episode: horizon outside the simulated grid");
    }
    EpisodeOutcome out;
    BalanceSheetState state = setup.initial;
    Market market = market_at(batch, scenario, 0);
    for (int t = 0;; ++t) {
        const Valuation pre = valuation(state, market, setup.liabilities);
        if (t == 0) out.initial_net_worth = pre.net_worth;
        const bool last_date = static_cast<std::size_t>(t) == batch.steps();
        if (t == horizon && last_date) {
            out.terminal_net_worth = pre.net_worth;
            break;
        }
        const Action action = strategy(DecisionContext{state, market, pre, t});
        const BalanceSheetState post = restructure(state, action, market, setup.frictions);
        if (t == horizon) {
            out.terminal_net_worth = valuation(post, market, setup.liabilities).net_worth;
            break;
        }
        Market next_market = market_at(batch, scenario, static_cast<std::size_t>(t + 1));
        RollResult rolled = roll_forward(post, market, setup.liabilities, setup.frictions);
        out.liability_paid += rolled.liability_outflow;
        out.penalties += rolled.penalty;
        if (record) {
            NodeRecord node;
            node.t = t;
            node.pre = pre;
            node.action = action;
            node.post = valuation(post, market, setup.liabilities);
            node.equity_trade_cost =
                setup.frictions.kappa * std::fabs(action.delta_post - state.delta) * market.spot;
            node.bond_inflow = rolled.bond_inflow;
            node.liability_outflow = rolled.liability_outflow;
            node.penalty = rolled.penalty;
            out.trace.push_back(node);
        }
        state = std::move(rolled.next);
        market = std::move(next_market);
    }
    out.finite = std::isfinite(out.terminal_net_worth) && std::isfinite(out.initial_net_worth);
    return out;
}

}  // namespace deepalm

#endif  // DEEPALM_EPISODE_HPP
