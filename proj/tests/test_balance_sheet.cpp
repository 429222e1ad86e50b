#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deepalm/balance_sheet.hpp"
#include "deepalm/episode.hpp"
#include "deepalm/strategies.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace deepalm;

namespace {

Market flat_market(double rate, std::size_t n, double spot = 100.0) {
    return Market::make(YieldCurve{std::vector<double>(n, rate)}, spot);
}

// Fixed action sequence, indexed by decision date.
Strategy scripted(std::vector<Action> actions) {
    return [actions = std::move(actions)](const DecisionContext& ctx) {
        return actions.at(static_cast<std::size_t>(ctx.t));
    };
}

}  // namespace

TEST(BetaCdf, Endpoints) {
    EXPECT_EQ(beta_cdf(0.0, 1.5, 2.5), 0.0);
    EXPECT_EQ(beta_cdf(1.0, 1.5, 2.5), 1.0);
}

TEST(BetaCdf, UniformCase) {
    for (int k = 0; k <= 100; ++k) EXPECT_NEAR(beta_cdf(k / 100.0, 1.0, 1.0), k / 100.0, 1e-15);
}

TEST(BetaCdf, MatchesQuadrature) {
    EXPECT_NEAR(beta_cdf(0.5, 1.5, 2.5), oracle::beta_cdf_quadrature(0.5, 1.5, 2.5), 1e-12);
    for (double a : {0.5, 1.5, 2.0, 4.0}) {
        for (double b : {0.7, 2.5, 3.0}) {
            for (int k = 1; k < 40; ++k) {
                const double x = k / 40.0;
                EXPECT_NEAR(beta_cdf(x, a, b), oracle::beta_cdf_quadrature(x, a, b), 1e-12)
                    << "a=" << a << " b=" << b << " x=" << x;
            }
        }
    }
}

TEST(BetaCdf, RejectsBadInput) {
    EXPECT_THROW(beta_cdf(-0.1, 1, 1), std::invalid_argument);
    EXPECT_THROW(beta_cdf(1.1, 1, 1), std::invalid_argument);
    EXPECT_THROW(beta_cdf(0.5, 0, 1), std::invalid_argument);
}

TEST(Liabilities, SumToFace) {
    for (auto [a, b] : {std::pair{1.5, 2.5}, std::pair{1.0, 1.0}, std::pair{0.5, 3.0}, std::pair{5.0, 1.2}}) {
        const auto l = liability_schedule(a, b, 120);
        double s = 0.0;
        for (double v : l.payments.flows) s += v;
        EXPECT_NEAR(s, 100.0, 1e-9);
    }
}

TEST(Liabilities, UniformSchedule) {
    const auto l = liability_schedule(1.0, 1.0, 120);
    for (double v : l.payments.flows) EXPECT_NEAR(v, 100.0 / 120.0, 1e-12);
}

TEST(Liabilities, MidEntryAgainstQuadrature) {
    const auto l = liability_schedule(1.5, 2.5, 120);
    const double ref =
        100.0 * (oracle::beta_cdf_quadrature(0.5, 1.5, 2.5) - oracle::beta_cdf_quadrature(59.0 / 120.0, 1.5, 2.5));
    EXPECT_NEAR(l.payments[59], ref, 1e-10);
}

TEST(Liabilities, DueAndValue) {
    const auto l = liability_schedule(1.5, 2.5, 4);
    const std::vector<double> d = {0.9, 0.8, 0.7, 0.6};
    EXPECT_EQ(liability_due(l, 0), l.payments[0]);
    EXPECT_EQ(liability_due(l, 3), l.payments[3]);
    EXPECT_EQ(liability_due(l, 4), 0.0);
    EXPECT_DOUBLE_EQ(liability_value(l, 1, d), 0.9 * l.payments[1] + 0.8 * l.payments[2] + 0.7 * l.payments[3]);
    EXPECT_EQ(liability_value(l, 4, d), 0.0);
}

TEST(Restructure, IdentityAction) {
    BalanceSheetState s{0, 12.0, CashFlowVector(std::vector<double>(12, 1.0)), 0.3};
    const Market m = flat_market(0.02, 12, 95.0);
    const auto l = liability_schedule(1.5, 2.5, 12, 50.0);
    Action a;
    a.delta_post = 0.3;
    const auto post = restructure(s, a, m, FrictionParams{});
    EXPECT_EQ(post.cash, s.cash);
    EXPECT_EQ(post.bonds, s.bonds);
    EXPECT_EQ(post.delta, s.delta);
    EXPECT_EQ(valuation(post, m, l).assets, valuation(s, m, l).assets);
}

TEST(Restructure, EquityPurchaseCostsKappa) {
    BalanceSheetState s{0, 50.0, CashFlowVector(12), 0.0};
    const Market m = flat_market(0.02, 12, 80.0);
    const auto l = liability_schedule(1.5, 2.5, 12, 10.0);
    Action a;
    a.delta_post = 1.0;
    const FrictionParams fr;
    const auto post = restructure(s, a, m, fr);
    EXPECT_NEAR(valuation(post, m, l).assets, valuation(s, m, l).assets - fr.kappa * 80.0, 1e-12);
    EXPECT_NEAR(post.cash, 50.0 - 80.0 * (1.0 + fr.kappa), 1e-12);
}

TEST(Restructure, BondPurchaseAtPar) {
    BalanceSheetState s{0, 60.0, CashFlowVector(120), 0.1};
    const Market m = flat_market(0.03, 120);
    const auto l = liability_schedule(1.5, 2.5, 120);
    Action a;
    a.holdings[0] = 0.25;
    a.delta_post = 0.1;
    const auto pre = valuation(s, m, l);
    const auto post_state = restructure(s, a, m, FrictionParams{});
    const auto post = valuation(post_state, m, l);
    EXPECT_NEAR(post.cash, pre.cash - 25.0, 1e-12);
    EXPECT_NEAR(post.bonds, pre.bonds + 25.0, 1e-9);
    EXPECT_NEAR(post.assets, pre.assets, 1e-9);
}

TEST(Restructure, RejectsNegativeOrUnavailable) {
    BalanceSheetState s{0, 60.0, CashFlowVector(6), 0.0};
    const Market m = flat_market(0.03, 6);
    Action a;
    a.holdings[2] = -0.1;
    EXPECT_THROW(restructure(s, a, m, FrictionParams{}), std::invalid_argument);
    a.holdings[2] = 0.0;
    a.delta_post = -1.0;
    EXPECT_THROW(restructure(s, a, m, FrictionParams{}), std::invalid_argument);
    a.delta_post = 0.0;
    a.holdings[3] = 0.1;  // 12m does not fit a 6-month horizon
    EXPECT_THROW(restructure(s, a, m, FrictionParams{}), std::invalid_argument);
}

TEST(Restructure, LongOnlyBonds) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Market m = flat_market(0.025, 120);
    for (int rep = 0; rep < 50; ++rep) {
        BalanceSheetState s{0, 100.0, CashFlowVector(120), 0.5};
        for (auto& f : s.bonds.flows) f = u(rng);
        Action a;
        for (auto& h : a.holdings) h = u(rng) * (u(rng) < 0.5 ? 0.0 : 1.0);
        a.delta_post = u(rng);
        const auto post = restructure(s, a, m, FrictionParams{});
        for (std::size_t k = 0; k < 120; ++k) EXPECT_GE(post.bonds[k], s.bonds[k]);
    }
}

TEST(Penalty, Examples) {
    const FrictionParams fr;
    EXPECT_EQ(liquidity_penalty(100.0, 10.0, fr), 0.0);
    EXPECT_NEAR(liquidity_penalty(100.0, 0.0, fr), 0.2, 1e-15);
    EXPECT_EQ(liquidity_penalty(100.0, 50.0, fr), 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 150.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), c = u(rng);
        const double p = liquidity_penalty(a, c, fr);
        EXPECT_GE(p, 0.0);
        if (c >= 0.1 * a) {
            EXPECT_EQ(p, 0.0);
        }
    }
}

TEST(RollForward, PenaltyFromPostAssets) {
    const auto l = liability_schedule(1.5, 2.5, 6, 60.0);
    const Market m = flat_market(0.0, 6);
    BalanceSheetState post{0, 0.0, CashFlowVector(std::vector<double>{40.0, 0, 0, 0, 0, 0}), 0.6};
    // A^post = 0 + 40 + 60 = 100 with zero rates
    const auto r = roll_forward(post, m, l, FrictionParams{});
    EXPECT_NEAR(r.penalty, 0.2, 1e-15);
    EXPECT_EQ(r.bond_inflow, 40.0);
    EXPECT_EQ(r.liability_outflow, l.payments[0]);
    EXPECT_NEAR(r.next.cash, 40.0 - l.payments[0] - 0.2, 1e-14);
    EXPECT_EQ(r.next.t, 1);
    EXPECT_EQ(r.next.bonds, CashFlowVector(6));
}

TEST(RollForward, MatchesLedgerOracle) {
    for (int steps : {2, 3}) {
        oracle::LedgerInput in;
        in.steps = steps;
        in.rate = 0.031;
        in.cash0 = 100.0;
        in.delta0 = 0.2;
        for (int t = 0; t <= steps; ++t) in.spot.push_back(100.0 * std::exp(0.05 * t / 12.0));
        const auto l = liability_schedule(1.5, 2.5, static_cast<std::size_t>(steps), 50.0);
        in.liabilities = l.payments.flows;
        const std::vector<double> h = {0.55, 0.35, 0.6};
        const std::vector<double> e = {0.1, 0.3, 0.0};
        double oracle_terminal = 0.0;
        const auto rows = oracle::ledger(in, h, e, oracle_terminal);

        EpisodeSetup setup{l, BalanceSheetState{0, in.cash0, CashFlowVector(static_cast<std::size_t>(steps)), in.delta0},
                           FrictionParams{}};
        std::vector<Action> actions(3);
        for (std::size_t t = 0; t < 3; ++t) {
            actions[t].holdings[0] = h[t];
            actions[t].delta_post = e[t];
        }
        const auto batch = fixture::flat_batch(in.rate, static_cast<std::size_t>(steps), static_cast<std::size_t>(steps));
        const auto out = run_episode(setup, batch, 0, scripted(actions), steps, true);
        ASSERT_EQ(out.trace.size(), static_cast<std::size_t>(steps));
        for (int t = 0; t < steps; ++t) {
            const auto& node = out.trace[static_cast<std::size_t>(t)];
            const auto& row = rows[static_cast<std::size_t>(t)];
            EXPECT_NEAR(node.pre.cash, row.cash_pre, 1e-10) << t;
            EXPECT_NEAR(node.pre.bonds, row.bonds_pre, 1e-10) << t;
            EXPECT_NEAR(node.pre.stock, row.stock_pre, 1e-10) << t;
            EXPECT_NEAR(node.pre.liabilities, row.liab_pre, 1e-10) << t;
            EXPECT_NEAR(node.pre.net_worth, row.net_pre, 1e-10) << t;
            EXPECT_NEAR(node.post.cash, row.cash_post, 1e-10) << t;
            EXPECT_NEAR(node.post.assets, row.assets_post, 1e-10) << t;
            EXPECT_NEAR(node.penalty, row.penalty, 1e-10) << t;
        }
        EXPECT_NEAR(out.terminal_net_worth, oracle_terminal, 1e-10);
        EXPECT_NEAR(out.liability_paid, 50.0, 1e-12);
    }
}

TEST(LegacyReplay, ZeroRateHistory) {
    const YieldCurve zero{std::vector<double>(120, 0.0)};
    const std::vector<YieldCurve> history(120, zero);
    LegacyConfig cfg;
    const auto init = initial_state(history, zero, 100.0, cfg);
    // zero coupons: each surviving tranche repays its face
    std::vector<double> expected(120, 0.0);
    for (int m : kBondMaturities) {
        for (int age = 0; age < m; ++age) expected[static_cast<std::size_t>(m - age - 1)] += 15.0 / m;
    }
    EXPECT_NEAR(init.replayed_bond_value, 90.0, 1e-12);
    EXPECT_NEAR(init.legacy_scale, 65.0 / 90.0, 1e-15);
    for (std::size_t k = 0; k < 120; ++k) EXPECT_NEAR(init.state.bonds[k], expected[k] * 65.0 / 90.0, 1e-12);
    EXPECT_NEAR(init.state.cash, 25.0, 1e-12);
    EXPECT_NEAR(init.state.delta, 0.1, 1e-15);
}

TEST(LegacyReplay, BruteForceOnVaryingHistory) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 0.001);
    std::vector<YieldCurve> history;
    double level = 0.03;
    for (int k = 0; k < 130; ++k) {
        level += z(rng);
        YieldCurve c;
        for (int t = 1; t <= 120; ++t) c.yields.push_back(level + 0.01 * (1.0 - std::exp(-t / 30.0)));
        history.push_back(c);
    }
    const YieldCurve& anchor = history.back();
    LegacyConfig cfg;
    cfg.bond_fraction_tolerance = 1.0;  // keep the replay unscaled
    const auto init = initial_state(history, anchor, 100.0, cfg);

    // Month-by-month replay: for every issue date still relevant, buy each
    // series, then walk forward to the anchor dropping what has been paid.
    std::vector<double> ref(120, 0.0);
    const int last = static_cast<int>(history.size()) - 1;
    for (int m : kBondMaturities) {
        for (int age = 0; age < m; ++age) {
            const auto d = discount(history[static_cast<std::size_t>(last - age)]).factors;
            const double c = oracle::bisect([&](double x) { return oracle::bond_price(m, x, d) - 100.0; }, -0.5, 0.5);
            for (int month = 1; month <= m; ++month) {
                double flow = 0.0;
                if (m < 12) {
                    if (month == m) flow = 100.0 * (1.0 + c * m / 12.0);
                } else if (month % 6 == 0) {
                    flow = 50.0 * c + (month == m ? 100.0 : 0.0);
                }
                if (month > age) ref[static_cast<std::size_t>(month - age - 1)] += 0.15 / m * flow;
            }
        }
    }
    EXPECT_EQ(init.legacy_scale, 1.0);
    for (std::size_t k = 0; k < 120; ++k) EXPECT_NEAR(init.state.bonds[k], ref[k], 1e-10) << k;
    EXPECT_NEAR(init.replayed_bond_value,
                static_cast<double>(oracle::dot(ref, discount(anchor).factors)), 1e-10);
    EXPECT_NEAR(init.state.cash + init.replayed_bond_value + init.state.delta * 100.0, 100.0, 1e-12);
}

TEST(LegacyReplay, RejectsShortHistory) {
    const YieldCurve c{std::vector<double>(120, 0.02)};
    EXPECT_THROW(initial_state(std::vector<YieldCurve>(119, c), c, 100.0, LegacyConfig{}), std::invalid_argument);
    EXPECT_THROW(initial_state(std::vector<YieldCurve>(120, c), c, 0.0, LegacyConfig{}), std::invalid_argument);
}

TEST(LegacyReplay, DeskBalanceSheet) {
    const auto& desk = fixture::Desk::get();
    const auto& s = desk.ctx.setup.initial;
    const Market m = Market::make(desk.ctx.anchor, desk.cfg.equity_s0);
    const auto v = valuation(s, m, desk.ctx.setup.liabilities);
    EXPECT_NEAR(v.assets, 100.0, 1e-9);
    EXPECT_NEAR(v.stock, 10.0, 1e-12);
    EXPECT_NEAR(v.bonds, 65.0, 1e-9);
    EXPECT_NEAR(v.cash, 25.0, 1e-9);
    EXPECT_EQ(s.bonds.size(), 120u);
}

TEST(Accounting, IdentitiesAlongSimulatedPaths) {
    const auto& desk = fixture::Desk::get();
    const auto batch = desk.batch(100, 404);
    const auto& setup = desk.ctx.setup;
    const double delta0 = setup.initial.delta;
    const auto policy = init_policy(120, 5, 1.0);
    const std::array<Strategy, 2> strategies = {benchmark_strategy(delta0, 120), policy_strategy(policy)};
    for (const auto& strategy : strategies) {
        for (std::size_t i = 0; i < batch.count(); ++i) {
            const auto out = run_episode(setup, batch, i, strategy, 120, true);
            ASSERT_EQ(out.trace.size(), 120u);
            for (const auto& node : out.trace) {
                for (const Valuation* v : {&node.pre, &node.post}) {
                    EXPECT_EQ(v->assets, v->cash + v->bonds + v->stock);
                    EXPECT_EQ(v->net_worth, v->assets - v->liabilities);
                }
                const double expected = node.pre.assets - node.equity_trade_cost;
                EXPECT_NEAR(node.post.assets, expected, 1e-9 * std::max(1.0, std::fabs(expected)));
                EXPECT_GE(node.penalty, 0.0);
            }
            EXPECT_NEAR(out.liability_paid, 100.0, 1e-8);
        }
    }
}

TEST(Accounting, LiabilityRunoff) {
    const auto l = liability_schedule(1.5, 2.5, 120);
    CashFlowVector remaining = l.payments;
    double paid = 0.0;
    for (int t = 0; t < 120; ++t) {
        paid += liability_due(l, t);
        remaining = shift(remaining).remaining;
    }
    EXPECT_EQ(remaining, CashFlowVector(120));
    EXPECT_NEAR(paid, 100.0, 1e-9);
}
