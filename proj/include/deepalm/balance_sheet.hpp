#ifndef DEEPALM_BALANCE_SHEET_HPP
#define DEEPALM_BALANCE_SHEET_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepalm/termstructure.hpp"

namespace deepalm {

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("beta_cdf: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double beta_cdf(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta_cdf: shapes must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("beta_cdf: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_continued_fraction(x, a, b) / a;
    }
    return 1.0 - front * detail::beta_continued_fraction(1.0 - x, b, a) / b;
}

struct LiabilitySchedule {
    CashFlowVector payments;  // payments[t-1] due in month t

    std::size_t size() const { return payments.size(); }
};

inline LiabilitySchedule liability_schedule(double a, double b, std::size_t n, double face = 100.0) {
    if (n == 0) throw std::invalid_argument("liability_schedule: N must be at least 1");
    LiabilitySchedule s{CashFlowVector(n)};
    double prev = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        const double x = t == n ? 1.0 : static_cast<double>(t) / static_cast<double>(n);
        const double f = beta_cdf(x, a, b);
        s.payments[t - 1] = (f - prev) * face;
        prev = f;
    }
    return s;
}

// Due at the roll from t to t+1: first component of U^t L.
inline double liability_due(const LiabilitySchedule& l, int t) {
    const auto i = static_cast<std::size_t>(t);
    return i < l.size() ? l.payments[i] : 0.0;
}

// <D_t, U^t L>
inline double liability_value(const LiabilitySchedule& l, int t, std::span<const double> factors) {
    double v = 0.0;
    const auto shift = static_cast<std::size_t>(t);
    for (std::size_t k = 0; k + shift < l.size() && k < factors.size(); ++k) {
        v += factors[k] * l.payments[k + shift];
    }
    return v;
}

struct FrictionParams {
    double kappa = 0.005;          // proportional equity transaction cost
    double penalty_rate = 0.24;    // per annum, on the shortfall below the floor
    double liquidity_floor = 0.10; // cash as a fraction of assets
};

// Market quotes at one time instance.
struct Market {
    YieldCurve curve;
    DiscountCurve discounts;
    double spot = 0.0;

    static Market make(YieldCurve curve, double spot) {
        Market m;
        m.discounts = discount(curve);
        m.curve = std::move(curve);
        m.spot = spot;
        return m;
    }
};

struct BalanceSheetState {
    int t = 0;
    double cash = 0.0;
    CashFlowVector bonds;  // aggregated future bond cash-flows
    double delta = 0.0;    // equity units
};

// Derived balance-sheet values at a time instance.
struct Valuation {
    double cash = 0.0;         // C
    double bonds = 0.0;        // V
    double stock = 0.0;        // G
    double assets = 0.0;       // A = C + V + G
    double liabilities = 0.0;  // <D_t, U^t L>
    double net_worth = 0.0;    // E = A - Lval
};

inline Valuation valuation(const BalanceSheetState& s, const Market& m, const LiabilitySchedule& l) {
    Valuation v;
    v.cash = s.cash;
    v.bonds = value(s.bonds, m.discounts);
    v.stock = s.delta * m.spot;
    v.assets = v.cash + v.bonds + v.stock;
    v.liabilities = liability_value(l, s.t, m.discounts.factors);
    v.net_worth = v.assets - v.liabilities;
    return v;
}

struct Action {
    std::array<double, 6> holdings{};  // units of face-100 bonds, in kBondMaturities order
    double delta_post = 0.0;
};

inline double equity_trade_cost(double delta_pre, double delta_post, double spot, double kappa) {
    const double d = delta_post - delta_pre;
    return (d + kappa * std::fabs(d)) * spot;
}

// Newly issued par bonds at the current curve, one per series with maturity
// within the horizon. Entries for longer series stay empty.
struct IssuedBonds {
    std::array<CashFlowVector, 6> flows;
    std::array<bool, 6> available{};
};

inline IssuedBonds issue_par_bonds(const DiscountCurve& discounts, std::size_t horizon) {
    IssuedBonds out;
    const auto specs = all_bond_specs();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (static_cast<std::size_t>(specs[i].maturity_months) > std::min(horizon, discounts.size())) continue;
        out.available[i] = true;
        out.flows[i] = issue_bond(specs[i], par_coupon(discounts, specs[i]), horizon);
    }
    return out;
}

inline BalanceSheetState restructure(const BalanceSheetState& pre, const Action& action,
                                     const Market& market, const FrictionParams& fr) {
    for (double h : action.holdings) {
        if (!(h >= 0.0)) throw std::invalid_argument("restructure: negative bond holding");
    }
    if (!(action.delta_post >= 0.0)) throw std::invalid_argument("restructure: negative equity holding");
    BalanceSheetState post = pre;
    const IssuedBonds issued = issue_par_bonds(market.discounts, pre.bonds.size());
    double purchases = 0.0;
    for (std::size_t i = 0; i < issued.flows.size(); ++i) {
        const double h = action.holdings[i];
        if (h == 0.0) continue;
        if (!issued.available[i]) {
            throw std::invalid_argument("restructure: bond series beyond the cash-flow horizon");
        }
        purchases += kFaceValue * h;
        post.bonds.add_scaled(issued.flows[i], h);
    }
    post.cash = pre.cash - purchases -
                equity_trade_cost(pre.delta, action.delta_post, market.spot, fr.kappa);
    post.delta = action.delta_post;
    return post;
}

inline double liquidity_penalty(double assets_post, double cash_post, const FrictionParams& fr) {
    return fr.penalty_rate / 12.0 * std::max(fr.liquidity_floor * assets_post - cash_post, 0.0);
}

struct RollResult {
    BalanceSheetState next;
    double bond_inflow = 0.0;
    double liability_outflow = 0.0;
    double penalty = 0.0;
};

// `now` is the market the post-restructuring state was valued at.
inline RollResult roll_forward(const BalanceSheetState& post, const Market& now,
                               const LiabilitySchedule& l, const FrictionParams& fr) {
    RollResult r;
    const double assets_post = post.cash + value(post.bonds, now.discounts) + post.delta * now.spot;
    r.penalty = liquidity_penalty(assets_post, post.cash, fr);
    ShiftResult shifted = shift(post.bonds);
    r.bond_inflow = shifted.paid_now;
    r.liability_outflow = liability_due(l, post.t);
    r.next.t = post.t + 1;
    r.next.cash = post.cash + r.bond_inflow - r.liability_outflow - r.penalty;
    r.next.bonds = std::move(shifted.remaining);
    r.next.delta = post.delta;
    return r;
}

struct LegacyConfig {
    double face_per_series = 15.0;       // face bought per month in series i is this / i
    double total_assets = 100.0;
    double equity_fraction = 0.10;
    double bond_target_fraction = 2.0 / 3.0;
    double bond_fraction_tolerance = 0.10;
    double bond_fallback_value = 65.0;
};

struct InitialState {
    BalanceSheetState state;
    double legacy_scale = 1.0;  // factor applied to the replayed face amounts
    double replayed_bond_value = 0.0;
};

// monthly_history holds the issuance curves, oldest first, the last entry
// being the anchor date. Tranches issued 0..i-1 months before the anchor are
// still alive for series i.
inline InitialState initial_state(const std::vector<YieldCurve>& monthly_history,
                                  const YieldCurve& anchor, double spot, const LegacyConfig& cfg) {
    const std::size_t n = anchor.size();
    const int longest = kBondMaturities.back();
    if (monthly_history.size() < static_cast<std::size_t>(longest)) {
        throw std::invalid_argument("initial_state: legacy history needs " + std::to_string(longest) +
                                    " monthly curves, got " + std::to_string(monthly_history.size()));
    }
    if (n < static_cast<std::size_t>(longest)) {
        throw std::invalid_argument("initial_state: curves shorter than the longest bond series");
    }
    if (!(spot > 0.0)) throw std::invalid_argument("initial_state: spot must be positive");

    CashFlowVector bonds(n);
    const std::size_t last = monthly_history.size() - 1;
    for (BondSpec spec : all_bond_specs()) {
        const int m = spec.maturity_months;
        const double units = cfg.face_per_series / m / kFaceValue;
        for (int age = 0; age < m; ++age) {
            const YieldCurve& issue_curve = monthly_history[last - static_cast<std::size_t>(age)];
            if (issue_curve.size() != n) throw std::invalid_argument("initial_state: history curve length");
            const double c = par_coupon(discount(issue_curve), spec);
            for_each_payment(spec, c, [&](int offset, double amount) {
                const int remaining = offset - age;
                if (remaining >= 1) bonds[static_cast<std::size_t>(remaining - 1)] += units * amount;
            });
        }
    }

    InitialState out;
    const DiscountCurve d0 = discount(anchor);
    out.replayed_bond_value = value(bonds, d0);
    double bond_value = out.replayed_bond_value;
    const double fraction = bond_value / cfg.total_assets;
    if (std::fabs(fraction - cfg.bond_target_fraction) > cfg.bond_fraction_tolerance) {
        out.legacy_scale = cfg.bond_fallback_value / bond_value;
        for (double& f : bonds.flows) f *= out.legacy_scale;
        bond_value = value(bonds, d0);
    }
    const double stock = cfg.equity_fraction * cfg.total_assets;
    out.state.t = 0;
    out.state.bonds = std::move(bonds);
    out.state.delta = stock / spot;
    out.state.cash = cfg.total_assets - bond_value - out.state.delta * spot;
    return out;
}

}  // namespace deepalm

#endif  // DEEPALM_BALANCE_SHEET_HPP
