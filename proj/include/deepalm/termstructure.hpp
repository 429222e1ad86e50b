#ifndef DEEPALM_TERMSTRUCTURE_HPP
#define DEEPALM_TERMSTRUCTURE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace deepalm {

// Raised when a discount curve makes a par coupon undefined.
class DegenerateCurveError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct SvenssonParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double tau1 = 1.0;
    double tau2 = 1.0;
};

// Annualized continuously-compounded yields; yields[T-1] is the yield for
// maturity T months.
struct YieldCurve {
    std::vector<double> yields;

    std::size_t size() const { return yields.size(); }
    double at_month(int months) const { return yields.at(static_cast<std::size_t>(months - 1)); }
    bool operator==(const YieldCurve&) const = default;
};

// factors[T-1] = exp(-(T/12) * Y^(T)).
struct DiscountCurve {
    std::vector<double> factors;

    std::size_t size() const { return factors.size(); }
    double at_month(int months) const { return factors.at(static_cast<std::size_t>(months - 1)); }
};

// flows[t-1] is paid at month offset t from now.
struct CashFlowVector {
    std::vector<double> flows;

    CashFlowVector() = default;
    explicit CashFlowVector(std::size_t n) : flows(n, 0.0) {}
    explicit CashFlowVector(std::vector<double> v) : flows(std::move(v)) {}

    std::size_t size() const { return flows.size(); }
    double& operator[](std::size_t i) { return flows[i]; }
    double operator[](std::size_t i) const { return flows[i]; }
    bool operator==(const CashFlowVector&) const = default;

    CashFlowVector& add_scaled(const CashFlowVector& other, double scale) {
        if (other.size() != size()) {
            throw std::invalid_argument("CashFlowVector::add_scaled: length mismatch");
        }
        for (std::size_t i = 0; i < flows.size(); ++i) {
            flows[i] += scale * other.flows[i];
        }
        return *this;
    }
};

inline constexpr std::array<int, 6> kBondMaturities = {1, 3, 6, 12, 60, 120};
inline constexpr double kFaceValue = 100.0;

struct BondSpec {
    int maturity_months = 1;

    // 1m, 3m and 6m pay once at redemption; 1y, 5y and 10y pay semi-annually.
    bool semi_annual() const { return maturity_months >= 12; }

    static BondSpec make(int maturity_months) {
        for (int m : kBondMaturities) {
            if (m == maturity_months) return BondSpec{m};
        }
        throw std::invalid_argument("BondSpec: maturity " + std::to_string(maturity_months) +
                                    " months is not an issued series");
    }
};

inline std::array<BondSpec, 6> all_bond_specs() {
    std::array<BondSpec, 6> specs{};
    for (std::size_t i = 0; i < specs.size(); ++i) specs[i] = BondSpec{kBondMaturities[i]};
    return specs;
}

// Svensson yield at a maturity given in years.
inline double svensson_yield(const SvenssonParams& p, double years) {
    const double x1 = years / p.tau1;
    const double x2 = years / p.tau2;
    const double e1 = std::exp(-x1);
    const double e2 = std::exp(-x2);
    const double slope1 = -std::expm1(-x1) / x1;
    const double slope2 = -std::expm1(-x2) / x2;
    return p.beta0 + p.beta1 * slope1 + p.beta2 * (slope1 - e1) + p.beta3 * (slope2 - e2);
}

inline YieldCurve svensson_to_curve(const SvenssonParams& params, std::size_t n) {
    if (!(params.tau1 > 0.0) || !(params.tau2 > 0.0)) {
        throw std::invalid_argument("svensson_to_curve: tau1 and tau2 must be positive");
    }
    if (n == 0) throw std::invalid_argument("svensson_to_curve: N must be at least 1");
    YieldCurve curve;
    curve.yields.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        curve.yields[t] = svensson_yield(params, static_cast<double>(t + 1) / 12.0);
    }
    return curve;
}

inline void discount_into(std::span<const double> yields, std::span<double> factors) {
    for (std::size_t t = 0; t < yields.size(); ++t) {
        factors[t] = std::exp(-static_cast<double>(t + 1) / 12.0 * yields[t]);
    }
}

inline DiscountCurve discount(const YieldCurve& curve) {
    for (double y : curve.yields) {
        if (!std::isfinite(y)) throw std::invalid_argument("discount: non-finite yield");
    }
    DiscountCurve d;
    d.factors.resize(curve.size());
    discount_into(curve.yields, d.factors);
    return d;
}

inline double value(std::span<const double> flows, std::span<const double> factors) {
    if (flows.size() != factors.size()) {
        throw std::invalid_argument("value: cash-flow and discount lengths differ (" +
                                    std::to_string(flows.size()) + " vs " +
                                    std::to_string(factors.size()) + ")");
    }
    return std::inner_product(flows.begin(), flows.end(), factors.begin(), 0.0);
}

inline double value(const CashFlowVector& cashflows, const DiscountCurve& discounts) {
    return value(std::span<const double>(cashflows.flows), std::span<const double>(discounts.factors));
}

inline double par_coupon(std::span<const double> factors, BondSpec spec) {
    const int m = spec.maturity_months;
    if (static_cast<std::size_t>(m) > factors.size()) {
        throw std::invalid_argument("par_coupon: curve shorter than bond maturity");
    }
    const double d_m = factors[static_cast<std::size_t>(m - 1)];
    if (!spec.semi_annual()) {
        if (!(d_m > 0.0) || !std::isfinite(d_m)) {
            throw DegenerateCurveError("par_coupon: non-positive discount factor at redemption");
        }
        return (1.0 / d_m - 1.0) * (12.0 / static_cast<double>(m));
    }
    double annuity = 0.0;
    for (int k = 6; k <= m; k += 6) annuity += factors[static_cast<std::size_t>(k - 1)];
    if (!(annuity > 0.0) || !std::isfinite(annuity)) {
        throw DegenerateCurveError("par_coupon: vanishing coupon annuity");
    }
    return 2.0 * (1.0 - d_m) / annuity;
}

inline double par_coupon(const DiscountCurve& discounts, BondSpec spec) {
    return par_coupon(std::span<const double>(discounts.factors), spec);
}

// Calls emit(offset_months, amount) for every nonzero payment of one
// face-100 bond.
template <class Emit>
void for_each_payment(BondSpec spec, double coupon, Emit&& emit) {
    const int m = spec.maturity_months;
    if (!spec.semi_annual()) {
        emit(m, (1.0 + coupon * static_cast<double>(m) / 12.0) * kFaceValue);
        return;
    }
    const double coupon_amount = coupon / 2.0 * kFaceValue;
    for (int k = 6; k < m; k += 6) emit(k, coupon_amount);
    emit(m, kFaceValue + coupon_amount);
}

inline CashFlowVector issue_bond(BondSpec spec, double coupon, std::size_t n) {
    if (!std::isfinite(coupon)) throw std::invalid_argument("issue_bond: non-finite coupon");
    if (static_cast<std::size_t>(spec.maturity_months) > n) {
        throw std::invalid_argument("issue_bond: maturity exceeds cash-flow horizon");
    }
    CashFlowVector b(n);
    for_each_payment(spec, coupon, [&](int offset, double amount) {
        b.flows.at(static_cast<std::size_t>(offset - 1)) += amount;
    });
    return b;
}

struct ShiftResult {
    double paid_now = 0.0;
    CashFlowVector remaining;
};

// Pays the first component and applies the nilpotent left shift.
inline ShiftResult shift(const CashFlowVector& cashflows) {
    ShiftResult r;
    r.remaining = CashFlowVector(cashflows.size());
    if (cashflows.size() == 0) return r;
    r.paid_now = cashflows[0];
    for (std::size_t i = 1; i < cashflows.size(); ++i) r.remaining[i - 1] = cashflows[i];
    return r;
}

}  // namespace deepalm

#endif  // DEEPALM_TERMSTRUCTURE_HPP
