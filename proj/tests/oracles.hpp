// Independent reference computations used only by the test suites. Nothing
// here calls into the code paths it is used to check.
#ifndef DEEPALM_TESTS_ORACLES_HPP
#define DEEPALM_TESTS_ORACLES_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

// Svensson yield in long double, written from the textbook form.
inline long double svensson(long double b0, long double b1, long double b2, long double b3, long double t1,
                            long double t2, long double years) {
    const long double a = years / t1;
    const long double b = years / t2;
    const long double f1 = (1.0L - std::exp(-a)) / a;
    const long double f2 = f1 - std::exp(-a);
    const long double f3 = (1.0L - std::exp(-b)) / b - std::exp(-b);
    return b0 + b1 * f1 + b2 * f2 + b3 * f3;
}

inline long double dot(const std::vector<double>& x, const std::vector<double>& y) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * static_cast<long double>(y[i]);
    return s;
}

// Beta(a, b) CDF by adaptive quadrature of the density.
inline double beta_cdf_quadrature(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    auto density = [&](double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return std::exp(log_norm + (a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u));
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(density, 0.0, x, 1e-15);
}

// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Price of a face-100 bond with coupon c under discount factors d (index
// = month - 1), built directly from the coupon schedule.
inline double bond_price(int maturity, double c, const std::vector<double>& d) {
    if (maturity < 12) return 100.0 * (1.0 + c * maturity / 12.0) * d[static_cast<std::size_t>(maturity - 1)];
    double p = 0.0;
    for (int m = 6; m <= maturity; m += 6) p += 50.0 * c * d[static_cast<std::size_t>(m - 1)];
    return p + 100.0 * d[static_cast<std::size_t>(maturity - 1)];
}

// Spreadsheet-style ledger for a single-scenario episode where the only
// tradable bond is the 1m series. Inputs per decision date t: the 1m units
// h[t] and equity units e[t]. Curves are flat at `rate` and the equity
// price path is given. Returns terminal net worth at the last date.
struct LedgerInput {
    int steps = 2;
    double rate = 0.03;
    std::vector<double> spot;         // t = 0..steps
    std::vector<double> liabilities;  // due in months 1..steps
    double cash0 = 100.0;
    double delta0 = 0.0;
    double kappa = 0.005;
    double penalty_rate = 0.24;
    double floor = 0.10;
};

struct LedgerRow {
    double cash_pre, bonds_pre, stock_pre, assets_pre, liab_pre, net_pre;
    double cash_post, assets_post, penalty;
};

inline std::vector<LedgerRow> ledger(const LedgerInput& in, const std::vector<double>& h, const std::vector<double>& e,
                                     double& terminal) {
    const int n = in.steps;
    std::vector<double> disc(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) disc[static_cast<std::size_t>(m - 1)] = std::exp(-in.rate * m / 12.0);
    const double coupon = (1.0 / disc[0] - 1.0) * 12.0;
    std::vector<double> maturing(static_cast<std::size_t>(n + 1), 0.0);  // bond money arriving at month t
    double cash = in.cash0, delta = in.delta0;
    std::vector<LedgerRow> rows;
    for (int t = 0; t <= n; ++t) {
        LedgerRow r{};
        r.cash_pre = cash;
        r.bonds_pre = (t < n) ? maturing[static_cast<std::size_t>(t + 1)] * disc[0] : 0.0;
        r.stock_pre = delta * in.spot[static_cast<std::size_t>(t)];
        r.assets_pre = r.cash_pre + r.bonds_pre + r.stock_pre;
        double lv = 0.0;
        for (int m = 1; t + m <= n; ++m) lv += disc[static_cast<std::size_t>(m - 1)] * in.liabilities[static_cast<std::size_t>(t + m - 1)];
        r.liab_pre = lv;
        r.net_pre = r.assets_pre - lv;
        if (t == n) {
            rows.push_back(r);
            terminal = r.net_pre;
            break;
        }
        const double s = in.spot[static_cast<std::size_t>(t)];
        const double trade = e[static_cast<std::size_t>(t)] - delta;
        r.cash_post = cash - 100.0 * h[static_cast<std::size_t>(t)] - (trade + in.kappa * std::fabs(trade)) * s;
        maturing[static_cast<std::size_t>(t + 1)] += 100.0 * (1.0 + coupon / 12.0) * h[static_cast<std::size_t>(t)];
        r.assets_post = r.cash_post + r.bonds_pre + 100.0 * h[static_cast<std::size_t>(t)] + e[static_cast<std::size_t>(t)] * s;
        r.penalty = in.penalty_rate / 12.0 * std::max(in.floor * r.assets_post - r.cash_post, 0.0);
        rows.push_back(r);
        cash = r.cash_post + maturing[static_cast<std::size_t>(t + 1)] - in.liabilities[static_cast<std::size_t>(t)] - r.penalty;
        delta = e[static_cast<std::size_t>(t)];
    }
    return rows;
}

}  // namespace oracle

#endif  // DEEPALM_TESTS_ORACLES_HPP
