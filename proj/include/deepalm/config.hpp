#ifndef DEEPALM_CONFIG_HPP
#define DEEPALM_CONFIG_HPP

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "deepalm/balance_sheet.hpp"
#include "deepalm/ecb.hpp"
#include "deepalm/episode.hpp"
#include "deepalm/scenarios.hpp"
#include "deepalm/training.hpp"

namespace deepalm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every constant of the pipeline. Defaults reproduce the stylised runoff case.
struct RunConfig {
    // grid and data
    int steps = 120;
    int n_factors = 3;
    int trading_days_per_month = 22;
    std::string anchor_date = "2007-12-31";
    int history_years = 8;
    std::string beta_units = "auto";
    // liabilities
    double liability_a = 1.5;
    double liability_b = 2.5;
    double liability_face = 100.0;
    // equity market
    double equity_s0 = 100.0;
    double equity_drift = 0.05;
    double equity_volatility = 0.18;
    // frictions
    double kappa = 0.005;
    double penalty_rate = 0.24;
    double liquidity_floor = 0.10;
    // legacy balance sheet
    double total_assets = 100.0;
    double equity_fraction = 0.10;
    double legacy_face_per_series = 15.0;
    double bond_target_fraction = 2.0 / 3.0;
    double bond_fraction_tolerance = 0.10;
    double bond_fallback_value = 65.0;
    // objective
    std::string objective = "iso_elastic";
    double gamma = 1.0;
    double epsilon = 1e-4;
    double target_return = 0.02;
    int horizon = 120;
    // optimizer
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t epochs = 10;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double clip_norm = 10.0;
    double init_gain = 0.1;
    std::uint64_t init_seed = 7;
    // scenarios
    std::uint64_t train_seed = 1;
    std::uint64_t validation_seed = 2;
    std::size_t train_scenarios = 10000;
    std::size_t validation_scenarios = 10000;
    // reporting and execution
    std::size_t histogram_bins = 50;
    std::string output_dir = "runs";
    unsigned workers = 1;

    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw ConfigError(std::string("config: ") + what);
        };
        require(steps >= 1, "steps must be at least 1");
        require(n_factors >= 0 && n_factors <= steps, "n_factors must lie in [0, steps]");
        require(trading_days_per_month >= 1, "trading_days_per_month must be positive");
        Date d{};
        require(parse_iso_date(anchor_date, d), "anchor_date must be an ISO-8601 date");
        require(history_years >= 1, "history_years must be positive");
        parse_beta_units(beta_units);
        require(liability_a > 0 && liability_b > 0, "liability shapes must be positive");
        require(liability_face > 0, "liability_face must be positive");
        require(equity_s0 > 0 && equity_volatility >= 0, "equity parameters invalid");
        require(kappa >= 0 && penalty_rate >= 0 && liquidity_floor >= 0, "frictions must be nonnegative");
        require(total_assets > 0 && equity_fraction >= 0, "legacy balance sheet invalid");
        require(objective == "iso_elastic" || objective == "quadratic", "objective must be iso_elastic or quadratic");
        require(horizon >= 1 && horizon <= steps, "horizon must lie in [1, steps]");
        require(train_seed != validation_seed, "training and validation seeds must differ");
        require(train_scenarios >= 1 && validation_scenarios >= 1, "scenario counts must be positive");
        require(histogram_bins >= 1, "histogram_bins must be positive");
        require(workers >= 1, "workers must be at least 1");
        objective_spec().validate();
        optimizer().validate();
    }

    LegacyConfig legacy() const {
        return LegacyConfig{legacy_face_per_series, total_assets,      equity_fraction,
                            bond_target_fraction,   bond_fraction_tolerance, bond_fallback_value};
    }
    FrictionParams frictions() const { return FrictionParams{kappa, penalty_rate, liquidity_floor}; }
    EquityParams equity() const { return EquityParams{equity_s0, equity_drift, equity_volatility}; }
    ObjectiveSpec objective_spec() const {
        ObjectiveSpec o;
        o.kind = objective == "quadratic" ? ObjectiveKind::quadratic : ObjectiveKind::iso_elastic;
        o.gamma = gamma;
        o.epsilon = epsilon;
        o.target_return = target_return;
        o.horizon = horizon;
        return o;
    }
    OptimizerConfig optimizer() const {
        OptimizerConfig c;
        c.learning_rate = learning_rate;
        c.batch_size = batch_size;
        c.epochs = epochs;
        c.beta1 = adam_beta1;
        c.beta2 = adam_beta2;
        c.adam_epsilon = adam_epsilon;
        c.clip_norm = clip_norm;
        c.seed = train_seed;
        c.workers = workers;
        return c;
    }
    Date anchor() const {
        Date d{};
        if (!parse_iso_date(anchor_date, d)) throw ConfigError("anchor_date must be an ISO-8601 date");
        return d;
    }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    RunConfig, steps, n_factors, trading_days_per_month, anchor_date, history_years, beta_units, liability_a,
    liability_b, liability_face, equity_s0, equity_drift, equity_volatility, kappa, penalty_rate, liquidity_floor,
    total_assets, equity_fraction, legacy_face_per_series, bond_target_fraction, bond_fraction_tolerance,
    bond_fallback_value, objective, gamma, epsilon, target_return, horizon, learning_rate, batch_size, epochs,
    adam_beta1, adam_beta2, adam_epsilon, clip_norm, init_gain, init_seed, train_seed, validation_seed,
    train_scenarios, validation_scenarios, histogram_bins, output_dir, workers)

// Applies "key=value"; the value is read as JSON when it parses, else as a string.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    if (!j.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    j[key] = value;
}

inline RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
    nlohmann::json j = RunConfig{};
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        const nlohmann::json file = nlohmann::json::parse(in, nullptr, false, true);
        if (file.is_discarded() || !file.is_object()) throw ConfigError("config file " + path.string() + " is not a JSON object");
        for (const auto& [key, value] : file.items()) {
            if (!j.contains(key)) throw ConfigError("unknown config key '" + key + "' in " + path.string());
            j[key] = value;
        }
    }
    for (const auto& o : overrides) apply_override(j, o);
    RunConfig cfg;
    try {
        cfg = j.get<RunConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// 64-bit FNV-1a of the canonical JSON, ignoring where outputs go and how
// many workers run.
inline std::string config_hash(const RunConfig& cfg) {
    nlohmann::json j = cfg;
    j.erase("output_dir");
    j.erase("workers");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::filesystem::path run_directory(const RunConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) / ("run-" + config_hash(cfg));
}

// The fixed ingredients derived from data and configuration.
struct RunContext {
    YieldCurve anchor;
    EpisodeSetup setup;
    InitialState legacy;
};

inline RunContext build_context(const std::vector<EcbParamRow>& rows, const RunConfig& cfg) {
    RunContext ctx;
    const auto n = static_cast<std::size_t>(cfg.steps);
    const Date anchor = cfg.anchor();
    ctx.anchor = svensson_to_curve(rows[last_on_or_before(rows, anchor)].params, n);
    const auto history = monthly_curves(rows, anchor, kBondMaturities.back(), n);
    ctx.legacy = initial_state(history, ctx.anchor, cfg.equity_s0, cfg.legacy());
    ctx.setup.initial = ctx.legacy.state;
    ctx.setup.liabilities = liability_schedule(cfg.liability_a, cfg.liability_b, n, cfg.liability_face);
    ctx.setup.frictions = cfg.frictions();
    return ctx;
}

inline PcaModel calibrate_from_rows(const std::vector<EcbParamRow>& rows, const RunConfig& cfg) {
    const auto curves = daily_curves(rows, cfg.anchor(), cfg.history_years, static_cast<std::size_t>(cfg.steps));
    return calibrate_pca(curves, cfg.n_factors, cfg.trading_days_per_month);
}

}  // namespace deepalm

#endif  // DEEPALM_CONFIG_HPP
