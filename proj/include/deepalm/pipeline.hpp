// The command-line stages as library calls. Every artifact lives under the
// run directory named by the configuration hash.
#ifndef DEEPALM_PIPELINE_HPP
#define DEEPALM_PIPELINE_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepalm/config.hpp"
#include "deepalm/ecb.hpp"
#include "deepalm/evaluation.hpp"
#include "deepalm/io.hpp"
#include "deepalm/training.hpp"

namespace deepalm {

class MissingArtifact : public std::runtime_error {
public:
    MissingArtifact(const std::filesystem::path& path, const std::string& stage)
        : std::runtime_error(path.string() + " not found; run '" + stage + "' first") {}
};

struct RunPaths {
    std::filesystem::path dir;

    std::filesystem::path config() const { return dir / "config.json"; }
    std::filesystem::path params() const { return dir / "params.csv"; }
    std::filesystem::path pca() const { return dir / "pca.bin"; }
    std::filesystem::path calibration() const { return dir / "calibration.csv"; }
    std::filesystem::path training_batch() const { return dir / "scenarios_train.bin"; }
    std::filesystem::path validation_batch() const { return dir / "scenarios_validation.bin"; }
    std::filesystem::path checkpoint() const { return dir / "checkpoint.bin"; }
    std::filesystem::path policy() const { return dir / "policy.bin"; }
    std::filesystem::path loss_trace() const { return dir / "loss_trace.csv"; }
    std::filesystem::path train_report() const { return dir / "train_report.csv"; }
};

inline RunPaths prepare_run(const RunConfig& cfg) {
    RunPaths p{run_directory(cfg)};
    std::filesystem::create_directories(p.dir);
    nlohmann::json j = cfg;
    auto out = open_text(p.config());
    out << j.dump(2) << '\n';
    close_text(out, p.config());
    return p;
}

inline void require_artifact(const std::filesystem::path& path, const std::string& stage) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path, stage);
}

inline std::vector<EcbParamRow> load_params(const RunPaths& p) {
    require_artifact(p.params(), "ingest");
    // the store is already decimal
    return parse_ecb_csv(p.params(), BetaUnits::decimal);
}

// --- ingest ---

inline std::size_t run_ingest(const RunConfig& cfg, const std::filesystem::path& input, std::ostream& log) {
    const auto p = prepare_run(cfg);
    const auto rows = parse_ecb_csv(input, parse_beta_units(cfg.beta_units));
    write_param_store(p.params(), rows);
    log << "ingest: " << rows.size() << " rows " << format_date(rows.front().date) << " .. "
        << format_date(rows.back().date) << " -> " << p.params().string() << '\n';
    return rows.size();
}

// --- calibrate ---

inline void run_calibrate(const RunConfig& cfg, std::ostream& log) {
    const auto p = prepare_run(cfg);
    const auto rows = load_params(p);
    const PcaModel model = calibrate_from_rows(rows, cfg);
    save_pca(p.pca(), model);
    const RunContext ctx = build_context(rows, cfg);
    const auto discounts = discount(ctx.anchor);
    const double l0 = liability_value(ctx.setup.liabilities, 0, discounts.factors);

    auto out = open_text(p.calibration());
    out << "quantity,value\n";
    out << "liability_value," << format_double(l0) << '\n';
    out << "legacy_scale," << format_double(ctx.legacy.legacy_scale) << '\n';
    out << "legacy_bond_value," << format_double(ctx.legacy.replayed_bond_value) << '\n';
    out << "initial_cash," << format_double(ctx.setup.initial.cash) << '\n';
    out << "initial_equity_units," << format_double(ctx.setup.initial.delta) << '\n';
    for (int k = 0; k < model.n_factors; ++k) {
        out << "eigenvalue_" << k + 1 << ',' << format_double(model.eigvals[k]) << '\n';
    }
    close_text(out, p.calibration());
    log << "calibrate: " << model.n_factors << " factors, L0 = " << l0 << " -> " << p.pca().string() << '\n';
}

// --- simulate ---

inline void run_simulate(const RunConfig& cfg, bool dump_csv, std::ostream& log) {
    const auto p = prepare_run(cfg);
    require_artifact(p.pca(), "calibrate");
    const PcaModel model = load_pca(p.pca());
    const RunContext ctx = build_context(load_params(p), cfg);
    const auto steps = static_cast<std::size_t>(cfg.steps);
    const auto training =
        generate_batch(ctx.anchor, model, cfg.equity(), steps, cfg.train_scenarios, cfg.train_seed, cfg.workers);
    const auto validation = generate_batch(ctx.anchor, model, cfg.equity(), steps, cfg.validation_scenarios,
                                           cfg.validation_seed, cfg.workers);
    save_batch(p.training_batch(), training);
    save_batch(p.validation_batch(), validation);
    if (dump_csv) {
        write_batch_csv(p.dir / "scenarios_train.csv", training);
        write_batch_csv(p.dir / "scenarios_validation.csv", validation);
    }
    log << "simulate: " << training.count() << " training and " << validation.count()
        << " validation scenarios -> " << p.dir.string() << '\n';
}

inline ScenarioBatch load_checked_batch(const std::filesystem::path& path, const RunConfig& cfg, std::uint64_t seed,
                                        std::size_t count) {
    require_artifact(path, "simulate");
    auto b = load_batch(path);
    if (b.seed() != seed || b.count() != count || b.steps() != static_cast<std::size_t>(cfg.steps)) {
        throw IoError(path, "does not match the configuration; rerun 'simulate'");
    }
    return b;
}

// --- train ---

inline TrainResult run_train(const RunConfig& cfg, bool resume, std::ostream& log) {
    const auto p = prepare_run(cfg);
    const RunContext ctx = build_context(load_params(p), cfg);
    const auto training = load_checked_batch(p.training_batch(), cfg, cfg.train_seed, cfg.train_scenarios);
    const auto validation =
        load_checked_batch(p.validation_batch(), cfg, cfg.validation_seed, cfg.validation_scenarios);
    const ObjectiveSpec obj = cfg.objective_spec();
    const OptimizerConfig opt = cfg.optimizer();

    Checkpoint start;
    if (resume && std::filesystem::exists(p.checkpoint())) {
        start = load_checkpoint(p.checkpoint());
        log << "train: resuming after epoch " << start.epoch << '\n';
    } else {
        const auto initial = init_policy(static_cast<std::size_t>(cfg.steps), cfg.init_seed, cfg.init_gain);
        start = start_checkpoint(initial, validation, ctx.setup, obj, cfg.workers);
    }
    auto on_epoch = [&](const Checkpoint& ck) {
        save_checkpoint(p.checkpoint(), ck);
        const auto& e = ck.history.back();
        log << "train: epoch " << e.epoch << "/" << opt.epochs << " train " << e.train_loss << " validation "
            << e.validation_loss << " (" << e.wall_seconds << " s)\n";
    };
    try {
        TrainResult r = train(start, training, validation, ctx.setup, obj, opt, on_epoch);
        save_checkpoint(p.checkpoint(), r.checkpoint);
        save_policy(p.policy(), r.policy);
        write_loss_trace(p.loss_trace(), r.report);
        write_train_report(p.train_report(), r.report);
        log << "train: best epoch " << r.report.best_epoch << ", validation loss " << r.report.best_validation_loss
            << " -> " << p.policy().string() << '\n';
        return r;
    } catch (const TrainingDiverged& e) {
        write_loss_trace(p.loss_trace(), e.report());
        write_train_report(p.train_report(), e.report());
        throw;
    }
}

// --- evaluate and compare ---

inline Strategy named_strategy(const std::string& name, const RunPaths& p, const RunConfig& cfg,
                               const RunContext& ctx) {
    if (name == "benchmark") return benchmark_strategy(ctx.setup.initial.delta, cfg.steps, cfg.liquidity_floor);
    if (name == "policy") {
        require_artifact(p.policy(), "train");
        return policy_strategy(load_policy(p.policy()));
    }
    throw std::invalid_argument("unknown strategy '" + name + "' (policy|benchmark)");
}

inline void write_histograms(const RunPaths& p, const std::string& stem, const std::vector<const StrategyOutcome*>& o,
                             std::size_t bins) {
    std::vector<double> all;
    for (const auto* s : o) all.insert(all.end(), s->terminal.begin(), s->terminal.end());
    const auto [lo, hi] = std::minmax_element(all.begin(), all.end());
    std::vector<std::string> names;
    std::vector<Histogram> hists;
    for (const auto* s : o) {
        names.push_back(s->name);
        hists.push_back(histogram(s->terminal, bins, *lo, *hi));
    }
    write_histogram_csv(p.dir / (stem + "_histogram.csv"), names, hists);
    const auto svg_path = p.dir / (stem + "_histogram.svg");
    auto out = open_text(svg_path);
    out << histogram_svg(names, hists, "Terminal equity");
    close_text(out, svg_path);
}

// Returns false when some path produced a non-finite value.
inline bool run_evaluate(const RunConfig& cfg, const std::string& strategy, std::ostream& log) {
    const auto p = prepare_run(cfg);
    const RunContext ctx = build_context(load_params(p), cfg);
    const auto batch = load_checked_batch(p.validation_batch(), cfg, cfg.validation_seed, cfg.validation_scenarios);
    const auto o = evaluate(strategy, named_strategy(strategy, p, cfg, ctx), batch, ctx.setup, cfg.horizon,
                            cfg.workers);
    write_outcomes_csv(p.dir / "evaluation_outcomes.csv", {&o});
    write_summary_csv(p.dir / "evaluation_summary.csv", o, cfg.horizon);
    if (o.all_finite) write_histograms(p, "evaluation", {&o}, cfg.histogram_bins);
    log << "evaluate: " << strategy << " mean terminal equity " << o.summary.mean << ", RoE " << o.summary.roe
        << " -> " << p.dir.string() << '\n';
    return o.all_finite;
}

inline bool run_compare(const RunConfig& cfg, const std::string& first, const std::string& second,
                        std::ostream& log) {
    const auto p = prepare_run(cfg);
    const RunContext ctx = build_context(load_params(p), cfg);
    const auto batch = load_checked_batch(p.validation_batch(), cfg, cfg.validation_seed, cfg.validation_scenarios);
    // distinct column names even when a strategy faces itself
    const std::string a_name = first == second ? first + "_1" : first;
    const std::string b_name = first == second ? second + "_2" : second;
    const auto a = evaluate(a_name, named_strategy(first, p, cfg, ctx), batch, ctx.setup, cfg.horizon, cfg.workers);
    const auto b = evaluate(b_name, named_strategy(second, p, cfg, ctx), batch, ctx.setup, cfg.horizon, cfg.workers);
    const Comparison c = compare(a, b);
    write_outcomes_csv(p.dir / "comparison_outcomes.csv", {&a, &b});
    write_comparison_csv(p.dir / "comparison.csv", c, cfg.horizon);
    const bool finite = a.all_finite && b.all_finite;
    if (finite) write_histograms(p, "comparison", {&a, &b}, cfg.histogram_bins);
    log << "compare: " << a_name << " vs " << b_name << " excess RoE " << c.excess_roe << ", paired p "
        << c.test.p_value << " -> " << p.dir.string() << '\n';
    return finite;
}

// ingest through compare in one go.
inline bool run_pipeline(const RunConfig& cfg, const std::filesystem::path& input, std::ostream& log) {
    run_ingest(cfg, input, log);
    run_calibrate(cfg, log);
    run_simulate(cfg, false, log);
    run_train(cfg, false, log);
    const bool evaluated = run_evaluate(cfg, "policy", log);
    const bool compared = run_compare(cfg, "policy", "benchmark", log);
    return evaluated && compared;
}

}  // namespace deepalm

#endif  // DEEPALM_PIPELINE_HPP
