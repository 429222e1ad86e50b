#include "CLI11.hpp"

#include <iostream>
#include <string>
#include <vector>

#include "deepalm/pipeline.hpp"

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, non_finite = 3 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep asset-liability management: calibration, simulation, training and evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("-s,--set", overrides, "Override a configuration key, key=value (repeatable)");

    std::string input;
    auto* ingest = app.add_subcommand("ingest", "Parse a Svensson parameter CSV into the run's parameter store");
    ingest->add_option("-i,--input", input, "Parameter CSV")->required()->check(CLI::ExistingFile);

    app.add_subcommand("calibrate", "Fit the principal-component curve model");

    bool dump_csv = false;
    auto* simulate = app.add_subcommand("simulate", "Generate training and validation scenario batches");
    simulate->add_flag("--csv", dump_csv, "Also write the batches as CSV");

    bool resume = false;
    auto* train = app.add_subcommand("train", "Train the policy networks");
    train->add_flag("--resume", resume, "Continue from the run's checkpoint");

    std::string strategy = "policy";
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate one strategy on the validation batch");
    evaluate->add_option("--strategy", strategy, "policy or benchmark")
        ->check(CLI::IsMember({"policy", "benchmark"}))
        ->capture_default_str();

    std::string first = "policy", second = "benchmark";
    auto* compare = app.add_subcommand("compare", "Paired comparison of two strategies on the validation batch");
    compare->add_option("--first", first, "policy or benchmark")
        ->check(CLI::IsMember({"policy", "benchmark"}))
        ->capture_default_str();
    compare->add_option("--second", second, "policy or benchmark")
        ->check(CLI::IsMember({"policy", "benchmark"}))
        ->capture_default_str();

    auto* all = app.add_subcommand("run", "ingest, calibrate, simulate, train, evaluate and compare");
    all->add_option("-i,--input", input, "Parameter CSV")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = deepalm::load_config(config_path, overrides);
        std::ostream& log = std::cerr;
        bool finite = true;
        if (*ingest) deepalm::run_ingest(cfg, input, log);
        else if (app.got_subcommand("calibrate")) deepalm::run_calibrate(cfg, log);
        else if (*simulate) deepalm::run_simulate(cfg, dump_csv, log);
        else if (*train) deepalm::run_train(cfg, resume, log);
        else if (*evaluate) finite = deepalm::run_evaluate(cfg, strategy, log);
        else if (*compare) finite = deepalm::run_compare(cfg, first, second, log);
        else if (*all) finite = deepalm::run_pipeline(cfg, input, log);
        std::cout << deepalm::run_directory(cfg).string() << '\n';
        if (!finite) {
            std::cerr << "error: non-finite values on some scenario paths\n";
            return non_finite;
        }
        return ok;
    } catch (const deepalm::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
