// Shared scenario builders for the test suites.
#ifndef DEEPALM_TESTS_FIXTURES_HPP
#define DEEPALM_TESTS_FIXTURES_HPP

#include <cmath>
#include <filesystem>
#include <string>

#include "deepalm/config.hpp"
#include "deepalm/ecb.hpp"
#include "deepalm/scenarios.hpp"

#ifndef DEEPALM_DATA_DIR
#define DEEPALM_DATA_DIR "data"
#endif

namespace fixture {

inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(DEEPALM_DATA_DIR) / name; }

inline std::filesystem::path synthetic_ecb() { return data_file("ecb_svensson_synthetic.csv"); }

// Deterministic scenarios: flat curve at `rate` and equity growing at
// `equity_drift` per year with no noise.
inline deepalm::ScenarioBatch flat_batch(double rate, std::size_t steps, std::size_t n, double equity_drift = 0.05,
                                         std::size_t count = 1, std::uint64_t seed = 0) {
    deepalm::ScenarioBatch b(count, steps, n, seed);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t t = 0; t <= steps; ++t) {
            for (double& y : b.curve(i, t)) y = rate;
            b.equity(i, t) = 100.0 * std::exp(equity_drift * static_cast<double>(t) / 12.0);
        }
    }
    return b;
}

// Data and derived ingredients of the desk-scale problem on the bundled
// synthetic history; built once per process.
struct Desk {
    deepalm::RunConfig cfg;
    std::vector<deepalm::EcbParamRow> rows;
    deepalm::RunContext ctx;
    deepalm::PcaModel model;

    static const Desk& get() {
        static const Desk desk = [] {
            Desk d;
            d.rows = deepalm::parse_ecb_csv(synthetic_ecb());
            d.ctx = deepalm::build_context(d.rows, d.cfg);
            d.model = deepalm::calibrate_from_rows(d.rows, d.cfg);
            return d;
        }();
        return desk;
    }

    deepalm::ScenarioBatch batch(std::size_t count, std::uint64_t seed, unsigned workers = 1) const {
        return deepalm::generate_batch(ctx.anchor, model, cfg.equity(), static_cast<std::size_t>(cfg.steps), count,
                                       seed, workers);
    }
};

}  // namespace fixture

#endif  // DEEPALM_TESTS_FIXTURES_HPP
