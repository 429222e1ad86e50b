#ifndef DEEPALM_IO_HPP
#define DEEPALM_IO_HPP

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "deepalm/evaluation.hpp"
#include "deepalm/scenarios.hpp"
#include "deepalm/strategies.hpp"
#include "deepalm/training.hpp"

namespace deepalm {

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(path.string() + ": " + what) {}
};

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

inline bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '"' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

class BinaryWriter {
public:
    BinaryWriter(const std::filesystem::path& path, std::string_view magic, std::uint32_t version)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError(path, "cannot open for writing");
        write_magic(magic);
        put<std::uint32_t>(version);
    }

    template <class T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void put_doubles(std::span<const double> values) {
        put<std::uint64_t>(values.size());
        out_.write(reinterpret_cast<const char*>(values.data()),
                   static_cast<std::streamsize>(values.size() * sizeof(double)));
    }
    void finish() {
        out_.flush();
        if (!out_) throw IoError(path_, "write failed");
    }

private:
    void write_magic(std::string_view magic) {
        std::array<char, 8> m{};
        std::memcpy(m.data(), magic.data(), std::min<std::size_t>(magic.size(), m.size()));
        out_.write(m.data(), m.size());
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

class BinaryReader {
public:
    BinaryReader(const std::filesystem::path& path, std::string_view magic, std::uint32_t version)
        : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError(path, "cannot open for reading");
        std::array<char, 8> m{};
        std::array<char, 8> expected{};
        std::memcpy(expected.data(), magic.data(), std::min<std::size_t>(magic.size(), expected.size()));
        in_.read(m.data(), m.size());
        if (!in_ || m != expected) throw IoError(path, "unexpected file type");
        if (get<std::uint32_t>() != version) throw IoError(path, "unsupported format version");
    }

    template <class T>
    T get() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in_) throw IoError(path_, "truncated file");
        return v;
    }
    std::vector<double> get_doubles() {
        const auto n = get<std::uint64_t>();
        if (n > (std::uint64_t{1} << 36)) throw IoError(path_, "corrupt length field");
        std::vector<double> v(n);
        in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in_) throw IoError(path_, "truncated file");
        return v;
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
};

inline constexpr std::uint32_t kFormatVersion = 1;

// --- PCA model ---

inline void save_pca(const std::filesystem::path& path, const PcaModel& m) {
    BinaryWriter w(path, "DALMPCA", kFormatVersion);
    w.put<std::int32_t>(m.n_factors);
    w.put<std::int32_t>(m.trading_days_per_month);
    w.put_doubles({m.mu.data(), static_cast<std::size_t>(m.mu.size())});
    w.put_doubles({m.eigvals.data(), static_cast<std::size_t>(m.eigvals.size())});
    w.put_doubles({m.eigvecs.data(), static_cast<std::size_t>(m.eigvecs.size())});
    w.finish();
}

inline PcaModel load_pca(const std::filesystem::path& path) {
    BinaryReader r(path, "DALMPCA", kFormatVersion);
    PcaModel m;
    m.n_factors = r.get<std::int32_t>();
    m.trading_days_per_month = r.get<std::int32_t>();
    const auto mu = r.get_doubles();
    const auto vals = r.get_doubles();
    const auto vecs = r.get_doubles();
    const auto n = static_cast<Eigen::Index>(mu.size());
    if (static_cast<Eigen::Index>(vals.size()) != n || static_cast<Eigen::Index>(vecs.size()) != n * n) {
        throw IoError(path, "inconsistent PCA dimensions");
    }
    m.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
    m.eigvals = Eigen::Map<const Eigen::VectorXd>(vals.data(), n);
    m.eigvecs = Eigen::Map<const Eigen::MatrixXd>(vecs.data(), n, n);
    return m;
}

// --- scenario batches ---

inline void save_batch(const std::filesystem::path& path, const ScenarioBatch& b) {
    BinaryWriter w(path, "DALMSCN", kFormatVersion);
    w.put<std::uint64_t>(b.count());
    w.put<std::uint64_t>(b.steps());
    w.put<std::uint64_t>(b.curve_length());
    w.put<std::uint64_t>(b.seed());
    w.put_doubles(b.raw_curves());
    w.put_doubles(b.raw_equity());
    w.finish();
}

inline ScenarioBatch load_batch(const std::filesystem::path& path) {
    BinaryReader r(path, "DALMSCN", kFormatVersion);
    const auto count = r.get<std::uint64_t>();
    const auto steps = r.get<std::uint64_t>();
    const auto length = r.get<std::uint64_t>();
    const auto seed = r.get<std::uint64_t>();
    ScenarioBatch b(count, steps, length, seed);
    auto curves = r.get_doubles();
    auto equity = r.get_doubles();
    if (curves.size() != b.raw_curves().size() || equity.size() != b.raw_equity().size()) {
        throw IoError(path, "inconsistent scenario dimensions");
    }
    b.mutable_curves() = std::move(curves);
    b.mutable_equity() = std::move(equity);
    return b;
}

// One row per (scenario, t): spot followed by the curve.
inline void write_batch_csv(const std::filesystem::path& path, const ScenarioBatch& b) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "scenario,t,spot";
    for (std::size_t k = 1; k <= b.curve_length(); ++k) out << ",y" << k;
    out << '\n';
    for (std::size_t i = 0; i < b.count(); ++i) {
        for (std::size_t t = 0; t <= b.steps(); ++t) {
            out << i << ',' << t << ',' << format_double(b.equity(i, t));
            for (double y : b.curve(i, t)) out << ',' << format_double(y);
            out << '\n';
        }
    }
    if (!out) throw IoError(path, "write failed");
}

// --- policies and checkpoints ---

namespace detail {

inline void put_policy(BinaryWriter& w, const PolicyStack& p) {
    w.put<std::uint64_t>(p.steps());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(kLayers.size()));
    for (const auto& l : kLayers) {
        w.put<std::uint64_t>(l.inputs);
        w.put<std::uint64_t>(l.outputs);
    }
    w.put_doubles(p.flat());
}

inline PolicyStack get_policy(BinaryReader& r, const std::filesystem::path& path) {
    const auto steps = r.get<std::uint64_t>();
    if (r.get<std::uint32_t>() != kLayers.size()) throw IoError(path, "unexpected layer count");
    for (const auto& l : kLayers) {
        const auto in = r.get<std::uint64_t>();
        const auto out = r.get<std::uint64_t>();
        if (in != l.inputs || out != l.outputs) throw IoError(path, "unexpected layer shape");
    }
    PolicyStack p(steps);
    const auto values = r.get_doubles();
    if (values.size() != p.parameter_count()) throw IoError(path, "parameter count mismatch");
    std::copy(values.begin(), values.end(), p.flat().begin());
    return p;
}

}  // namespace detail

inline void save_policy(const std::filesystem::path& path, const PolicyStack& p) {
    BinaryWriter w(path, "DALMPOL", kFormatVersion);
    detail::put_policy(w, p);
    w.finish();
}

inline PolicyStack load_policy(const std::filesystem::path& path) {
    BinaryReader r(path, "DALMPOL", kFormatVersion);
    return detail::get_policy(r, path);
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    BinaryWriter w(path, "DALMCKP", kFormatVersion);
    w.put<std::uint64_t>(ck.epoch);
    w.put<std::uint64_t>(ck.best_epoch);
    w.put<double>(ck.best_validation_loss);
    w.put<double>(ck.initial_validation_loss);
    w.put<std::uint64_t>(ck.adam.step);
    w.put<std::uint64_t>(ck.history.size());
    for (const auto& e : ck.history) {
        w.put<std::uint64_t>(e.epoch);
        w.put<double>(e.train_loss);
        w.put<double>(e.validation_loss);
        w.put<double>(e.wall_seconds);
    }
    detail::put_policy(w, ck.current);
    detail::put_policy(w, ck.best);
    w.put_doubles(ck.adam.first);
    w.put_doubles(ck.adam.second);
    w.finish();
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    BinaryReader r(path, "DALMCKP", kFormatVersion);
    Checkpoint ck;
    ck.epoch = r.get<std::uint64_t>();
    ck.best_epoch = r.get<std::uint64_t>();
    ck.best_validation_loss = r.get<double>();
    ck.initial_validation_loss = r.get<double>();
    ck.adam.step = r.get<std::uint64_t>();
    const auto n = r.get<std::uint64_t>();
    if (n > 1'000'000) throw IoError(path, "corrupt history length");
    for (std::uint64_t i = 0; i < n; ++i) {
        EpochRecord e;
        e.epoch = r.get<std::uint64_t>();
        e.train_loss = r.get<double>();
        e.validation_loss = r.get<double>();
        e.wall_seconds = r.get<double>();
        ck.history.push_back(e);
    }
    ck.current = detail::get_policy(r, path);
    ck.best = detail::get_policy(r, path);
    ck.adam.first = r.get_doubles();
    ck.adam.second = r.get_doubles();
    return ck;
}

// --- reports ---

inline std::ofstream open_text(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    return out;
}

inline void close_text(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

// Deterministic columns only; wall time goes to the train report.
inline void write_loss_trace(const std::filesystem::path& path, const TrainReport& report) {
    auto out = open_text(path);
    out << "epoch,train_loss,validation_loss\n";
    out << "0,," << format_double(report.initial_validation_loss) << '\n';
    for (const auto& e : report.epochs) {
        out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.validation_loss) << '\n';
    }
    close_text(out, path);
}

inline void write_train_report(const std::filesystem::path& path, const TrainReport& report) {
    auto out = open_text(path);
    out << "epoch,train_loss,validation_loss,wall_seconds\n";
    for (const auto& e : report.epochs) {
        out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.validation_loss) << ','
            << format_double(e.wall_seconds) << '\n';
    }
    out << "# best_epoch=" << report.best_epoch << " best_validation_loss="
        << format_double(report.best_validation_loss) << " checksum=" << std::hex << report.parameter_checksum
        << std::dec << '\n';
    close_text(out, path);
}

inline void write_outcomes_csv(const std::filesystem::path& path, const std::vector<const StrategyOutcome*>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("write_outcomes_csv: nothing to write");
    const std::size_t n = outcomes.front()->terminal.size();
    auto out = open_text(path);
    out << "scenario";
    for (const auto* o : outcomes) {
        if (o->terminal.size() != n) throw std::invalid_argument("write_outcomes_csv: unequal batch sizes");
        out << ',' << o->name << "_terminal_equity," << o->name << "_liabilities_paid," << o->name << "_penalties";
    }
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << i;
        for (const auto* o : outcomes) {
            out << ',' << format_double(o->terminal[i]) << ',' << format_double(o->liability_paid[i]) << ','
                << format_double(o->penalties[i]);
        }
        out << '\n';
    }
    close_text(out, path);
}

inline const std::vector<std::string>& summary_rows() {
    static const std::vector<std::string> rows = {"mean",  "stddev", "q01", "q05", "q25", "q50",
                                                  "q75",   "q95",    "q99", "bankrupt_fraction",
                                                  "roe_annualized"};
    return rows;
}

inline const std::vector<std::string>& comparison_rows() {
    static const std::vector<std::string> rows = {"excess_roe", "paired_mean_difference", "paired_t_statistic",
                                                  "paired_p_value"};
    return rows;
}

inline std::vector<double> summary_values(const Summary& s) {
    std::vector<double> v = {s.mean, s.stddev};
    v.insert(v.end(), s.quantiles.begin(), s.quantiles.end());
    v.push_back(s.bankrupt_fraction);
    v.push_back(s.roe);
    return v;
}

inline void write_roe_header(std::ofstream& out, int horizon, double initial) {
    out << "# roe_annualized = (mean(E_T) / E_0)^(12/T) - 1 with T=" << horizon
        << " months, E_0=" << format_double(initial) << "; quantiles are nearest-rank\n";
}

inline void write_summary_csv(const std::filesystem::path& path, const StrategyOutcome& o, int horizon) {
    auto out = open_text(path);
    write_roe_header(out, horizon, o.initial_net_worth);
    out << "statistic," << o.name << '\n';
    const auto values = summary_values(o.summary);
    for (std::size_t r = 0; r < values.size(); ++r) out << summary_rows()[r] << ',' << format_double(values[r]) << '\n';
    close_text(out, path);
}

inline void write_comparison_csv(const std::filesystem::path& path, const Comparison& c, int horizon) {
    auto out = open_text(path);
    write_roe_header(out, horizon, c.first.initial_net_worth);
    out << "statistic," << c.first.name << ',' << c.second.name << ",difference\n";
    const auto a = summary_values(c.first.summary);
    const auto b = summary_values(c.second.summary);
    for (std::size_t r = 0; r < a.size(); ++r) {
        out << summary_rows()[r] << ',' << format_double(a[r]) << ',' << format_double(b[r]) << ','
            << format_double(a[r] - b[r]) << '\n';
    }
    const std::array<double, 4> extra = {c.excess_roe, c.test.mean_difference, c.test.t_statistic, c.test.p_value};
    for (std::size_t r = 0; r < extra.size(); ++r) {
        out << comparison_rows()[r] << ",,," << format_double(extra[r]) << '\n';
    }
    close_text(out, path);
}

inline void write_histogram_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                                const std::vector<Histogram>& hists) {
    auto out = open_text(path);
    out << "bin_lower,bin_upper";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    const Histogram& h0 = hists.front();
    for (std::size_t b = 0; b < h0.counts.size(); ++b) {
        const double lo = h0.lower + h0.width() * static_cast<double>(b);
        const double hi = b + 1 == h0.counts.size() ? h0.upper : lo + h0.width();
        out << format_double(lo) << ',' << format_double(hi);
        for (const auto& h : hists) out << ',' << h.counts[b];
        out << '\n';
    }
    close_text(out, path);
}

// Overlaid two-series bar chart; one <rect class="bar"> per bin and series.
inline std::string histogram_svg(const std::vector<std::string>& names, const std::vector<Histogram>& hists,
                                 const std::string& title) {
    static const std::array<const char*, 2> colors = {"#1f77b4", "#ff7f0e"};
    constexpr double width = 800, height = 480, margin = 50;
    std::size_t peak = 1;
    for (const auto& h : hists) {
        for (auto c : h.counts) peak = std::max(peak, c);
    }
    const std::size_t bins = hists.front().counts.size();
    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    const double bar_w = plot_w / static_cast<double>(bins);
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<title>" << title << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    for (std::size_t k = 0; k < hists.size(); ++k) {
        s << "<g class=\"series\" data-name=\"" << names[k] << "\" fill=\"" << colors[k % colors.size()]
          << "\" fill-opacity=\"0.55\">\n";
        for (std::size_t b = 0; b < bins; ++b) {
            const double h = plot_h * static_cast<double>(hists[k].counts[b]) / static_cast<double>(peak);
            s << "<rect class=\"bar\" x=\"" << margin + bar_w * static_cast<double>(b) << "\" y=\""
              << margin + plot_h - h << "\" width=\"" << bar_w << "\" height=\"" << h << "\" data-count=\""
              << hists[k].counts[b] << "\"/>\n";
        }
        s << "</g>\n";
        s << "<text x=\"" << margin + 10 << "\" y=\"" << margin + 18 * static_cast<double>(k + 1) << "\" fill=\""
          << colors[k % colors.size()] << "\" font-size=\"14\">" << names[k] << "</text>\n";
    }
    s << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << margin << "\" y=\"" << height - margin / 2 << "\" font-size=\"12\">"
      << format_double(hists.front().lower) << "</text>\n";
    s << "<text x=\"" << width - margin << "\" y=\"" << height - margin / 2
      << "\" font-size=\"12\" text-anchor=\"end\">" << format_double(hists.front().upper) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

inline std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace deepalm

#endif  // DEEPALM_IO_HPP
