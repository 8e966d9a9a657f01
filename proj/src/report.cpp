#include "draftbench/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "text_util.hpp"

namespace draftbench {

using json = nlohmann::ordered_json;
using detail::format_fixed;

NormalizedSeries minmax_normalize(std::string metric, std::span<const StrategyValue> values, bool invert) {
    if (values.empty()) throw ReportError("cannot normalize an empty series '" + metric + "'");
    NormalizedSeries series;
    series.metric = std::move(metric);
    series.inverted = invert;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end(),
                                        [](const StrategyValue& a, const StrategyValue& b) { return a.second < b.second; });
    const double min = lo->second;
    const double range = hi->second - min;
    series.degenerate = range == 0.0;
    for (const auto& [strategy, v] : values) {
        double scaled = series.degenerate ? 5.0 : (v - min) / range * 10.0;
        if (invert && !series.degenerate) scaled = 10.0 - scaled;
        series.values.emplace_back(strategy, scaled);
    }
    return series;
}

double normalized_efficiency(double variant_metric, double cot_metric) {
    if (!(cot_metric > 0.0)) throw ReportError("normalization baseline must be positive");
    return variant_metric / cot_metric * 100.0;
}

StrategyQuality average_quality(std::span<const QualityReport> reports) {
    if (reports.empty()) throw ReportError("no quality reports to average");
    StrategyQuality q;
    q.strategy = reports.front().strategy;
    q.n = reports.size();
    auto mean = [&](auto&& get) {
        std::vector<double> v;
        v.reserve(reports.size());
        for (const auto& r : reports) {
            if (r.strategy != q.strategy) throw ReportError("quality reports mix strategies");
            v.push_back(get(r));
        }
        return summarize(v).mean;
    };
    for (Dimension d : kAllDimensions) q.dimensions[d] = mean([d](const QualityReport& r) { return r.dimensions[d]; });
    q.overall = mean([](const QualityReport& r) { return r.overall; });
    return q;
}

namespace {

template <typename T>
const T* find_row(const std::vector<T>& rows, StrategyId id) {
    auto it = std::find_if(rows.begin(), rows.end(), [id](const T& r) { return r.strategy == id; });
    return it == rows.end() ? nullptr : &*it;
}

using Table = std::vector<std::vector<std::string>>;

std::string to_csv(const Table& table) {
    std::string out;
    for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            const std::string& cell = row[i];
            if (cell.find_first_of(",\"\n") != std::string::npos) {
                out += '"';
                for (char c : cell) {
                    if (c == '"') out += '"';
                    out += c;
                }
                out += '"';
            } else {
                out += cell;
            }
        }
        out += '\n';
    }
    return out;
}

std::string to_text(const std::string& title, const Table& table) {
    std::vector<std::size_t> width(table.front().size(), 0);
    for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::string out = title + "\n";
    auto rule = [&] {
        for (std::size_t i = 0; i < width.size(); ++i) out += (i ? "-+-" : "") + std::string(width[i], '-');
        out += '\n';
    };
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t i = 0; i < table[r].size(); ++i) {
            const std::string& cell = table[r][i];
            std::string pad(width[i] - cell.size(), ' ');
            out += i ? " | " : "";
            out += i == 0 ? cell + pad : pad + cell;
        }
        out += '\n';
        if (r == 0) rule();
    }
    return out;
}

// The formatted table shows display names in the first column.
Table with_display_names(Table table) {
    for (std::size_t r = 1; r < table.size(); ++r) {
        if (auto id = parse_strategy(table[r][0])) table[r][0] = std::string(strategy_display_name(*id));
    }
    table[0][0] = "Strategy";
    return table;
}

std::string pct(double v) { return format_fixed(v, 1); }

}  // namespace

ReportBundle build_reports(const ReportInputs& in) {
    if (in.strategies.empty()) throw ReportError("run declares no strategies");
    ReportBundle bundle;
    const std::string base = std::string(strategy_name(in.baseline));

    for (StrategyId id : in.strategies) {
        if (!find_row(in.efficiency, id) && !find_row(in.approximated, id)) {
            throw ReportError("missing efficiency row for strategy '" + std::string(strategy_name(id)) + "'");
        }
    }

    const EfficiencyStats* baseline = find_row(in.efficiency, in.baseline);
    const bool declared_baseline =
        std::find(in.strategies.begin(), in.strategies.end(), in.baseline) != in.strategies.end();
    if (!declared_baseline || !baseline) {
        bundle.warnings.push_back("baseline '" + base +
                                  "' has no provider-reported efficiency row; comparative columns omitted");
        baseline = nullptr;
    }
    const bool has_approx = !in.approximated.empty();

    // Efficiency table.
    Table eff;
    std::vector<std::string> header = {"strategy", "n", "avg_tokens", "median_tokens", "avg_latency_s",
                                       "median_latency_s"};
    if (baseline) {
        header.push_back("token_pct_vs_" + base);
        header.push_back("latency_pct_vs_" + base);
    }
    header.push_back("tokens_right_skewed");
    if (has_approx) {
        header.push_back("approx_n");
        header.push_back("approx_avg_tokens");
    }
    eff.push_back(header);
    for (StrategyId id : in.strategies) {
        std::vector<std::string> row = {std::string(strategy_name(id))};
        const EfficiencyStats* s = find_row(in.efficiency, id);
        if (s) {
            row.insert(row.end(), {std::to_string(s->n), format_fixed(s->avg_tokens, 1),
                                   format_fixed(s->median_tokens, 1), format_fixed(s->avg_latency_s, 2),
                                   format_fixed(s->median_latency_s, 2)});
            if (baseline) {
                row.push_back(pct(normalized_efficiency(s->avg_tokens, baseline->avg_tokens)));
                row.push_back(pct(normalized_efficiency(s->avg_latency_s, baseline->avg_latency_s)));
            }
            row.push_back(s->tokens_right_skewed ? "yes" : "no");
        } else {
            row.insert(row.end(), {"0", "NA", "NA", "NA", "NA"});
            if (baseline) row.insert(row.end(), {"NA", "NA"});
            row.push_back("NA");
        }
        if (has_approx) {
            const EfficiencyStats* a = find_row(in.approximated, id);
            row.push_back(a ? std::to_string(a->n) : "0");
            row.push_back(a ? format_fixed(a->avg_tokens, 1) : "NA");
        }
        eff.push_back(std::move(row));
    }
    bundle.efficiency_csv = to_csv(eff);
    bundle.formatted = to_text("Efficiency", with_display_names(eff));

    // Quality and combined tables.
    const bool has_quality = !in.quality.empty();
    if (has_quality) {
        Table qt;
        std::vector<std::string> qh = {"strategy", "n"};
        for (Dimension d : kAllDimensions) qh.emplace_back(dimension_name(d));
        qh.emplace_back("overall");
        qt.push_back(qh);
        for (StrategyId id : in.strategies) {
            std::vector<std::string> row = {std::string(strategy_name(id))};
            if (const StrategyQuality* q = find_row(in.quality, id)) {
                row.push_back(std::to_string(q->n));
                for (Dimension d : kAllDimensions) row.push_back(format_fixed(q->dimensions[d], 1));
                row.push_back(format_fixed(q->overall, 1));
            } else {
                row.push_back("0");
                for (std::size_t i = 0; i < kAllDimensions.size() + 1; ++i) row.push_back("NA");
            }
            qt.push_back(std::move(row));
        }
        bundle.quality_csv = to_csv(qt);
        bundle.formatted += "\n" + to_text("Quality", with_display_names(qt));

        const StrategyQuality* base_q = find_row(in.quality, in.baseline);
        if (baseline && base_q && base_q->overall > 0.0) {
            Table ct;
            ct.push_back({"strategy", "token_savings_pct", "quality_score", "quality_retention_pct",
                          "quality_efficiency_index"});
            for (StrategyId id : in.strategies) {
                const EfficiencyStats* s = find_row(in.efficiency, id);
                const StrategyQuality* q = find_row(in.quality, id);
                std::vector<std::string> row = {std::string(strategy_name(id))};
                std::optional<double> savings;
                if (s) savings = token_savings(s->avg_tokens, baseline->avg_tokens);
                row.push_back(savings ? pct(*savings) : "NA");
                row.push_back(q ? format_fixed(q->overall, 1) : "NA");
                std::optional<double> retention;
                if (q) retention = quality_retention(q->overall, base_q->overall);
                row.push_back(retention ? pct(*retention) : "NA");
                row.push_back(savings && retention ? format_fixed(quality_efficiency_index(*savings, *retention), 1)
                                                   : "NA");
                ct.push_back(std::move(row));
            }
            bundle.combined_csv = to_csv(ct);
            bundle.formatted += "\n" + to_text("Quality-efficiency", with_display_names(ct));
        } else {
            bundle.warnings.push_back("baseline '" + base + "' lacks quality or efficiency data; combined table omitted");
        }
    } else {
        bundle.warnings.push_back("no quality reports; quality and combined tables omitted");
    }

    // Radar data: one line per normalized series.
    auto radar_line = [](const NormalizedSeries& s, std::span<const StrategyValue> raw) {
        json line;
        line["metric"] = s.metric;
        line["inverted"] = s.inverted;
        line["degenerate"] = s.degenerate;
        json values = json::object();
        for (const auto& [id, v] : s.values) values[std::string(strategy_name(id))] = v;
        line["values"] = values;
        json raws = json::object();
        for (const auto& [id, v] : raw) raws[std::string(strategy_name(id))] = v;
        line["raw"] = raws;
        return line.dump() + "\n";
    };
    if (has_quality) {
        for (Dimension d : kAllDimensions) {
            std::vector<StrategyValue> raw;
            for (StrategyId id : in.strategies) {
                if (const StrategyQuality* q = find_row(in.quality, id)) raw.emplace_back(id, q->dimensions[d]);
            }
            if (!raw.empty()) {
                bundle.radar_jsonl += radar_line(minmax_normalize(std::string(dimension_name(d)), raw, false), raw);
            }
        }
    }
    {
        std::vector<StrategyValue> tokens, latency;
        for (StrategyId id : in.strategies) {
            if (const EfficiencyStats* s = find_row(in.efficiency, id)) {
                tokens.emplace_back(id, s->avg_tokens);
                latency.emplace_back(id, s->avg_latency_s);
            }
        }
        if (!tokens.empty()) {
            bundle.radar_jsonl += radar_line(minmax_normalize("avg_tokens", tokens, true), tokens);
            bundle.radar_jsonl += radar_line(minmax_normalize("avg_latency_s", latency, true), latency);
        }
    }

    json manifest;
    manifest["config_hash"] = in.manifest.config_hash;
    manifest["corpus_hash"] = in.manifest.corpus_hash;
    manifest["seed"] = in.manifest.seed;
    manifest["phase"] = in.manifest.phase;
    manifest["started_at"] = in.manifest.started_at;
    manifest["finished_at"] = in.manifest.finished_at;
    manifest["task_count"] = in.manifest.task_count;
    manifest["record_count"] = in.manifest.record_count;
    manifest["baseline"] = base;
    json strategies = json::array();
    for (StrategyId id : in.strategies) strategies.push_back(std::string(strategy_name(id)));
    manifest["strategies"] = strategies;
    manifest["quality_included"] = has_quality;
    json files = json::array({"efficiency.csv"});
    if (bundle.quality_csv) files.push_back("quality.csv");
    if (bundle.combined_csv) files.push_back("combined.csv");
    files.push_back("radar.json-lines");
    files.push_back("tables.txt");
    manifest["files"] = files;
    manifest["warnings"] = bundle.warnings;
    bundle.manifest = manifest.dump(2) + "\n";
    return bundle;
}

ReportBundle emit_reports(const ReportInputs& inputs, const std::filesystem::path& report_dir) {
    namespace fs = std::filesystem;
    ReportBundle bundle = build_reports(inputs);
    std::error_code ec;
    fs::create_directories(report_dir, ec);
    if (ec) throw ReportError("cannot create " + report_dir.string() + ": " + ec.message());
    detail::write_file_atomic(report_dir / "efficiency.csv", bundle.efficiency_csv);
    auto write_or_remove = [&](const char* name, const std::optional<std::string>& content) {
        if (content) {
            detail::write_file_atomic(report_dir / name, *content);
        } else {
            fs::remove(report_dir / name, ec);
        }
    };
    write_or_remove("quality.csv", bundle.quality_csv);
    write_or_remove("combined.csv", bundle.combined_csv);
    detail::write_file_atomic(report_dir / "radar.json-lines", bundle.radar_jsonl);
    detail::write_file_atomic(report_dir / "tables.txt", bundle.formatted);
    detail::write_file_atomic(report_dir / "manifest", bundle.manifest);
    return bundle;
}

}  // namespace draftbench
