#include "hetero/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>

#include "hetero/error.hpp"
#include "text_util.hpp"

namespace hetero {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

double number_or_throw(std::string_view text, std::string_view what) {
    const auto value = detail::parse_double(text);
    if (!value || !std::isfinite(*value)) {
        throw ValidationError(std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    return *value;
}

std::size_t count_or_throw(std::string_view text, std::string_view what) {
    const double value = number_or_throw(text, what);
    if (value < 1 || value != std::floor(value)) {
        throw ValidationError(std::string(what) + ": expected a positive integer");
    }
    return static_cast<std::size_t>(value);
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += detail::format_double(values[i]);
    }
    return out;
}

nlohmann::ordered_json optional_number(const std::optional<double>& value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

std::optional<double> read_optional(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<double>();
}

}  // namespace

std::string_view to_string(IntervalMethod method) {
    return method == IntervalMethod::mean_std ? "mean_std" : "min_max";
}

IntervalMethod interval_method_from_string(std::string_view text) {
    if (text == "mean_std") return IntervalMethod::mean_std;
    if (text == "min_max") return IntervalMethod::min_max;
    throw ValidationError("unknown interval method '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Ideal spec text

IdealSpec parse_ideal_spec(std::string_view text) {
    const auto colon = text.find(':');
    const auto kind = text.substr(0, colon);
    std::map<std::string, std::string, std::less<>> params;
    if (colon != std::string_view::npos) {
        for (auto item : split(text.substr(colon + 1), ';')) {
            const auto eq = item.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw ValidationError("ideal spec '" + std::string(text) + "': expected key=value, got '" +
                                      std::string(item) + "'");
            }
            params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        }
    }
    const auto reject_unknown = [&](std::initializer_list<std::string_view> allowed) {
        for (const auto& [key, value] : params) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw ValidationError("ideal spec '" + std::string(text) + "': unknown parameter '" + key + "'");
            }
        }
    };

    if (kind == "clustered") {
        reject_unknown({"k"});
        if (!params.contains("k")) throw ValidationError("clustered ideal needs k");
        return ClusteredIdeal{count_or_throw(params.at("k"), "clustered k")};
    }
    if (kind == "uniform") {
        reject_unknown({"k", "assign"});
        if (!params.contains("k")) throw ValidationError("uniform ideal needs k");
        UniformIdeal spec{count_or_throw(params.at("k"), "uniform k"), {}};
        if (params.contains("assign")) {
            for (auto item : split(params.at("assign"), ',')) {
                const auto sep = item.rfind(':');
                if (sep == std::string_view::npos) throw ValidationError("uniform assign: expected LABEL:BIN");
                const double bin = number_or_throw(item.substr(sep + 1), "uniform assign bin");
                if (bin < 0 || bin != std::floor(bin)) throw ValidationError("uniform assign: bin must be >= 0");
                spec.assignment_override[std::string(item.substr(0, sep))] = static_cast<std::size_t>(bin);
            }
        }
        return spec;
    }
    if (kind == "desired") {
        reject_unknown({"preset", "breaks", "rules", "file"});
        const auto sources = params.count("preset") + params.count("breaks") + params.count("file");
        if (sources != 1) throw ValidationError("desired ideal needs exactly one of preset=, breaks=, file=");
        if (params.contains("preset")) {
            if (params.contains("rules")) throw ValidationError("desired preset does not take rules=");
            return DesiredIdeal{preset(params.at("preset"))};
        }
        if (params.contains("file")) {
            std::ifstream in(params.at("file"));
            if (!in) throw ValidationError("cannot open '" + params.at("file") + "'");
            nlohmann::json doc;
            try {
                in >> doc;
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError("'" + params.at("file") + "': " + e.what());
            }
            return DesiredIdeal{desired_spec_from_json(doc)};
        }
        DesiredSpec spec;
        for (auto item : split(params.at("breaks"), ',')) spec.breakpoints.push_back(number_or_throw(item, "breakpoint"));
        if (params.contains("rules")) {
            for (auto item : split(params.at("rules"), ',')) {
                spec.boundary_rule.push_back(boundary_rule_from_string(std::string(item)));
            }
        } else {
            spec.boundary_rule.assign(spec.breakpoints.size(), BoundaryRule::lower_inclusive);
        }
        spec.validate();
        return DesiredIdeal{spec};
    }
    throw ValidationError("unknown ideal kind '" + std::string(kind) + "'");
}

std::string describe(const IdealSpec& spec) {
    return std::visit(
        overloaded{
            [](const ClusteredIdeal& c) { return "clustered:k=" + std::to_string(c.k); },
            [](const UniformIdeal& u) {
                std::string out = "uniform:k=" + std::to_string(u.k);
                if (!u.assignment_override.empty()) {
                    out += ";assign=";
                    bool first = true;
                    for (const auto& [label, bin] : u.assignment_override) {
                        if (!first) out += ',';
                        first = false;
                        out += label + ":" + std::to_string(bin);
                    }
                }
                return out;
            },
            [](const DesiredIdeal& d) {
                if (d.spec.preset_name) {
                    try {
                        if (preset(*d.spec.preset_name) == d.spec) return "desired:preset=" + *d.spec.preset_name;
                    } catch (const ValidationError&) {
                    }
                }
                std::string out = "desired:breaks=" + join_numbers(d.spec.breakpoints) + ";rules=";
                for (std::size_t i = 0; i < d.spec.boundary_rule.size(); ++i) {
                    if (i) out += ',';
                    out += d.spec.boundary_rule[i] == BoundaryRule::lower_inclusive ? "lower" : "upper";
                }
                return out;
            },
        },
        spec);
}

std::string_view kind_of(const IdealSpec& spec) {
    static constexpr std::string_view names[] = {"clustered", "uniform", "desired"};
    return names[spec.index()];
}

IdealSystem build_ideal(std::span<const UniversityStats> stats, const IdealSpec& spec) {
    return std::visit(overloaded{
                          [&](const ClusteredIdeal& c) { return clustered_system(stats, c.k); },
                          [&](const UniformIdeal& u) { return uniform_system(stats, u.k, u.assignment_override); },
                          [&](const DesiredIdeal& d) { return desired_system(stats, d.spec); },
                      },
                      spec);
}

// ---------------------------------------------------------------------------
// Pipeline

std::vector<LabeledInterval> real_intervals(std::span<const UniversityStats> stats, IntervalMethod method) {
    std::vector<LabeledInterval> out;
    out.reserve(stats.size());
    for (const auto& s : stats) {
        if (method == IntervalMethod::mean_std) {
            out.push_back({s.label, interval_mean_std(s)});
        } else {
            if (!s.scores) throw ValidationError("min_max intervals need raw scores for '" + s.label + "'");
            out.push_back({s.label, interval_min_max(*s.scores)});
        }
    }
    return out;
}

IntervalOrder real_order(std::span<const UniversityStats> stats, IntervalMethod method) {
    return build_interval_order(real_intervals(stats, method));
}

ReportSection analyze_stats(std::span<const UniversityStats> stats, std::span<const IdealSpec> specs,
                            IntervalMethod method, std::optional<double> floor, std::string form) {
    if (stats.size() < 2) {
        throw ValidationError("analysis of '" + form + "' needs at least 2 universities, got " +
                              std::to_string(stats.size()));
    }
    ReportSection section;
    section.form = std::move(form);
    section.n_universities = stats.size();
    const auto real = real_order(stats, method);

    std::vector<UniversityStats> reduced;
    std::optional<IntervalOrder> reduced_real;
    if (floor) {
        reduced = exclude_below(stats, *floor);
        if (reduced.size() < 2) {
            throw ValidationError("exclusion floor " + detail::format_double(*floor) + " leaves fewer than 2 universities");
        }
        reduced_real = real_order(reduced, method);
    }

    for (const auto& spec : specs) {
        const auto ideal = build_ideal(stats, spec);
        IdealResult result;
        result.spec = describe(spec);
        result.kind = std::string(kind_of(spec));
        result.hamming = hamming(real, ideal.order);
        result.groups = ideal.groups;
        if (floor && std::holds_alternative<DesiredIdeal>(spec)) {
            const auto reduced_ideal = desired_ideal(reduced, std::get<DesiredIdeal>(spec).spec);
            result.exclusion = ExclusionOutcome{*floor, stats.size() - reduced.size(), reduced.size(),
                                                hamming(*reduced_real, reduced_ideal)};
        }
        section.per_ideal.push_back(std::move(result));
    }
    return section;
}

namespace {

std::vector<std::pair<std::string, std::vector<UniversityStats>>> sections_of(const Dataset& dataset,
                                                                              bool split_by_form,
                                                                              bool drop_missing) {
    auto stats = aggregate(dataset, split_by_form, drop_missing).stats;
    std::vector<std::pair<std::string, std::vector<UniversityStats>>> out;
    if (!split_by_form) {
        out.emplace_back("all", std::move(stats));
        return out;
    }
    for (auto form : {Form::state_funded, Form::tuition_based}) {
        std::vector<UniversityStats> part;
        for (const auto& s : stats)
            if (s.form == to_string(form)) part.push_back(s);
        if (!part.empty()) out.emplace_back(std::string(to_string(form)), std::move(part));
    }
    return out;
}

}  // namespace

HeterogeneityReport analyze(const Dataset& dataset, std::span<const IdealSpec> specs, const AnalyzeOptions& options) {
    HeterogeneityReport report;
    report.group_label = dataset.group_label;
    report.interval_method = options.interval_method;
    report.split_by_form = options.split_by_form;
    for (auto& [form, stats] : sections_of(dataset, options.split_by_form, options.drop_missing)) {
        report.sections.push_back(analyze_stats(stats, specs, options.interval_method, options.floor, form));
    }
    if (report.sections.empty()) throw ValidationError("dataset has no universities to analyze");
    return report;
}

std::vector<WhatifRow> whatif_exclusion(std::span<const UniversityStats> stats, const DesiredSpec& spec,
                                        std::vector<double> floors, IntervalMethod method, const std::string& form) {
    spec.validate();
    std::sort(floors.begin(), floors.end());
    std::vector<WhatifRow> rows;
    for (double floor : floors) {
        if (std::isnan(floor)) throw ValidationError("what-if floor must be a number");
        std::vector<UniversityStats> kept;
        for (const auto& s : stats)
            if (s.mean >= floor) kept.push_back(s);
        WhatifRow row;
        row.form = form;
        row.floor = floor;
        row.n_removed = stats.size() - kept.size();
        row.n_remaining = kept.size();
        row.feasible = kept.size() >= 2;
        if (row.feasible) row.hamming = hamming(real_order(kept, method), desired_ideal(kept, spec));
        rows.push_back(row);
    }
    return rows;
}

std::vector<WhatifRow> whatif_exclusion(const Dataset& dataset, const DesiredSpec& spec, std::vector<double> floors,
                                        const AnalyzeOptions& options) {
    std::vector<WhatifRow> rows;
    for (auto& [form, stats] : sections_of(dataset, options.split_by_form, options.drop_missing)) {
        auto part = whatif_exclusion(stats, spec, floors, options.interval_method, form);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Output

nlohmann::ordered_json to_json(const HeterogeneityReport& report) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["group_label"] = report.group_label;
    doc["interval_method"] = std::string(to_string(report.interval_method));
    doc["split_by_form"] = report.split_by_form;
    doc["sections"] = json::array();
    for (const auto& section : report.sections) {
        json s;
        s["form"] = section.form;
        s["n_universities"] = section.n_universities;
        s["ideals"] = json::array();
        for (const auto& ideal : section.per_ideal) {
            json i;
            i["spec"] = ideal.spec;
            i["kind"] = ideal.kind;
            i["hamming"] = ideal.hamming;
            i["groups"] = json::array();
            for (const auto& g : ideal.groups) {
                json row;
                row["name"] = g.name;
                row["count"] = g.count;
                row["mean"] = optional_number(g.mean);
                row["spread"] = optional_number(g.spread);
                row["lo"] = optional_number(g.lo);
                row["hi"] = optional_number(g.hi);
                i["groups"].push_back(std::move(row));
            }
            if (ideal.exclusion) {
                i["exclusion"] = {{"floor", ideal.exclusion->floor},
                                  {"n_removed", ideal.exclusion->n_removed},
                                  {"n_remaining", ideal.exclusion->n_remaining},
                                  {"hamming_after", ideal.exclusion->hamming_after}};
            } else {
                i["exclusion"] = nullptr;
            }
            s["ideals"].push_back(std::move(i));
        }
        doc["sections"].push_back(std::move(s));
    }
    return doc;
}

HeterogeneityReport report_from_json(const nlohmann::json& doc) {
    try {
        HeterogeneityReport report;
        report.group_label = doc.at("group_label").get<std::string>();
        report.interval_method = interval_method_from_string(doc.at("interval_method").get<std::string>());
        report.split_by_form = doc.at("split_by_form").get<bool>();
        for (const auto& s : doc.at("sections")) {
            ReportSection section;
            section.form = s.at("form").get<std::string>();
            section.n_universities = s.at("n_universities").get<std::size_t>();
            for (const auto& i : s.at("ideals")) {
                IdealResult ideal;
                ideal.spec = i.at("spec").get<std::string>();
                ideal.kind = i.at("kind").get<std::string>();
                ideal.hamming = i.at("hamming").get<double>();
                for (const auto& row : i.at("groups")) {
                    IdealGroup g;
                    g.name = row.at("name").get<std::string>();
                    g.count = row.at("count").get<std::size_t>();
                    g.mean = read_optional(row, "mean");
                    g.spread = read_optional(row, "spread");
                    g.lo = read_optional(row, "lo");
                    g.hi = read_optional(row, "hi");
                    ideal.groups.push_back(std::move(g));
                }
                if (i.contains("exclusion") && !i.at("exclusion").is_null()) {
                    const auto& e = i.at("exclusion");
                    ideal.exclusion = ExclusionOutcome{e.at("floor").get<double>(), e.at("n_removed").get<std::size_t>(),
                                                       e.at("n_remaining").get<std::size_t>(),
                                                       e.at("hamming_after").get<double>()};
                }
                section.per_ideal.push_back(std::move(ideal));
            }
            report.sections.push_back(std::move(section));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("report JSON: ") + e.what());
    }
}

void write_report_csv(std::ostream& out, const HeterogeneityReport& report) {
    out << "form,ideal,stage,floor,n_universities,hamming\n";
    for (const auto& section : report.sections) {
        for (const auto& ideal : section.per_ideal) {
            // Spec strings may contain commas; quote them.
            const std::string quoted = "\"" + ideal.spec + "\"";
            out << section.form << ',' << quoted << ",full,," << section.n_universities << ','
                << detail::format_double(ideal.hamming) << '\n';
            if (ideal.exclusion) {
                out << section.form << ',' << quoted << ",excluded," << detail::format_double(ideal.exclusion->floor)
                    << ',' << ideal.exclusion->n_remaining << ',' << detail::format_double(ideal.exclusion->hamming_after)
                    << '\n';
            }
        }
    }
}

void write_whatif_csv(std::ostream& out, std::span<const WhatifRow> rows) {
    out << "form,floor,n_removed,n_remaining,feasible,hamming\n";
    for (const auto& row : rows) {
        out << row.form << ',' << detail::format_double(row.floor) << ',' << row.n_removed << ',' << row.n_remaining
            << ',' << (row.feasible ? 1 : 0) << ',' << (row.hamming ? detail::format_double(*row.hamming) : "") << '\n';
    }
}

ReportFormat report_format_from_string(std::string_view text) {
    if (text == "json") return ReportFormat::json;
    if (text == "csv") return ReportFormat::csv;
    throw ValidationError("unknown format '" + std::string(text) + "'");
}

void emit(const HeterogeneityReport& report, ReportFormat format, const std::filesystem::path& path) {
    const auto write = [&](std::ostream& out) {
        if (format == ReportFormat::json) {
            out << to_json(report).dump(2) << '\n';
        } else {
            write_report_csv(out, report);
        }
    };
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    write(out);
    if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

std::vector<PlotRow> plotdata(const Dataset& dataset, const AnalyzeOptions& options) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> form_counts;
    for (const auto& r : dataset.records) {
        auto& counts = form_counts[r.university];
        (r.form == Form::state_funded ? counts.first : counts.second) += 1;
    }
    const auto stats = aggregate(dataset, options.split_by_form, options.drop_missing).stats;
    const auto intervals = real_intervals(stats, options.interval_method);
    std::vector<PlotRow> rows;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        const auto [bud, com] = form_counts.at(s.label);
        rows.push_back(PlotRow{s.label, s.form.value_or("all"), s.mean, s.std, intervals[i].interval.lo,
                               intervals[i].interval.hi, s.count, bud, com});
    }
    return rows;
}

void write_plotdata_csv(std::ostream& out, std::span<const PlotRow> rows) {
    out << "university_id,form,mean,std,interval_lo,interval_hi,count,count_state_funded,count_tuition_based\n";
    for (const auto& r : rows) {
        out << r.university << ',' << r.form << ',' << detail::format_double(r.mean) << ','
            << detail::format_double(r.std) << ',' << detail::format_double(r.interval_lo) << ','
            << detail::format_double(r.interval_hi) << ',' << r.count << ',' << r.count_state_funded << ','
            << r.count_tuition_based << '\n';
    }
}

}  // namespace hetero
