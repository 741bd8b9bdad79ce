#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hetero/dataset.hpp"
#include "hetero/ideal.hpp"
#include "hetero/interval.hpp"

namespace hetero {

enum class IntervalMethod { mean_std, min_max };
std::string_view to_string(IntervalMethod method);
IntervalMethod interval_method_from_string(std::string_view text);

struct ClusteredIdeal {
    std::size_t k = 4;
};
struct UniformIdeal {
    std::size_t k = 4;
    BinOverride assignment_override;
};
struct DesiredIdeal {
    DesiredSpec spec;
};
using IdealSpec = std::variant<ClusteredIdeal, UniformIdeal, DesiredIdeal>;

/// Parses the textual form used on the command line:
///   clustered:k=4
///   uniform:k=4[;assign=LABEL:BIN,...]      (bins are zero-based)
///   desired:preset=NAME
///   desired:breaks=55,70[;rules=upper,lower]
///   desired:file=spec.json
IdealSpec parse_ideal_spec(std::string_view text);
/// Canonical text for a spec; parse_ideal_spec(describe(s)) rebuilds s
/// (file specs come back as breaks).
std::string describe(const IdealSpec& spec);
std::string_view kind_of(const IdealSpec& spec);

IdealSystem build_ideal(std::span<const UniversityStats> stats, const IdealSpec& spec);

/// Per-university intervals in input order.
std::vector<LabeledInterval> real_intervals(std::span<const UniversityStats> stats, IntervalMethod method);
IntervalOrder real_order(std::span<const UniversityStats> stats, IntervalMethod method);

struct ExclusionOutcome {
    double floor = 0.0;
    std::size_t n_removed = 0;
    std::size_t n_remaining = 0;
    double hamming_after = 0.0;

    bool operator==(const ExclusionOutcome&) const = default;
};

struct IdealResult {
    std::string spec;
    std::string kind;
    double hamming = 0.0;
    std::vector<IdealGroup> groups;
    std::optional<ExclusionOutcome> exclusion;
};

struct ReportSection {
    std::string form;  // "all", "state_funded" or "tuition_based"
    std::size_t n_universities = 0;
    std::vector<IdealResult> per_ideal;
};

struct HeterogeneityReport {
    std::string group_label;
    IntervalMethod interval_method = IntervalMethod::mean_std;
    bool split_by_form = false;
    std::vector<ReportSection> sections;
};

struct AnalyzeOptions {
    IntervalMethod interval_method = IntervalMethod::mean_std;
    bool split_by_form = false;
    std::optional<double> floor;  // re-measures desired specs above this mean
    bool drop_missing = false;
};

/// Real order against each ideal order, for one set of universities.
ReportSection analyze_stats(std::span<const UniversityStats> stats, std::span<const IdealSpec> specs,
                            IntervalMethod method, std::optional<double> floor, std::string form = "all");

/// Full pipeline: aggregate, then one section per funding form when split
/// or a single combined section otherwise.
HeterogeneityReport analyze(const Dataset& dataset, std::span<const IdealSpec> specs,
                            const AnalyzeOptions& options = {});

struct WhatifRow {
    std::string form;
    double floor = 0.0;
    std::size_t n_removed = 0;
    std::size_t n_remaining = 0;
    bool feasible = false;  // at least two universities left
    std::optional<double> hamming;
};

/// Desired-system distance after excluding universities below each floor.
/// Rows are ordered by form, then floor.
std::vector<WhatifRow> whatif_exclusion(const Dataset& dataset, const DesiredSpec& spec,
                                        std::vector<double> floors, const AnalyzeOptions& options = {});
std::vector<WhatifRow> whatif_exclusion(std::span<const UniversityStats> stats, const DesiredSpec& spec,
                                        std::vector<double> floors, IntervalMethod method,
                                        const std::string& form = "all");

nlohmann::ordered_json to_json(const HeterogeneityReport& report);
HeterogeneityReport report_from_json(const nlohmann::json& doc);

/// form,ideal,stage,floor,n_universities,hamming; one row per ideal plus
/// one per exclusion.
void write_report_csv(std::ostream& out, const HeterogeneityReport& report);
void write_whatif_csv(std::ostream& out, std::span<const WhatifRow> rows);

enum class ReportFormat { json, csv };
ReportFormat report_format_from_string(std::string_view text);
void emit(const HeterogeneityReport& report, ReportFormat format, const std::filesystem::path& path);

struct PlotRow {
    std::string university;
    std::string form;
    double mean = 0.0;
    double std = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    std::size_t count = 0;
    std::size_t count_state_funded = 0;
    std::size_t count_tuition_based = 0;
};

/// Per-university data behind the distribution charts.
std::vector<PlotRow> plotdata(const Dataset& dataset, const AnalyzeOptions& options = {});
void write_plotdata_csv(std::ostream& out, std::span<const PlotRow> rows);

}  // namespace hetero
