#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetero/interval.hpp"
#include "hetero/error.hpp"
#include "hetero/records.hpp"

namespace hetero {

inline constexpr std::string_view kRecordsHeader = "university_id,form,basis,score";
inline constexpr std::string_view kRecordsHeaderWithProvenance = "university_id,form,basis,score,imputed";
inline constexpr std::string_view kStatsHeader = "university_id,form,mean,std,count,interval_lo,interval_hi";

struct Dataset {
    std::vector<StudentRecord> records;
    std::string group_label;

    bool has_missing() const;
};

/// Reads the records CSV. Empty or zero scores are missing; an optional
/// trailing `imputed` column is accepted. Errors carry the line number.
Dataset read_csv(std::istream& in, std::string group_label = {});
Dataset load_csv(const std::filesystem::path& path, std::string group_label = {});

void write_csv(std::ostream& out, const Dataset& dataset, bool with_provenance = false);
void save_csv(const std::filesystem::path& path, const Dataset& dataset, bool with_provenance = false);

struct Aggregation {
    std::vector<UniversityStats> stats;
    std::vector<std::string> warnings;
};

/// One UniversityStats per university (first-appearance order), or per
/// university and form when split. Throws if scores are missing unless
/// `drop_missing` is set.
Aggregation aggregate(const Dataset& dataset, bool split_by_form, bool drop_missing = false);

/// Stats CSV: university_id,form,mean,std,count,interval_lo,interval_hi
/// using the mean +/- std interval. Unsplit rows carry form "all".
void write_stats_csv(std::ostream& out, std::span<const UniversityStats> stats);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct GroupSummary {
    std::size_t n_universities = 0;
    std::size_t n_students = 0;
    Range mean_range;
    Range std_range;
    std::optional<Range> median_range;  // needs raw scores on every entry
};

double median(std::vector<double> values);

GroupSummary summarize(std::span<const UniversityStats> stats);

struct SynthSpec {
    std::size_t n_universities = 10;
    std::size_t students_min = 20;
    std::size_t students_max = 200;
    double mean_lo = 50.0;
    double mean_hi = 80.0;
    double std_lo = 3.0;
    double std_hi = 15.0;
    double missing_frac = 0.0;
    double tuition_frac = 0.1;
    double olympiad_frac = 0.02;
    std::uint64_t seed = 0;
    std::string group_label = "synthetic";
};

/// Deterministic synthetic cohort. Observed scores of each university hit
/// a target mean and population std drawn inside the requested ranges, and
/// all scores lie in (0, 100]. Every (university, form) with a gap keeps at
/// least one observed score.
Dataset synth(const SynthSpec& spec);

}  // namespace hetero
