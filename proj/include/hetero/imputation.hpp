#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetero/error.hpp"
#include "hetero/records.hpp"

namespace hetero {

struct ExclusionParams {
    std::size_t min_students = 15;
    double max_missing_frac = 0.25;

    /// Lower student threshold used for agricultural majors.
    static ExclusionParams agriculture() { return {8, 0.25}; }
};

enum class ExclusionReason { too_few_students, too_many_gaps };
std::string_view to_string(ExclusionReason reason);

struct ExcludedUniversity {
    std::string university;
    std::size_t students = 0;
    std::size_t missing = 0;
    std::vector<ExclusionReason> reasons;
};

struct ExclusionReport {
    std::vector<ExcludedUniversity> excluded;
    std::size_t excluded_student_count = 0;
    std::size_t n_excluded = 0;
    bool nothing_left = false;

    std::vector<std::string> excluded_universities() const;
};

struct ExclusionResult {
    std::vector<StudentRecord> kept;
    ExclusionReport report;
};

/// Drops every university with fewer than `min_students` students or with
/// missing >= max_missing_frac * students. Surviving records keep their
/// relative order and content.
ExclusionResult apply_exclusion(std::span<const StudentRecord> records, const ExclusionParams& params = {});

/// Score statistics of one funding form of one university, over observed
/// scores only.
struct FormStats {
    Form form = Form::state_funded;
    std::size_t count = 0;
    std::size_t missing = 0;
    double mean = 0.0;
    double variance = 0.0;  // mean squared deviation
    double min_obs = 0.0;
    double max_obs = 0.0;
    double olympiad_lo = 0.0;  // 0.9 * max_obs
    double olympiad_hi = 0.0;  // min(1.1 * max_obs, 100)
    double fill_lo = 0.0;      // mean - sqrt(variance)
    double fill_hi = 0.0;      // mean + sqrt(variance)
};

/// Records must all belong to one university. Throws when the form has no
/// observed score.
FormStats form_stats(std::span<const StudentRecord> records, Form form);

/// The closed band an Olympiad fill is drawn from, and the open band for
/// every other basis. Both are kept inside (0, 100].
std::pair<double, double> olympiad_band(const FormStats& stats);
std::pair<double, double> regular_band(const FormStats& stats);

/// Replaces every missing score by a uniform draw from its band. Draws
/// consume one random stream in canonical (university, form, position)
/// order, so the output depends only on the records and the seed.
/// Filled records are marked `imputed`.
std::vector<StudentRecord> fill_missing(std::span<const StudentRecord> records, std::uint64_t seed);

inline constexpr double kMissingWarningThreshold = 0.05;

struct MissingnessSummary {
    std::size_t total = 0;
    std::size_t missing = 0;
    double overall = 0.0;
    std::vector<std::pair<std::string, double>> per_university;  // first-appearance order
    bool warning = false;  // overall > 5%
};

MissingnessSummary missingness_summary(std::span<const StudentRecord> records);

}  // namespace hetero
