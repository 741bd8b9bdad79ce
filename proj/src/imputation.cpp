#include "hetero/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "hetero/error.hpp"

namespace hetero {

namespace {

struct Counts {
    std::size_t students = 0;
    std::size_t missing = 0;
};

// Universities in first-appearance order with their counts.
std::vector<std::pair<std::string, Counts>> count_by_university(std::span<const StudentRecord> records) {
    std::vector<std::pair<std::string, Counts>> out;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : records) {
        auto [it, inserted] = index.try_emplace(r.university, out.size());
        if (inserted) out.emplace_back(r.university, Counts{});
        auto& counts = out[it->second].second;
        ++counts.students;
        if (r.missing()) ++counts.missing;
    }
    return out;
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw_closed(std::mt19937_64& rng, double lo, double hi) {
    return lo + unit_draw(rng) * (hi - lo);
}

double draw_open(std::mt19937_64& rng, double lo, double hi) {
    if (!(hi > lo)) return lo;
    for (;;) {
        const double value = lo + unit_draw(rng) * (hi - lo);
        if (value > lo && value < hi) return value;
    }
}

}  // namespace

std::string_view to_string(ExclusionReason reason) {
    return reason == ExclusionReason::too_few_students ? "too_few_students" : "too_many_gaps";
}

std::vector<std::string> ExclusionReport::excluded_universities() const {
    std::vector<std::string> out;
    for (const auto& e : excluded) out.push_back(e.university);
    return out;
}

ExclusionResult apply_exclusion(std::span<const StudentRecord> records, const ExclusionParams& params) {
    if (params.min_students < 1) throw ValidationError("min_students must be at least 1");
    if (!(params.max_missing_frac > 0.0 && params.max_missing_frac <= 1.0)) {
        throw ValidationError("max_missing_frac must lie in (0, 1]");
    }

    ExclusionResult result;
    std::unordered_map<std::string, bool> dropped;
    for (const auto& [university, counts] : count_by_university(records)) {
        ExcludedUniversity entry{university, counts.students, counts.missing, {}};
        if (counts.students < params.min_students) entry.reasons.push_back(ExclusionReason::too_few_students);
        if (static_cast<double>(counts.missing) >= params.max_missing_frac * static_cast<double>(counts.students)) {
            entry.reasons.push_back(ExclusionReason::too_many_gaps);
        }
        dropped[university] = !entry.reasons.empty();
        if (!entry.reasons.empty()) {
            result.report.excluded_student_count += counts.students;
            result.report.excluded.push_back(std::move(entry));
        }
    }
    result.report.n_excluded = result.report.excluded.size();
    for (const auto& r : records)
        if (!dropped[r.university]) result.kept.push_back(r);
    result.report.nothing_left = result.kept.empty();
    return result;
}

FormStats form_stats(std::span<const StudentRecord> records, Form form) {
    FormStats stats;
    stats.form = form;
    std::vector<double> observed;
    for (const auto& r : records) {
        if (r.university != records.front().university) {
            throw ValidationError("form_stats: records span several universities");
        }
        if (r.form != form) continue;
        ++stats.count;
        if (r.missing()) {
            ++stats.missing;
        } else {
            observed.push_back(*r.score);
        }
    }
    if (observed.empty()) {
        const std::string who = records.empty() ? std::string("<none>") : records.front().university;
        throw ValidationError("form_stats: no observed " + std::string(to_string(form)) + " scores for '" + who +
                              "'");
    }
    const auto n = static_cast<double>(observed.size());
    stats.mean = std::accumulate(observed.begin(), observed.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : observed) ss += (v - stats.mean) * (v - stats.mean);
    stats.variance = ss / n;
    const auto [lo, hi] = std::minmax_element(observed.begin(), observed.end());
    stats.min_obs = *lo;
    stats.max_obs = *hi;
    stats.olympiad_lo = stats.max_obs - 0.1 * stats.max_obs;
    stats.olympiad_hi = std::min(stats.max_obs + 0.1 * stats.max_obs, 100.0);
    const double sd = std::sqrt(stats.variance);
    stats.fill_lo = stats.mean - sd;
    stats.fill_hi = stats.mean + sd;
    return stats;
}

std::pair<double, double> olympiad_band(const FormStats& stats) {
    return {stats.olympiad_lo, stats.olympiad_hi};
}

std::pair<double, double> regular_band(const FormStats& stats) {
    return {std::max(stats.fill_lo, 0.0), std::min(stats.fill_hi, 100.0)};
}

std::vector<StudentRecord> fill_missing(std::span<const StudentRecord> records, std::uint64_t seed) {
    std::vector<StudentRecord> out(records.begin(), records.end());

    // Canonical order: university, form, then original position.
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out[a].university != out[b].university) return out[a].university < out[b].university;
        return out[a].form < out[b].form;
    });

    // Statistics per (university, form) group that contains a gap.
    std::map<std::pair<std::string, Form>, FormStats> stats;
    std::vector<std::string> offenders;
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin;
        const auto& head = out[order[begin]];
        while (end < order.size() && out[order[end]].university == head.university &&
               out[order[end]].form == head.form) {
            ++end;
        }
        std::vector<StudentRecord> group;
        bool has_gap = false;
        for (std::size_t i = begin; i < end; ++i) {
            group.push_back(out[order[i]]);
            has_gap = has_gap || out[order[i]].missing();
        }
        if (has_gap) {
            const bool any_observed =
                std::any_of(group.begin(), group.end(), [](const StudentRecord& r) { return !r.missing(); });
            if (any_observed) {
                stats.emplace(std::make_pair(head.university, head.form), form_stats(group, head.form));
            } else {
                offenders.push_back(head.university + "/" + std::string(to_string(head.form)));
            }
        }
        begin = end;
    }
    if (!offenders.empty()) {
        std::string message = "cannot impute groups without observed scores:";
        for (const auto& o : offenders) message += " " + o;
        throw ValidationError(message);
    }

    std::mt19937_64 rng(seed);
    for (auto idx : order) {
        auto& record = out[idx];
        if (!record.missing()) continue;
        const auto& fs = stats.at({record.university, record.form});
        if (record.basis == Basis::olympiad) {
            const auto [lo, hi] = olympiad_band(fs);
            record.score = draw_closed(rng, lo, hi);
        } else {
            const auto [lo, hi] = regular_band(fs);
            record.score = draw_open(rng, lo, hi);
        }
        record.imputed = true;
    }
    return out;
}

MissingnessSummary missingness_summary(std::span<const StudentRecord> records) {
    MissingnessSummary summary;
    for (const auto& [university, counts] : count_by_university(records)) {
        summary.total += counts.students;
        summary.missing += counts.missing;
        summary.per_university.emplace_back(
            university, static_cast<double>(counts.missing) / static_cast<double>(counts.students));
    }
    summary.overall =
        summary.total == 0 ? 0.0 : static_cast<double>(summary.missing) / static_cast<double>(summary.total);
    summary.warning = summary.overall > kMissingWarningThreshold;
    return summary;
}

}  // namespace hetero
