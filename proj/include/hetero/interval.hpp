#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetero/error.hpp"

namespace hetero {

/// Closed interval [lo, hi] on the score axis.
struct ScoreInterval {
    double lo = 0.0;
    double hi = 0.0;

    /// Validating factory: both ends finite and lo <= hi.
    static ScoreInterval make(double lo, double hi);

    bool operator==(const ScoreInterval&) const = default;
};

/// Aggregate entrance-score statistics of one university (or of one
/// university restricted to one funding form).
struct UniversityStats {
    std::string label;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    std::size_t count = 1;
    std::optional<std::string> form;     // set when split by funding form
    std::optional<std::vector<double>> scores;

    /// Builds stats from raw scores: arithmetic mean, population std.
    static UniversityStats from_scores(std::string label, std::vector<double> scores,
                                       std::optional<std::string> form = std::nullopt);

    /// Throws ValidationError when std < 0, count < 1, or stored scores
    /// disagree with mean/std beyond 1e-9.
    void validate() const;
};

/// [mean - std, mean + std]; not clamped to the score scale.
ScoreInterval interval_mean_std(const UniversityStats& stats);

/// [min, max] of the raw scores. Throws on an empty list.
ScoreInterval interval_min_max(std::span<const double> scores);

struct LabeledInterval {
    std::string label;
    ScoreInterval interval;
};

/// Strict partial order over labeled elements, stored as a row-major
/// boolean incidence matrix: (i, j) set means i is strictly above j.
class IntervalOrder {
public:
    IntervalOrder() = default;

    /// Empty relation over the given labels.
    explicit IntervalOrder(std::vector<std::string> labels);

    /// Wraps an explicit 0/1 matrix. Only the shape is validated; use the
    /// property checks below to test order axioms.
    static IntervalOrder from_matrix(std::vector<std::string> labels,
                                     const std::vector<std::vector<int>>& rows);

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    bool operator()(std::size_t i, std::size_t j) const { return cells_[i * size() + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value = true) {
        cells_[i * size() + j] = value ? 1 : 0;
    }

    /// All (i, j) with i above j, row-major order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
    std::size_t pair_count() const;

    bool operator==(const IntervalOrder&) const = default;

private:
    std::vector<std::string> labels_;
    std::vector<std::uint8_t> cells_;
};

/// (i, j) in the order iff lo_i > hi_j. Touching intervals stay
/// incomparable. Throws on empty input or duplicate labels.
IntervalOrder build_interval_order(std::span<const LabeledInterval> intervals);

bool is_irreflexive(const IntervalOrder& order);
bool is_asymmetric(const IntervalOrder& order);
bool is_transitive(const IntervalOrder& order);
/// a>b and c>d imply a>d or c>b (no 2+2 suborder).
bool has_ferrers_property(const IntervalOrder& order);
bool is_interval_order(const IntervalOrder& order);

/// Normalized Hamming distance: differing off-diagonal cells over n(n-1).
/// Elements correspond by position; labels are not compared.
double hamming(const IntervalOrder& a, const IntervalOrder& b);

/// Keeps the universities whose mean is at least `floor`, preserving order.
/// Throws when nothing survives.
std::vector<UniversityStats> exclude_below(std::span<const UniversityStats> stats, double floor);

/// Incidence matrix as CSV: label header row and column, 0/1 cells.
void write_incidence_csv(std::ostream& out, const IntervalOrder& order);
IntervalOrder read_incidence_csv(std::istream& in);

}  // namespace hetero
