#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hetero/interval.hpp"

namespace hetero {

// ---------------------------------------------------------------------------
// Clustering

struct Cluster {
    double center = 0.0;
    double spread = 0.0;               // sample std of member values, 0 for singletons
    std::vector<std::size_t> members;  // positions in the input, ascending
};

/// Result of one-dimensional k-means; clusters are ordered by center.
struct ClusterSpec {
    std::size_t k = 0;
    std::vector<Cluster> clusters;
    double wcss = 0.0;
};

/// Globally optimal 1-D k-means by dynamic programming over the sorted
/// distinct values. Equal values always share a cluster.
/// Throws when k < 1 or k exceeds the number of distinct values.
ClusterSpec kmeans_1d(std::span<const double> values, std::size_t k);

/// Within-cluster sum of squares of an arbitrary partition.
double within_cluster_ss(std::span<const double> values,
                         const std::vector<std::vector<std::size_t>>& groups);

// ---------------------------------------------------------------------------
// Ideal systems

/// One row of the group table attached to an ideal system.
struct IdealGroup {
    std::string name;
    std::size_t count = 0;
    std::optional<double> mean;    // representative center
    std::optional<double> spread;  // half-width of the ideal interval
    std::optional<double> lo;      // smallest member mean
    std::optional<double> hi;      // largest member mean
};

/// Ideal counterpart of a set of universities. Position i of `intervals`
/// and `order` corresponds to position i of the input.
struct IdealSystem {
    std::vector<ScoreInterval> intervals;
    std::vector<std::size_t> assignment;  // group index per university
    std::vector<IdealGroup> groups;
    IntervalOrder order;
};

IdealSystem clustered_system(std::span<const UniversityStats> stats, std::size_t k);
IntervalOrder clustered_ideal(std::span<const UniversityStats> stats, std::size_t k);

inline constexpr double kUniformHalfWidth = 0.001;

/// Equal-width binning of [min mean, max mean].
struct UniformSpec {
    std::size_t k = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> edges;    // k + 1 values
    std::vector<double> centers;  // k values
    double half_width = kUniformHalfWidth;

    /// Bin holding `value`: half-open [edge_i, edge_i+1), last bin closed.
    std::size_t bin_of(double value) const;
};

UniformSpec uniform_spec(std::span<const UniversityStats> stats, std::size_t k);

/// Label -> zero-based bin, overriding the computed bin.
using BinOverride = std::map<std::string, std::size_t>;

IdealSystem uniform_system(std::span<const UniversityStats> stats, std::size_t k,
                           const BinOverride& assignment_override = {});
IntervalOrder uniform_ideal(std::span<const UniversityStats> stats, std::size_t k,
                            const BinOverride& assignment_override = {});

/// Which side of a breakpoint a value exactly equal to it belongs to.
enum class BoundaryRule {
    lower_inclusive,  // (.., b] | (b, ..)
    upper_inclusive,  // (.., b) | [b, ..)
};

/// Threshold stratification of universities by mean score.
struct DesiredSpec {
    std::vector<double> breakpoints;  // strictly ascending
    std::vector<BoundaryRule> boundary_rule;
    std::optional<double> floor;              // exclusion floor for what-if runs
    std::optional<double> recommended_floor;  // documentary only
    std::optional<std::string> preset_name;

    void validate() const;
    std::size_t group_count() const { return breakpoints.size() + 1; }
    std::size_t group_of(double mean) const;
    /// Interval notation for group g, e.g. "(55;65]" or "<=55".
    std::string group_name(std::size_t g) const;

    bool operator==(const DesiredSpec&) const = default;
};

IdealSystem desired_system(std::span<const UniversityStats> stats, const DesiredSpec& spec);
IntervalOrder desired_ideal(std::span<const UniversityStats> stats, const DesiredSpec& spec);

/// Stratifications per discipline: electronic, economics, agriculture,
/// healthcare. Throws on an unknown name.
DesiredSpec preset(const std::string& name);
std::vector<std::string> preset_names();

std::string to_string(BoundaryRule rule);
BoundaryRule boundary_rule_from_string(const std::string& text);

/// {"breakpoints": [...], "boundary_rule": [...], "floor": x, ...}
nlohmann::ordered_json to_json(const DesiredSpec& spec);
DesiredSpec desired_spec_from_json(const nlohmann::json& doc);

}  // namespace hetero
