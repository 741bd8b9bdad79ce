#include "hetero/ideal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "text_util.hpp"

namespace hetero {

namespace {

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double arithmetic_mean(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<double> means_of(std::span<const UniversityStats> stats) {
    std::vector<double> out;
    out.reserve(stats.size());
    for (const auto& s : stats) out.push_back(s.mean);
    return out;
}

std::vector<LabeledInterval> labeled(std::span<const UniversityStats> stats,
                                     const std::vector<ScoreInterval>& intervals,
                                     const std::string& prefix) {
    std::vector<LabeledInterval> out;
    out.reserve(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) out.push_back({prefix + stats[i].label, intervals[i]});
    return out;
}

// Fills count/lo/hi of each group from the member means.
void fill_member_ranges(std::vector<IdealGroup>& groups, const std::vector<std::size_t>& assignment,
                        const std::vector<double>& means) {
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        auto& g = groups[assignment[i]];
        ++g.count;
        g.lo = g.lo ? std::min(*g.lo, means[i]) : means[i];
        g.hi = g.hi ? std::max(*g.hi, means[i]) : means[i];
    }
}

IdealSystem finish(std::span<const UniversityStats> stats, IdealSystem system,
                   const std::string& prefix) {
    const auto items = labeled(stats, system.intervals, prefix);
    system.order = build_interval_order(items);
    return system;
}

}  // namespace

// ---------------------------------------------------------------------------
// k-means

double within_cluster_ss(std::span<const double> values,
                         const std::vector<std::vector<std::size_t>>& groups) {
    double total = 0.0;
    for (const auto& group : groups) {
        if (group.empty()) continue;
        double sum = 0.0;
        for (auto i : group) sum += values[i];
        const double mean = sum / static_cast<double>(group.size());
        for (auto i : group) total += (values[i] - mean) * (values[i] - mean);
    }
    return total;
}

ClusterSpec kmeans_1d(std::span<const double> values, std::size_t k) {
    if (k < 1) throw ValidationError("kmeans: k must be at least 1");
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("kmeans: values must be finite");
    }

    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const std::size_t m = distinct.size();
    if (k > m) {
        throw ValidationError("kmeans: k=" + std::to_string(k) + " exceeds the " +
                              std::to_string(m) + " distinct values");
    }

    // Weighted prefix sums over distinct values, shifted by the overall mean
    // to limit cancellation in the segment cost.
    std::vector<double> weight(m, 0.0);
    for (double v : values) {
        const auto pos = std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin();
        weight[static_cast<std::size_t>(pos)] += 1.0;
    }
    const double shift = arithmetic_mean(values);
    std::vector<double> pw(m + 1, 0.0), p1(m + 1, 0.0), p2(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = distinct[i] - shift;
        pw[i + 1] = pw[i] + weight[i];
        p1[i + 1] = p1[i] + weight[i] * x;
        p2[i + 1] = p2[i] + weight[i] * x * x;
    }
    // Cost of the segment of distinct values [a, b).
    auto cost = [&](std::size_t a, std::size_t b) {
        const double w = pw[b] - pw[a];
        const double s1 = p1[b] - p1[a];
        const double s2 = p2[b] - p2[a];
        return std::max(0.0, s2 - s1 * s1 / w);
    };

    constexpr double inf = std::numeric_limits<double>::infinity();
    // best[c][j]: optimal cost of splitting the first j distinct values into c+1 segments.
    std::vector<std::vector<double>> best(k, std::vector<double>(m + 1, inf));
    std::vector<std::vector<std::size_t>> split(k, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t j = 1; j <= m; ++j) best[0][j] = cost(0, j);
    for (std::size_t c = 1; c < k; ++c) {
        for (std::size_t j = c + 1; j <= m; ++j) {
            for (std::size_t i = c; i < j; ++i) {
                const double candidate = best[c - 1][i] + cost(i, j);
                if (candidate < best[c][j]) {
                    best[c][j] = candidate;
                    split[c][j] = i;
                }
            }
        }
    }

    // Walk back the segment boundaries.
    std::vector<std::size_t> bounds(k + 1, 0);
    bounds[k] = m;
    for (std::size_t c = k - 1; c > 0; --c) bounds[c] = split[c][bounds[c + 1]];

    ClusterSpec spec;
    spec.k = k;
    spec.clusters.resize(k);
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), values[idx]) - distinct.begin());
        const auto c = static_cast<std::size_t>(
            std::upper_bound(bounds.begin() + 1, bounds.end(), pos) - (bounds.begin() + 1));
        spec.clusters[c].members.push_back(idx);
    }
    std::vector<std::vector<std::size_t>> groups;
    for (auto& cluster : spec.clusters) {
        std::vector<double> member_values;
        for (auto i : cluster.members) member_values.push_back(values[i]);
        cluster.center = arithmetic_mean(member_values);
        cluster.spread = sample_std(member_values);
        groups.push_back(cluster.members);
    }
    spec.wcss = within_cluster_ss(values, groups);
    return spec;
}

// ---------------------------------------------------------------------------
// Clustered ideal

IdealSystem clustered_system(std::span<const UniversityStats> stats, std::size_t k) {
    const auto means = means_of(stats);
    const auto clusters = kmeans_1d(means, k);

    IdealSystem system;
    system.intervals.resize(stats.size());
    system.assignment.resize(stats.size());
    for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
        const auto& cluster = clusters.clusters[c];
        const auto interval =
            ScoreInterval::make(cluster.center - cluster.spread, cluster.center + cluster.spread);
        for (auto i : cluster.members) {
            system.intervals[i] = interval;
            system.assignment[i] = c;
        }
        IdealGroup group;
        group.name = "cluster " + std::to_string(c + 1);
        group.mean = cluster.center;
        group.spread = cluster.spread;
        system.groups.push_back(group);
    }
    fill_member_ranges(system.groups, system.assignment, means);
    return finish(stats, std::move(system), "i");
}

IntervalOrder clustered_ideal(std::span<const UniversityStats> stats, std::size_t k) {
    return clustered_system(stats, k).order;
}

// ---------------------------------------------------------------------------
// Uniform ideal

std::size_t UniformSpec::bin_of(double value) const {
    std::size_t bin = 0;
    for (std::size_t i = 1; i < k; ++i)
        if (value >= edges[i]) bin = i;
    return bin;
}

UniformSpec uniform_spec(std::span<const UniversityStats> stats, std::size_t k) {
    if (k < 1) throw ValidationError("uniform: k must be at least 1");
    if (stats.empty()) throw ValidationError("uniform: no universities");
    const auto means = means_of(stats);
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    if (k > 1 && !(*hi > *lo)) {
        throw ValidationError("uniform: k > 1 needs distinct minimum and maximum means");
    }

    UniformSpec spec;
    spec.k = k;
    spec.lo = *lo;
    spec.hi = *hi;
    const double width = (spec.hi - spec.lo) / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
        spec.edges.push_back(spec.lo + static_cast<double>(i) * width);
        spec.centers.push_back(spec.lo + (static_cast<double>(i) + 0.5) * width);
    }
    spec.edges.push_back(spec.hi);
    return spec;
}

IdealSystem uniform_system(std::span<const UniversityStats> stats, std::size_t k,
                           const BinOverride& assignment_override) {
    const auto spec = uniform_spec(stats, k);
    for (const auto& [label, bin] : assignment_override) {
        const bool known = std::any_of(stats.begin(), stats.end(),
                                       [&](const UniversityStats& s) { return s.label == label; });
        if (!known) throw ValidationError("uniform override: unknown university '" + label + "'");
        if (bin >= k) {
            throw ValidationError("uniform override: bin " + std::to_string(bin) + " out of range for '" +
                                  label + "'");
        }
    }

    const auto means = means_of(stats);
    IdealSystem system;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto it = assignment_override.find(stats[i].label);
        const auto bin = it != assignment_override.end() ? it->second : spec.bin_of(means[i]);
        system.assignment.push_back(bin);
        system.intervals.push_back(
            ScoreInterval::make(spec.centers[bin] - spec.half_width, spec.centers[bin] + spec.half_width));
    }
    for (std::size_t b = 0; b < k; ++b) {
        IdealGroup group;
        group.name = "[" + detail::format_double(spec.edges[b]) + ";" +
                     detail::format_double(spec.edges[b + 1]) + (b + 1 == k ? "]" : ")");
        group.mean = spec.centers[b];
        group.spread = spec.half_width;
        system.groups.push_back(group);
    }
    fill_member_ranges(system.groups, system.assignment, means);
    return finish(stats, std::move(system), "u");
}

IntervalOrder uniform_ideal(std::span<const UniversityStats> stats, std::size_t k,
                            const BinOverride& assignment_override) {
    return uniform_system(stats, k, assignment_override).order;
}

// ---------------------------------------------------------------------------
// Desired ideal

void DesiredSpec::validate() const {
    if (boundary_rule.size() != breakpoints.size()) {
        throw ValidationError("desired spec: one boundary rule per breakpoint is required");
    }
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i])) throw ValidationError("desired spec: breakpoints must be finite");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
            throw ValidationError("desired spec: breakpoints must be strictly ascending");
        }
    }
    if (floor && std::isnan(*floor)) throw ValidationError("desired spec: floor must be a number");
}

std::size_t DesiredSpec::group_of(double mean) const {
    std::size_t group = 0;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        const bool above = boundary_rule[i] == BoundaryRule::lower_inclusive ? mean > breakpoints[i]
                                                                             : mean >= breakpoints[i];
        if (above) group = i + 1;
    }
    return group;
}

std::string DesiredSpec::group_name(std::size_t g) const {
    if (breakpoints.empty()) return "all";
    const auto num = [&](std::size_t i) { return detail::format_double(breakpoints[i]); };
    const auto lower_incl = [&](std::size_t i) { return boundary_rule[i] == BoundaryRule::lower_inclusive; };
    if (g == 0) return (lower_incl(0) ? "<=" : "<") + num(0);
    const auto last = breakpoints.size();
    if (g == last) return (lower_incl(last - 1) ? ">" : ">=") + num(last - 1);
    return (lower_incl(g - 1) ? "(" : "[") + num(g - 1) + ";" + num(g) + (lower_incl(g) ? "]" : ")");
}

IdealSystem desired_system(std::span<const UniversityStats> stats, const DesiredSpec& spec) {
    spec.validate();
    if (stats.empty()) throw ValidationError("desired: no universities");
    const auto means = means_of(stats);

    IdealSystem system;
    std::vector<std::vector<double>> members(spec.group_count());
    for (double mean : means) {
        const auto g = spec.group_of(mean);
        system.assignment.push_back(g);
        members[g].push_back(mean);
    }
    for (std::size_t g = 0; g < spec.group_count(); ++g) {
        IdealGroup group;
        group.name = spec.group_name(g);
        if (!members[g].empty()) {
            group.mean = arithmetic_mean(members[g]);
            group.spread = sample_std(members[g]);
        }
        system.groups.push_back(group);
    }
    for (auto g : system.assignment) {
        const auto& group = system.groups[g];
        system.intervals.push_back(ScoreInterval::make(*group.mean - *group.spread, *group.mean + *group.spread));
    }
    fill_member_ranges(system.groups, system.assignment, means);
    return finish(stats, std::move(system), "d");
}

IntervalOrder desired_ideal(std::span<const UniversityStats> stats, const DesiredSpec& spec) {
    return desired_system(stats, spec).order;
}

// ---------------------------------------------------------------------------
// Presets

DesiredSpec preset(const std::string& name) {
    using enum BoundaryRule;
    DesiredSpec spec;
    spec.preset_name = name;
    if (name == "electronic") {
        // <55 | [55;70] | >70
        spec.breakpoints = {55, 70};
        spec.boundary_rule = {upper_inclusive, lower_inclusive};
        spec.floor = 55;
        spec.recommended_floor = 60;
    } else if (name == "economics") {
        // <=55 | (55;65] | (65;75] | >75
        spec.breakpoints = {55, 65, 75};
        spec.boundary_rule = {lower_inclusive, lower_inclusive, lower_inclusive};
        spec.floor = 55;
    } else if (name == "agriculture") {
        // <50 | [50;60] | >60
        spec.breakpoints = {50, 60};
        spec.boundary_rule = {upper_inclusive, lower_inclusive};
        spec.floor = 50;
    } else if (name == "healthcare") {
        // <60 | [60;65] | (65;75] | >75; a mean of exactly 75 stays in (65;75]
        spec.breakpoints = {60, 65, 75};
        spec.boundary_rule = {upper_inclusive, lower_inclusive, lower_inclusive};
        spec.floor = 60;
    } else {
        throw ValidationError("unknown preset '" + name + "'");
    }
    return spec;
}

std::vector<std::string> preset_names() { return {"electronic", "economics", "agriculture", "healthcare"}; }

std::string to_string(BoundaryRule rule) {
    return rule == BoundaryRule::lower_inclusive ? "lower_inclusive" : "upper_inclusive";
}

BoundaryRule boundary_rule_from_string(const std::string& text) {
    if (text == "lower_inclusive" || text == "lower") return BoundaryRule::lower_inclusive;
    if (text == "upper_inclusive" || text == "upper") return BoundaryRule::upper_inclusive;
    throw ValidationError("unknown boundary rule '" + text + "'");
}

nlohmann::ordered_json to_json(const DesiredSpec& spec) {
    nlohmann::ordered_json doc;
    if (spec.preset_name) doc["name"] = *spec.preset_name;
    doc["breakpoints"] = spec.breakpoints;
    auto rules = nlohmann::ordered_json::array();
    for (auto rule : spec.boundary_rule) rules.push_back(to_string(rule));
    doc["boundary_rule"] = rules;
    doc["floor"] = spec.floor ? nlohmann::ordered_json(*spec.floor) : nlohmann::ordered_json(nullptr);
    if (spec.recommended_floor) doc["recommended_floor"] = *spec.recommended_floor;
    return doc;
}

DesiredSpec desired_spec_from_json(const nlohmann::json& doc) {
    try {
        DesiredSpec spec;
        if (!doc.is_object()) throw ValidationError("desired spec JSON must be an object");
        spec.breakpoints = doc.at("breakpoints").get<std::vector<double>>();
        if (doc.contains("boundary_rule")) {
            for (const auto& rule : doc.at("boundary_rule")) {
                spec.boundary_rule.push_back(boundary_rule_from_string(rule.get<std::string>()));
            }
        } else {
            spec.boundary_rule.assign(spec.breakpoints.size(), BoundaryRule::lower_inclusive);
        }
        if (doc.contains("floor") && !doc.at("floor").is_null()) spec.floor = doc.at("floor").get<double>();
        if (doc.contains("recommended_floor") && !doc.at("recommended_floor").is_null()) {
            spec.recommended_floor = doc.at("recommended_floor").get<double>();
        }
        if (doc.contains("name") && !doc.at("name").is_null()) spec.preset_name = doc.at("name").get<std::string>();
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("desired spec JSON: ") + e.what());
    }
}

}  // namespace hetero
