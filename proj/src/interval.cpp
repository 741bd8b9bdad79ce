#include "hetero/interval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "text_util.hpp"

namespace hetero {

ScoreInterval ScoreInterval::make(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw ValidationError("interval bounds must be finite");
    }
    if (lo > hi) {
        throw ValidationError("interval lower bound exceeds upper bound");
    }
    return {lo, hi};
}

UniversityStats UniversityStats::from_scores(std::string label, std::vector<double> scores,
                                             std::optional<std::string> form) {
    if (scores.empty()) {
        throw ValidationError("university '" + label + "' has no scores");
    }
    const auto n = static_cast<double>(scores.size());
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double mean = sum / n;
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);

    UniversityStats stats;
    stats.label = std::move(label);
    stats.mean = mean;
    stats.std = std::sqrt(ss / n);
    stats.count = scores.size();
    stats.form = std::move(form);
    stats.scores = std::move(scores);
    return stats;
}

void UniversityStats::validate() const {
    if (!std::isfinite(mean) || !std::isfinite(std) || std < 0.0) {
        throw ValidationError("university '" + label + "': invalid mean/std");
    }
    if (count < 1) {
        throw ValidationError("university '" + label + "': count must be positive");
    }
    if (scores) {
        const auto check = from_scores(label, *scores);
        if (check.count != count || std::abs(check.mean - mean) > 1e-9 ||
            std::abs(check.std - std) > 1e-9) {
            throw ValidationError("university '" + label + "': stats disagree with scores");
        }
    }
}

ScoreInterval interval_mean_std(const UniversityStats& stats) {
    return ScoreInterval::make(stats.mean - stats.std, stats.mean + stats.std);
}

ScoreInterval interval_min_max(std::span<const double> scores) {
    if (scores.empty()) {
        throw ValidationError("cannot build a min/max interval without students");
    }
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    return ScoreInterval::make(*lo, *hi);
}

IntervalOrder::IntervalOrder(std::vector<std::string> labels)
    : labels_(std::move(labels)), cells_(labels_.size() * labels_.size(), 0) {}

IntervalOrder IntervalOrder::from_matrix(std::vector<std::string> labels,
                                         const std::vector<std::vector<int>>& rows) {
    IntervalOrder order(std::move(labels));
    const auto n = order.size();
    if (rows.size() != n) {
        throw ValidationError("incidence matrix row count does not match labels");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw ValidationError("incidence matrix row " + std::to_string(i) + " has wrong width");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (rows[i][j] != 0 && rows[i][j] != 1) {
                throw ValidationError("incidence cells must be 0 or 1");
            }
            order.set(i, j, rows[i][j] == 1);
        }
    }
    return order;
}

std::vector<std::pair<std::size_t, std::size_t>> IntervalOrder::pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j)
            if ((*this)(i, j)) out.emplace_back(i, j);
    return out;
}

std::size_t IntervalOrder::pair_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

IntervalOrder build_interval_order(std::span<const LabeledInterval> intervals) {
    if (intervals.empty()) {
        throw ValidationError("interval order needs at least one interval");
    }
    std::vector<std::string> labels;
    labels.reserve(intervals.size());
    std::unordered_set<std::string> seen;
    for (const auto& item : intervals) {
        if (!seen.insert(item.label).second) {
            throw ValidationError("duplicate label '" + item.label + "'");
        }
        labels.push_back(item.label);
    }

    IntervalOrder order(std::move(labels));
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        for (std::size_t j = 0; j < intervals.size(); ++j) {
            if (intervals[i].interval.lo > intervals[j].interval.hi) order.set(i, j);
        }
    }
    return order;
}

bool is_irreflexive(const IntervalOrder& order) {
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order(i, i)) return false;
    return true;
}

bool is_asymmetric(const IntervalOrder& order) {
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < order.size(); ++j)
            if (order(i, j) && order(j, i)) return false;
    return true;
}

bool is_transitive(const IntervalOrder& order) {
    const auto n = order.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!order(i, j)) continue;
            for (std::size_t k = 0; k < n; ++k)
                if (order(j, k) && !order(i, k)) return false;
        }
    return true;
}

bool has_ferrers_property(const IntervalOrder& order) {
    const auto edges = order.pairs();
    for (const auto& [a, b] : edges)
        for (const auto& [c, d] : edges)
            if (!order(a, d) && !order(c, b)) return false;
    return true;
}

bool is_interval_order(const IntervalOrder& order) {
    return is_irreflexive(order) && is_asymmetric(order) && is_transitive(order) &&
           has_ferrers_property(order);
}

double hamming(const IntervalOrder& a, const IntervalOrder& b) {
    if (a.size() != b.size()) {
        throw ValidationError("hamming: orders have different sizes (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
    const auto n = a.size();
    if (n < 2) {
        throw ValidationError("hamming: at least two elements are required");
    }
    std::size_t differing = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && a(i, j) != b(i, j)) ++differing;
    return static_cast<double>(differing) / static_cast<double>(n * (n - 1));
}

std::vector<UniversityStats> exclude_below(std::span<const UniversityStats> stats, double floor) {
    if (std::isnan(floor)) {
        throw ValidationError("exclusion floor must be a number");
    }
    std::vector<UniversityStats> kept;
    std::copy_if(stats.begin(), stats.end(), std::back_inserter(kept),
                 [floor](const UniversityStats& s) { return s.mean >= floor; });
    if (kept.empty()) {
        throw ValidationError("no universities remain above floor " + detail::format_double(floor));
    }
    return kept;
}

void write_incidence_csv(std::ostream& out, const IntervalOrder& order) {
    for (const auto& label : order.labels()) {
        if (!detail::is_plain_cell(label)) {
            throw ValidationError("label '" + label + "' cannot be written to CSV");
        }
        out << ',' << label;
    }
    out << '\n';
    for (std::size_t i = 0; i < order.size(); ++i) {
        out << order.labels()[i];
        for (std::size_t j = 0; j < order.size(); ++j) out << ',' << (order(i, j) ? '1' : '0');
        out << '\n';
    }
}

IntervalOrder read_incidence_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("incidence CSV is empty");
    }
    auto header = detail::split_csv_line(line);
    if (header.empty() || !header.front().empty()) {
        throw ValidationError("incidence CSV header must start with an empty cell");
    }
    std::vector<std::string> labels(header.begin() + 1, header.end());
    std::vector<std::vector<int>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != labels.size() + 1) {
            throw ValidationError("incidence CSV line " + std::to_string(line_no) +
                                  ": wrong number of cells");
        }
        if (rows.size() >= labels.size() || cells.front() != labels[rows.size()]) {
            throw ValidationError("incidence CSV line " + std::to_string(line_no) +
                                  ": row label does not match header");
        }
        std::vector<int> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c] != "0" && cells[c] != "1") {
                throw ValidationError("incidence CSV line " + std::to_string(line_no) +
                                      ": cells must be 0 or 1");
            }
            row.push_back(cells[c] == "1" ? 1 : 0);
        }
        rows.push_back(std::move(row));
    }
    return IntervalOrder::from_matrix(std::move(labels), rows);
}

}  // namespace hetero
