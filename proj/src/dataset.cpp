#include "hetero/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "hetero/error.hpp"
#include "text_util.hpp"

namespace hetero {

bool Dataset::has_missing() const {
    return std::any_of(records.begin(), records.end(), [](const StudentRecord& r) { return r.missing(); });
}

Dataset read_csv(std::istream& in, std::string group_label) {
    Dataset dataset;
    dataset.group_label = std::move(group_label);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("line 1: missing header");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool provenance = false;
    if (line == kRecordsHeaderWithProvenance) {
        provenance = true;
    } else if (line != kRecordsHeader) {
        throw ValidationError("line 1: expected header '" + std::string(kRecordsHeader) + "'");
    }
    const std::size_t columns = provenance ? 5 : 4;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != columns) {
            throw ValidationError(where + "expected " + std::to_string(columns) + " fields, got " +
                                  std::to_string(cells.size()));
        }
        StudentRecord record;
        record.university = cells[0];
        if (record.university.empty()) throw ValidationError(where + "empty university id");
        try {
            record.form = form_from_string(cells[1]);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
        record.basis = basis_from_string(cells[2]);
        if (!cells[3].empty()) {
            const auto value = detail::parse_double(cells[3]);
            if (!value || !std::isfinite(*value)) throw ValidationError(where + "score '" + cells[3] + "' is not a number");
            if (*value < 0.0 || *value > 100.0) throw ValidationError(where + "score out of range [0, 100]");
            if (*value != 0.0) record.score = *value;
        }
        if (provenance) {
            if (cells[4] != "0" && cells[4] != "1") throw ValidationError(where + "imputed must be 0 or 1");
            record.imputed = cells[4] == "1";
        }
        dataset.records.push_back(std::move(record));
    }
    return dataset;
}

Dataset load_csv(const std::filesystem::path& path, std::string group_label) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return read_csv(in, std::move(group_label));
}

void write_csv(std::ostream& out, const Dataset& dataset, bool with_provenance) {
    out << (with_provenance ? kRecordsHeaderWithProvenance : kRecordsHeader) << '\n';
    for (const auto& r : dataset.records) {
        if (!detail::is_plain_cell(r.university)) {
            throw ValidationError("university id '" + r.university + "' cannot be written to CSV");
        }
        out << r.university << ',' << to_string(r.form) << ',' << to_string(r.basis) << ',';
        if (r.score) out << detail::format_double(*r.score);
        if (with_provenance) out << ',' << (r.imputed ? '1' : '0');
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& dataset, bool with_provenance) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    write_csv(out, dataset, with_provenance);
    if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

Aggregation aggregate(const Dataset& dataset, bool split_by_form, bool drop_missing) {
    if (!drop_missing && dataset.has_missing()) {
        throw ValidationError("dataset has missing scores; impute first or drop them");
    }

    struct Unit {
        std::string university;
        std::vector<double> by_form[2];
        std::size_t seen[2] = {0, 0};
    };
    std::vector<Unit> units;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : dataset.records) {
        auto [it, inserted] = index.try_emplace(r.university, units.size());
        if (inserted) units.push_back(Unit{r.university, {}, {0, 0}});
        auto& unit = units[it->second];
        const auto f = static_cast<std::size_t>(r.form);
        ++unit.seen[f];
        if (r.score) unit.by_form[f].push_back(*r.score);
    }

    Aggregation result;
    for (auto& unit : units) {
        if (split_by_form) {
            for (auto form : {Form::state_funded, Form::tuition_based}) {
                const auto f = static_cast<std::size_t>(form);
                const std::string tag = unit.university + "/" + std::string(to_string(form));
                if (unit.seen[f] == 0) {
                    result.warnings.push_back(tag + ": no students, omitted");
                } else if (unit.by_form[f].empty()) {
                    result.warnings.push_back(tag + ": no observed scores, omitted");
                } else {
                    result.stats.push_back(UniversityStats::from_scores(unit.university, std::move(unit.by_form[f]),
                                                                        std::string(to_string(form))));
                }
            }
        } else {
            std::vector<double> all = std::move(unit.by_form[0]);
            all.insert(all.end(), unit.by_form[1].begin(), unit.by_form[1].end());
            if (all.empty()) {
                result.warnings.push_back(unit.university + ": no observed scores, omitted");
            } else {
                result.stats.push_back(UniversityStats::from_scores(unit.university, std::move(all)));
            }
        }
    }
    return result;
}

void write_stats_csv(std::ostream& out, std::span<const UniversityStats> stats) {
    out << kStatsHeader << '\n';
    for (const auto& s : stats) {
        const auto interval = interval_mean_std(s);
        out << s.label << ',' << s.form.value_or("all") << ',' << detail::format_double(s.mean) << ','
            << detail::format_double(s.std) << ',' << s.count << ',' << detail::format_double(interval.lo) << ','
            << detail::format_double(interval.hi) << '\n';
    }
}

double median(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of an empty list");
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

GroupSummary summarize(std::span<const UniversityStats> stats) {
    if (stats.empty()) throw ValidationError("summarize: no universities");
    GroupSummary summary;
    summary.n_universities = stats.size();
    summary.mean_range = {stats.front().mean, stats.front().mean};
    summary.std_range = {stats.front().std, stats.front().std};
    const bool medians = std::all_of(stats.begin(), stats.end(), [](const UniversityStats& s) {
        return s.scores.has_value() && !s.scores->empty();
    });
    for (const auto& s : stats) {
        summary.n_students += s.count;
        summary.mean_range.lo = std::min(summary.mean_range.lo, s.mean);
        summary.mean_range.hi = std::max(summary.mean_range.hi, s.mean);
        summary.std_range.lo = std::min(summary.std_range.lo, s.std);
        summary.std_range.hi = std::max(summary.std_range.hi, s.std);
        if (medians) {
            const double m = median(*s.scores);
            if (!summary.median_range) {
                summary.median_range = Range{m, m};
            } else {
                summary.median_range->lo = std::min(summary.median_range->lo, m);
                summary.median_range->hi = std::max(summary.median_range->hi, m);
            }
        }
    }
    return summary;
}

// ---------------------------------------------------------------------------
// Synthetic data

namespace {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t index_draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

void check_synth_spec(const SynthSpec& spec) {
    const auto fail = [](const std::string& what) { throw ValidationError("synth: " + what); };
    if (spec.n_universities < 1) fail("n_universities must be positive");
    if (spec.students_min < 2 || spec.students_min > spec.students_max) fail("need 2 <= students_min <= students_max");
    if (!(spec.mean_lo > 0.0 && spec.mean_lo <= spec.mean_hi && spec.mean_hi <= 100.0)) {
        fail("need 0 < mean_lo <= mean_hi <= 100");
    }
    if (!(spec.std_lo >= 0.0 && spec.std_lo <= spec.std_hi)) fail("need 0 <= std_lo <= std_hi");
    for (double frac : {spec.tuition_frac, spec.olympiad_frac}) {
        if (!(frac >= 0.0 && frac <= 1.0)) fail("fractions must lie in [0, 1]");
    }
    if (!(spec.missing_frac >= 0.0 && spec.missing_frac < 1.0)) fail("missing_frac must lie in [0, 1)");
}

}  // namespace

Dataset synth(const SynthSpec& spec) {
    check_synth_spec(spec);
    std::mt19937_64 rng(spec.seed);
    Dataset dataset;
    dataset.group_label = spec.group_label;

    const auto width = std::to_string(spec.n_universities).size();
    constexpr int kAttempts = 1000;
    // Keep target means strictly inside the requested range.
    const double margin = 1e-6 * (spec.mean_hi - spec.mean_lo);

    for (std::size_t u = 0; u < spec.n_universities; ++u) {
        auto id = std::to_string(u + 1);
        id = "U" + std::string(width - id.size(), '0') + id;

        const auto n = spec.students_min + index_draw(rng, spec.students_max - spec.students_min + 1);
        std::vector<StudentRecord> students(n);
        std::vector<std::size_t> per_form[2];
        for (std::size_t s = 0; s < n; ++s) {
            students[s].university = id;
            students[s].form = unit_draw(rng) < spec.tuition_frac ? Form::tuition_based : Form::state_funded;
            students[s].basis = unit_draw(rng) < spec.olympiad_frac ? Basis::olympiad : Basis::competition;
            per_form[static_cast<std::size_t>(students[s].form)].push_back(s);
        }

        // Gaps per form, always leaving one observed score per form and two overall.
        std::size_t n_missing[2] = {0, 0};
        for (std::size_t f = 0; f < 2; ++f) {
            const auto size = per_form[f].size();
            if (size == 0) continue;
            n_missing[f] = std::min(static_cast<std::size_t>(std::llround(spec.missing_frac * double(size))), size - 1);
        }
        while (n - n_missing[0] - n_missing[1] < 2) {
            auto& m = n_missing[0] > 0 ? n_missing[0] : n_missing[1];
            --m;
        }
        std::vector<bool> is_missing(n, false);
        for (std::size_t f = 0; f < 2; ++f) {
            auto pool = per_form[f];
            for (std::size_t i = 0; i < n_missing[f]; ++i) {
                const auto pick = i + index_draw(rng, pool.size() - i);
                std::swap(pool[i], pool[pick]);
                is_missing[pool[i]] = true;
            }
        }
        const auto n_observed = static_cast<std::size_t>(std::count(is_missing.begin(), is_missing.end(), false));

        // Observed scores: standardized draws rescaled to the target mean/std.
        const double mean = spec.mean_lo + margin + unit_draw(rng) * (spec.mean_hi - spec.mean_lo - 2 * margin);
        std::vector<double> z(n_observed);
        double sd = -1.0;
        for (int attempt = 0; attempt < kAttempts && sd < 0.0; ++attempt) {
            for (auto& v : z) v = 2.0 * unit_draw(rng) - 1.0;
            const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / double(n_observed);
            double ss = 0.0;
            for (double v : z) ss += (v - zbar) * (v - zbar);
            const double zsd = std::sqrt(ss / double(n_observed));
            if (zsd == 0.0) continue;
            for (auto& v : z) v = (v - zbar) / zsd;
            const auto [zmin, zmax] = std::minmax_element(z.begin(), z.end());
            const double cap = (1.0 - 1e-9) * std::min((100.0 - mean) / *zmax, mean / -*zmin);
            const double hi = std::min(spec.std_hi, cap);
            if (hi < spec.std_lo) continue;
            const double sd_margin = 1e-6 * (hi - spec.std_lo);
            sd = spec.std_lo + sd_margin + unit_draw(rng) * (hi - spec.std_lo - 2 * sd_margin);
        }
        if (sd < 0.0) {
            throw ValidationError("synth: cannot fit std range inside (0, 100] for mean " + detail::format_double(mean));
        }
        std::size_t next = 0;
        for (std::size_t s = 0; s < n; ++s) {
            if (!is_missing[s]) students[s].score = mean + sd * z[next++];
        }
        dataset.records.insert(dataset.records.end(), students.begin(), students.end());
    }
    return dataset;
}

}  // namespace hetero
