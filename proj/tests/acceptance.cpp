// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hetero/dataset.hpp"
#include "hetero/ideal.hpp"
#include "hetero/imputation.hpp"
#include "hetero/interval.hpp"
#include "hetero/report.hpp"
#include "test_support.hpp"

namespace {

using namespace hetero;

struct Failure {
    std::string what;
};

void check(bool condition, const std::string& what) {
    if (!condition) throw Failure{what};
}

void check_near(double actual, double expected, double tol, const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": got " << actual << ", expected " << expected << " +- " << tol;
        throw Failure{msg.str()};
    }
}

// Dense brute-force order and distance, independent of the library.
using Matrix = std::vector<std::vector<int>>;

Matrix dense_order(const std::vector<std::pair<double, double>>& intervals) {
    const auto n = intervals.size();
    Matrix m(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = (i != j && intervals[i].first > intervals[j].second) ? 1 : 0;
    return m;
}

double dense_distance(const Matrix& a, const Matrix& b) {
    const auto n = a.size();
    int diff = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && a[i][j] != b[i][j]) ++diff;
    return double(diff) / double(n * (n - 1));
}

// ---------------------------------------------------------------------------

void criterion_1() {
    const double h = hamming(testing::five_real(), testing::five_ideal());
    check_near(h, 0.1, 1e-12, "five-element distance");
    check_near(h, 2.0 / 20.0, 1e-12, "two differing cells of twenty");
}

void criterion_2() {
    const auto stats = testing::table1_stats();
    std::vector<double> means;
    for (const auto& s : stats) means.push_back(s.mean);
    const auto clusters = kmeans_1d(means, 2);
    check_near(clusters.clusters[0].center, 62.5, 1e-12, "first center");
    check_near(clusters.clusters[1].center, 85.0, 1e-12, "second center");

    const auto system = clustered_system(stats, 2);
    const double printed[][2] = {{58.96, 66.04}, {58.96, 66.04}, {77.93, 92.07}, {77.93, 92.07}};
    for (std::size_t i = 0; i < 4; ++i) {
        check_near(std::round(system.intervals[i].lo * 100) / 100, printed[i][0], 1e-9, "ideal lo (2 dp)");
        check_near(std::round(system.intervals[i].hi * 100) / 100, printed[i][1], 1e-9, "ideal hi (2 dp)");
    }
    const auto real = real_order(stats, IntervalMethod::mean_std);
    check(real == testing::table2_order(), "real order equals printed incidence");
    const double h = hamming(real, system.order);
    check_near(h, 1.0 / 12.0, 1e-9, "clustered distance");
    check_near(std::round(h * 100) / 100, 0.08, 1e-12, "rounded clustered distance");
}

void criterion_3() {
    const auto stats = testing::table1_stats();
    const auto spec = uniform_spec(stats, 4);
    check(spec.centers == std::vector<double>{63.75, 71.25, 78.75, 86.25}, "bin centers exact");

    const auto real = testing::table2_order();
    const auto printed = uniform_system(stats, 4, {{"B", 1}});
    check_near(hamming(real, printed.order), 1.0 / 12.0, 1e-12, "override distance");
    const auto strict = uniform_system(stats, 4);
    check(hamming(real, strict.order) == 0.0, "strict distance is zero");

    // Brute-force cell count on the printed tiny intervals.
    const auto tiny = [](double c) { return std::make_pair(c - 0.001, c + 0.001); };
    const auto real_dense = dense_order({{55, 65}, {60, 70}, {77, 83}, {85, 95}});
    check(dense_distance(real_dense, dense_order({tiny(63.75), tiny(63.75), tiny(78.75), tiny(86.25)})) == 0.0,
          "oracle strict distance");
    check_near(dense_distance(real_dense, dense_order({tiny(63.75), tiny(71.25), tiny(78.75), tiny(86.25)})),
               1.0 / 12.0, 1e-12, "oracle override distance");
}

void criterion_4() {
    std::mt19937_64 rng(20240601);
    for (int round = 0; round < 1000; ++round) {
        const auto n = 2 + rng() % 7;
        const auto a_items = testing::random_intervals(rng, n);
        const auto a = build_interval_order(a_items);
        const auto b = build_interval_order(testing::random_intervals(rng, n));
        const auto c = build_interval_order(testing::random_intervals(rng, n));
        for (const auto* order : {&a, &b, &c}) {
            check(is_irreflexive(*order), "irreflexive");
            check(is_asymmetric(*order), "asymmetric");
            check(is_transitive(*order), "transitive");
            check(has_ferrers_property(*order), "Ferrers");
        }
        const double ab = hamming(a, b);
        check(ab >= 0.0 && ab <= 1.0, "distance in [0, 1]");
        check(ab == testing::brute_hamming(a, b), "distance equals cell count");
        check(hamming(a, a) == 0.0, "identity");
        check((ab == 0.0) == (a.pairs() == b.pairs()), "zero iff equal");
        check(ab == hamming(b, a), "symmetry");
        check(hamming(a, c) <= ab + hamming(b, c) + 1e-12, "triangle inequality");

        auto shifted = a_items;
        const double shift = double(rng() % 1000) / 7.0 - 70.0;
        for (auto& item : shifted) item.interval = {item.interval.lo + shift, item.interval.hi + shift};
        check(build_interval_order(shifted) == a, "translation invariance");
    }
}

void criterion_5() {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> value(30.0, 95.0);
    for (int round = 0; round < 1000; ++round) {
        const auto n = 1 + rng() % 10;
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(rng() % 5 == 0 && i > 0 ? values[i - 1] : value(rng));
        auto sorted = values;
        std::sort(sorted.begin(), sorted.end());
        const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        const auto k = 1 + rng() % std::min<std::size_t>(4, distinct);

        // Exhaustive contiguous partitions of the sorted values.
        sorted = values;
        std::sort(sorted.begin(), sorted.end());
        double best = -1;
        std::vector<bool> mask(n - 1, false);
        std::fill(mask.begin(), mask.begin() + long(k - 1), true);
        do {
            std::vector<std::size_t> bounds{0};
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (mask[i]) bounds.push_back(i + 1);
            bounds.push_back(n);
            double total = 0;
            for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
                double sum = 0;
                for (auto i = bounds[g]; i < bounds[g + 1]; ++i) sum += sorted[i];
                const double mean = sum / double(bounds[g + 1] - bounds[g]);
                for (auto i = bounds[g]; i < bounds[g + 1]; ++i) total += (sorted[i] - mean) * (sorted[i] - mean);
            }
            if (best < 0 || total < best) best = total;
        } while (std::prev_permutation(mask.begin(), mask.end()));

        const auto spec = kmeans_1d(values, k);
        check_near(spec.wcss, best, 1e-9, "WCSS vs exhaustive (round " + std::to_string(round) + ")");
    }
}

std::vector<StudentRecord> cohort(const std::string& id, std::vector<double> observed, std::size_t regular_gaps,
                                  std::size_t olympiad_gaps, Form form = Form::state_funded) {
    std::vector<StudentRecord> out;
    for (double s : observed) out.push_back({id, form, Basis::competition, s, false});
    for (std::size_t i = 0; i < regular_gaps; ++i) out.push_back({id, form, Basis::targeted, std::nullopt, false});
    for (std::size_t i = 0; i < olympiad_gaps; ++i) out.push_back({id, form, Basis::olympiad, std::nullopt, false});
    return out;
}

std::vector<double> spread_scores(std::size_t n, double base) {
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(base + double(i % 9) * 1.5);
    return out;
}

void criterion_6() {
    std::vector<StudentRecord> records;
    const auto add = [&](const std::vector<StudentRecord>& part) { records.insert(records.end(), part.begin(), part.end()); };
    add(cohort("small", spread_scores(10, 50), 0, 0));      // 10 students: too few
    add(cohort("gappy", spread_scores(15, 55), 3, 2));      // 5 of 20 missing: too many gaps
    add(cohort("steady", spread_scores(16, 60), 3, 1));     // 4 of 20 missing: kept
    add(cohort("elite", {92, 94, 95, 96, 97, 91, 93, 95, 96, 94, 92, 95, 97, 93, 96}, 0, 1));  // cap case
    add(cohort("mixed", spread_scores(12, 58), 0, 0));
    add(cohort("mixed", spread_scores(6, 52), 2, 0, Form::tuition_based));

    const auto result = apply_exclusion(records);
    check(result.report.excluded_universities() == std::vector<std::string>{"small", "gappy"}, "excluded set");
    const auto agri = apply_exclusion(records, ExclusionParams::agriculture());
    check(agri.report.excluded_universities() == std::vector<std::string>{"gappy"}, "agriculture excluded set");

    const auto render = [](const std::vector<StudentRecord>& rows) {
        std::ostringstream out;
        write_csv(out, Dataset{rows, "fixture"}, true);
        return out.str();
    };
    const auto filled = fill_missing(result.kept, 42);
    check(render(filled) == render(fill_missing(result.kept, 42)), "seed 42 byte-identical");

    for (std::size_t i = 0; i < filled.size(); ++i) {
        const auto& original = result.kept[i];
        check(filled[i].score.has_value(), "no gaps remain");
        if (!original.missing()) {
            check(filled[i] == original, "observed records untouched");
            continue;
        }
        std::vector<StudentRecord> same;
        for (const auto& r : result.kept)
            if (r.university == original.university) same.push_back(r);
        const auto fs = form_stats(same, original.form);
        const double v = *filled[i].score;
        check(v <= 100.0, "fill at most 100");
        if (original.basis == Basis::olympiad) {
            check(v >= 0.9 * fs.max_obs && v <= std::min(1.1 * fs.max_obs, 100.0), "olympiad band");
        } else {
            check(v > fs.fill_lo && v < fs.fill_hi, "regular band");
        }
    }

    const auto elite = cohort("elite", {92, 97}, 0, 0);
    check(form_stats(elite, Form::state_funded).olympiad_hi == 100.0, "cap triggers above 90.91");
    const auto near = cohort("near", {80, 90.9}, 0, 0);
    check_near(form_stats(near, Form::state_funded).olympiad_hi, 99.99, 1e-9, "no cap at 90.9");
    const auto over = cohort("over", {80, 90.92}, 0, 0);
    check(form_stats(over, Form::state_funded).olympiad_hi == 100.0, "cap at 90.92");
}

void criterion_7() {
    const struct {
        const char* label;
        double mean, std;
    } rows[] = {{"W1", 40, 1}, {"W2", 45, 1}, {"W3", 50, 1}, {"W4", 54, 1}, {"M1", 60, 3},
                {"M2", 62, 3}, {"M3", 64, 3}, {"M4", 66, 3}, {"E1", 75, 2}, {"E2", 78, 2}};
    std::vector<UniversityStats> stats;
    for (const auto& r : rows) {
        UniversityStats s;
        s.label = r.label;
        s.mean = r.mean;
        s.std = r.std;
        s.count = 30;
        stats.push_back(s);
    }
    const auto spec = preset("electronic");
    const double floor = 55.0;
    const std::vector<IdealSpec> specs{DesiredIdeal{spec}};
    const auto section = analyze_stats(stats, specs, IntervalMethod::mean_std, floor);
    const double before = section.per_ideal[0].hamming;
    const double after = section.per_ideal[0].exclusion->hamming_after;

    // Oracle: groups by the electronic thresholds, sample std per group.
    const auto oracle = [&](double min_mean) {
        std::vector<std::pair<double, double>> real, ideal;
        std::vector<std::vector<double>> groups(3);
        const auto group_of = [](double m) { return m < 55 ? 0 : (m <= 70 ? 1 : 2); };
        for (const auto& r : rows)
            if (r.mean >= min_mean) groups[group_of(r.mean)].push_back(r.mean);
        for (const auto& r : rows) {
            if (r.mean < min_mean) continue;
            real.emplace_back(r.mean - r.std, r.mean + r.std);
            const auto& g = groups[group_of(r.mean)];
            double mean = 0;
            for (double v : g) mean += v;
            mean /= double(g.size());
            double ss = 0;
            for (double v : g) ss += (v - mean) * (v - mean);
            const double sd = g.size() > 1 ? std::sqrt(ss / double(g.size() - 1)) : 0.0;
            ideal.emplace_back(mean - sd, mean + sd);
        }
        return dense_distance(dense_order(real), dense_order(ideal));
    };
    check_near(before, oracle(-1e300), 1e-12, "before matches oracle");
    check_near(after, oracle(floor), 1e-12, "after matches oracle");
    check_near(before, 6.0 / 90.0, 1e-12, "before frozen value");
    check_near(after, 0.0, 1e-12, "after frozen value");
    check(after < before, "distance strictly decreases after exclusion");
    check(section.per_ideal[0].exclusion->n_removed == 4, "weak tail removed");
}

void criterion_8() {
    SynthSpec spec;
    spec.n_universities = 105;
    spec.students_min = 15;
    spec.students_max = 170;
    spec.mean_lo = 47.39;
    spec.mean_hi = 76.97;
    spec.std_lo = 2.9;
    spec.std_hi = 17.0;
    spec.missing_frac = 0.03;
    spec.seed = 2012;
    spec.group_label = "electronic";
    const auto ds = synth(spec);

    std::stringstream buffer;
    write_csv(buffer, ds);
    const auto back = read_csv(buffer, ds.group_label);
    check(back.records == ds.records, "save/load identity");

    const auto summary = summarize(aggregate(ds, false, true).stats);
    check(summary.n_universities == 105, "university count");
    check(summary.mean_range.lo >= 47.39 && summary.mean_range.hi <= 76.97, "means inside 47.39-76.97");
    check(summary.std_range.lo >= 2.9 && summary.std_range.hi <= 17.0, "stds inside 2.9-17");
    check(summary.median_range && summary.median_range->lo > 0 && summary.median_range->hi <= 100, "medians on scale");
}

void criterion_9() {
    using enum BoundaryRule;
    const auto el = preset("electronic");
    check(el.breakpoints == std::vector<double>{55, 70}, "electronic breakpoints");
    check(el.boundary_rule == std::vector<BoundaryRule>{upper_inclusive, lower_inclusive}, "electronic rules");
    const auto ec = preset("economics");
    check(ec.breakpoints == std::vector<double>{55, 65, 75}, "economics breakpoints");
    check(ec.boundary_rule == std::vector<BoundaryRule>(3, lower_inclusive), "economics rules");
    const auto ag = preset("agriculture");
    check(ag.breakpoints == std::vector<double>{50, 60}, "agriculture breakpoints");
    check(ag.boundary_rule == std::vector<BoundaryRule>{upper_inclusive, lower_inclusive}, "agriculture rules");
    const auto hc = preset("healthcare");
    check(hc.breakpoints == std::vector<double>{60, 65, 75}, "healthcare breakpoints");
    check(hc.boundary_rule == std::vector<BoundaryRule>{upper_inclusive, lower_inclusive, lower_inclusive},
          "healthcare rules");
    check(hc.group_of(75.0) == 2 && hc.group_name(2) == "(65;75]", "healthcare 75 stays in (65;75]");
    check(hc.group_of(60.0) == 1 && hc.group_of(65.0) == 1, "healthcare [60;65] closed");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria{
        {"1 five-element worked example distance = 0.1", criterion_1},
        {"2 clustered ideal on the four-university system", criterion_2},
        {"3 uniform ideal centers, override and strict rule", criterion_3},
        {"4 order and metric properties over 1000 random cases", criterion_4},
        {"5 kmeans_1d equals exhaustive WCSS minimization", criterion_5},
        {"6 imputation exclusion, bands, determinism, cap", criterion_6},
        {"7 exclusion what-if decreases distance", criterion_7},
        {"8 dataset round trip and synthetic envelope", criterion_8},
        {"9 stratification presets", criterion_9},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        try {
            run();
            std::cout << "PASS  criterion " << name << '\n';
        } catch (const Failure& f) {
            ++failed;
            std::cout << "FAIL  criterion " << name << ": " << f.what << '\n';
        } catch (const std::exception& e) {
            ++failed;
            std::cout << "FAIL  criterion " << name << ": exception: " << e.what() << '\n';
        }
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
