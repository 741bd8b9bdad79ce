#include "hetero/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "test_support.hpp"

namespace hetero {
namespace {

Dataset table1_dataset() {
    Dataset ds;
    ds.group_label = "table1";
    const struct {
        const char* id;
        Form form;
        double score;
    } rows[] = {{"A", Form::state_funded, 55},  {"A", Form::state_funded, 65},  {"B", Form::state_funded, 60},
                {"B", Form::tuition_based, 70}, {"C", Form::state_funded, 77},  {"C", Form::state_funded, 83},
                {"D", Form::state_funded, 85},  {"D", Form::tuition_based, 95}};
    for (const auto& r : rows) ds.records.push_back({r.id, r.form, Basis::competition, r.score, false});
    return ds;
}

// Two tiers above 55 plus a weak tail whose members are ranked among
// themselves in the real order but pooled by the desired system.
std::vector<UniversityStats> two_tier_stats() {
    const struct {
        const char* label;
        double mean, std;
    } rows[] = {{"W1", 40, 1}, {"W2", 45, 1}, {"W3", 50, 1}, {"W4", 54, 1}, {"M1", 60, 3},
                {"M2", 62, 3}, {"M3", 64, 3}, {"M4", 66, 3}, {"E1", 75, 2}, {"E2", 78, 2}};
    std::vector<UniversityStats> out;
    for (const auto& r : rows) {
        UniversityStats s;
        s.label = r.label;
        s.mean = r.mean;
        s.std = r.std;
        s.count = 20;
        out.push_back(s);
    }
    return out;
}

TEST(ParseIdealSpec, Forms) {
    EXPECT_EQ(std::get<ClusteredIdeal>(parse_ideal_spec("clustered:k=4")).k, 4u);
    const auto u = std::get<UniformIdeal>(parse_ideal_spec("uniform:k=4;assign=B:1"));
    EXPECT_EQ(u.assignment_override.at("B"), 1u);
    EXPECT_EQ(std::get<DesiredIdeal>(parse_ideal_spec("desired:preset=healthcare")).spec, preset("healthcare"));
    const auto d = std::get<DesiredIdeal>(parse_ideal_spec("desired:breaks=55,70;rules=upper,lower")).spec;
    EXPECT_EQ(d.breakpoints, (std::vector<double>{55, 70}));
    EXPECT_EQ(d.boundary_rule[0], BoundaryRule::upper_inclusive);

    for (const char* bad : {"kmeans:k=4", "clustered", "clustered:k=0", "clustered:k=2.5", "uniform:k=3;x=1",
                            "desired:preset=law", "desired:breaks=70,55", "desired:breaks=55;rules=upper,lower",
                            "desired:preset=electronic;breaks=1", "desired:file=/nonexistent.json"}) {
        EXPECT_THROW(parse_ideal_spec(bad), ValidationError) << bad;
    }
}

TEST(ParseIdealSpec, DescribeRoundTrips) {
    for (const char* text : {"clustered:k=4", "uniform:k=4", "uniform:k=4;assign=B:1,C:2", "desired:preset=economics",
                             "desired:breaks=52.5,68;rules=lower,upper"}) {
        EXPECT_EQ(describe(parse_ideal_spec(text)), text);
    }
}

TEST(ParseIdealSpec, ReadsJsonFile) {
    const auto path = std::filesystem::temp_directory_path() / "hetero_desired.json";
    {
        std::ofstream out(path);
        out << to_json(preset("agriculture")).dump();
    }
    const auto spec = parse_ideal_spec("desired:file=" + path.string());
    EXPECT_EQ(std::get<DesiredIdeal>(spec).spec, preset("agriculture"));
    std::filesystem::remove(path);
}

TEST(Analyze, TableOneDistances) {
    const std::vector<IdealSpec> specs{ClusteredIdeal{2}, UniformIdeal{4, {}}, UniformIdeal{4, {{"B", 1}}},
                                       parse_ideal_spec("desired:breaks=75")};
    const auto report = analyze(table1_dataset(), specs);
    ASSERT_EQ(report.sections.size(), 1u);
    const auto& section = report.sections[0];
    EXPECT_EQ(section.form, "all");
    EXPECT_EQ(section.n_universities, 4u);
    EXPECT_NEAR(section.per_ideal[0].hamming, 1.0 / 12.0, 1e-12);
    EXPECT_EQ(section.per_ideal[1].hamming, 0.0);
    EXPECT_NEAR(section.per_ideal[2].hamming, 1.0 / 12.0, 1e-12);
    EXPECT_NEAR(section.per_ideal[3].hamming, 1.0 / 12.0, 1e-12);
    for (const auto& ideal : section.per_ideal) {
        std::size_t total = 0;
        for (const auto& g : ideal.groups) total += g.count;
        EXPECT_EQ(total, section.n_universities);
        EXPECT_FALSE(ideal.exclusion.has_value());
    }
}

TEST(Analyze, IdenticalIntervalsGiveZero) {
    std::vector<UniversityStats> same;
    for (int i = 0; i < 4; ++i) {
        UniversityStats s;
        s.label = "u" + std::to_string(i);
        s.mean = 70;
        s.std = 4;
        same.push_back(s);
    }
    const std::vector<IdealSpec> specs{ClusteredIdeal{1}};
    EXPECT_EQ(analyze_stats(same, specs, IntervalMethod::mean_std, std::nullopt).per_ideal[0].hamming, 0.0);
}

TEST(Analyze, MinMaxIntervals) {
    const std::vector<IdealSpec> specs{ClusteredIdeal{2}};
    AnalyzeOptions options;
    options.interval_method = IntervalMethod::min_max;
    const auto report = analyze(table1_dataset(), specs, options);
    // Each university has exactly two scores, so min/max equals mean +- std.
    EXPECT_NEAR(report.sections[0].per_ideal[0].hamming, 1.0 / 12.0, 1e-12);

    const auto stats = testing::table1_stats();  // no raw scores
    EXPECT_THROW(real_order(stats, IntervalMethod::min_max), ValidationError);
}

TEST(Analyze, SplitByFormKeepsSections) {
    SynthSpec spec;
    spec.n_universities = 20;
    spec.tuition_frac = 0.4;
    spec.seed = 3;
    const auto ds = synth(spec);
    const std::vector<IdealSpec> specs{ClusteredIdeal{3}, DesiredIdeal{preset("economics")}};
    AnalyzeOptions options;
    options.split_by_form = true;
    const auto report = analyze(ds, specs, options);
    ASSERT_EQ(report.sections.size(), 2u);
    EXPECT_EQ(report.sections[0].form, "state_funded");
    EXPECT_EQ(report.sections[1].form, "tuition_based");
    for (const auto& section : report.sections)
        for (const auto& ideal : section.per_ideal) {
            EXPECT_GE(ideal.hamming, 0.0);
            EXPECT_LE(ideal.hamming, 1.0);
        }
}

TEST(Analyze, ExclusionFloor) {
    const std::vector<IdealSpec> specs{ClusteredIdeal{2}, DesiredIdeal{preset("electronic")}};
    const auto stats = two_tier_stats();
    const auto base = analyze_stats(stats, specs, IntervalMethod::mean_std, std::nullopt);

    const auto open = analyze_stats(stats, specs, IntervalMethod::mean_std, -std::numeric_limits<double>::infinity());
    EXPECT_FALSE(open.per_ideal[0].exclusion.has_value());  // clustered ideals are not re-measured
    ASSERT_TRUE(open.per_ideal[1].exclusion.has_value());
    EXPECT_EQ(open.per_ideal[1].exclusion->n_removed, 0u);
    EXPECT_EQ(open.per_ideal[1].exclusion->hamming_after, base.per_ideal[1].hamming);

    const auto cut = analyze_stats(stats, specs, IntervalMethod::mean_std, 55.0);
    EXPECT_EQ(cut.per_ideal[1].exclusion->n_removed, 4u);
    EXPECT_NEAR(cut.per_ideal[1].hamming, 6.0 / 90.0, 1e-12);
    EXPECT_EQ(cut.per_ideal[1].exclusion->hamming_after, 0.0);

    EXPECT_THROW(analyze_stats(stats, specs, IntervalMethod::mean_std, 77.0), ValidationError);
    EXPECT_THROW(analyze_stats(stats, specs, IntervalMethod::mean_std, 100.0), ValidationError);
}

TEST(Analyze, NeedsTwoUniversities) {
    Dataset ds;
    ds.records.push_back({"A", Form::state_funded, Basis::competition, 50.0, false});
    const std::vector<IdealSpec> specs{ClusteredIdeal{1}};
    EXPECT_THROW(analyze(ds, specs), ValidationError);
}

TEST(Whatif, RowsByFloor) {
    const auto stats = two_tier_stats();
    const auto spec = preset("electronic");
    const auto rows = whatif_exclusion(stats, spec, {90, 55, 0}, IntervalMethod::mean_std);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].floor, 0.0);
    EXPECT_EQ(rows[0].n_removed, 0u);
    EXPECT_NEAR(*rows[0].hamming, 6.0 / 90.0, 1e-12);
    EXPECT_EQ(rows[1].n_removed, 4u);
    EXPECT_EQ(*rows[1].hamming, 0.0);
    EXPECT_FALSE(rows[2].feasible);
    EXPECT_FALSE(rows[2].hamming.has_value());
    EXPECT_EQ(rows[2].n_removed, 10u);
}

TEST(Emit, JsonRoundTrip) {
    const std::vector<IdealSpec> specs{ClusteredIdeal{2}, DesiredIdeal{preset("electronic")}};
    AnalyzeOptions options;
    options.floor = 58.0;
    const auto report = analyze(table1_dataset(), specs, options);
    const auto doc = to_json(report);
    const auto back = report_from_json(nlohmann::json::parse(doc.dump()));
    EXPECT_EQ(to_json(back), doc);
    EXPECT_EQ(back.sections[0].per_ideal[1].exclusion, report.sections[0].per_ideal[1].exclusion);

    // Stable key order.
    const auto text = doc.dump();
    EXPECT_LT(text.find("\"group_label\""), text.find("\"interval_method\""));
    EXPECT_LT(text.find("\"interval_method\""), text.find("\"sections\""));
}

TEST(Emit, CsvRowsAndFiles) {
    const std::vector<IdealSpec> specs{ClusteredIdeal{2}, UniformIdeal{4, {}}, DesiredIdeal{preset("electronic")}};
    AnalyzeOptions options;
    options.floor = 58.0;
    const auto report = analyze(table1_dataset(), specs, options);
    std::ostringstream out;
    write_report_csv(out, report);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3 + 1);

    const auto dir = std::filesystem::temp_directory_path();
    emit(report, ReportFormat::json, dir / "hetero_report.json");
    std::ifstream in(dir / "hetero_report.json");
    EXPECT_EQ(to_json(report_from_json(nlohmann::json::parse(in))), to_json(report));
    std::filesystem::remove(dir / "hetero_report.json");
    EXPECT_THROW(emit(report, ReportFormat::csv, "/nonexistent/dir/report.csv"), ValidationError);
}

TEST(Plotdata, TableOneIntervals) {
    const auto rows = plotdata(table1_dataset());
    ASSERT_EQ(rows.size(), 4u);
    const double expected[][2] = {{55, 65}, {60, 70}, {77, 83}, {85, 95}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(rows[i].interval_lo, expected[i][0]);
        EXPECT_DOUBLE_EQ(rows[i].interval_hi, expected[i][1]);
    }
    EXPECT_EQ(rows[1].count_state_funded, 1u);
    EXPECT_EQ(rows[1].count_tuition_based, 1u);
}

TEST(Analyze, Deterministic) {
    SynthSpec spec;
    spec.n_universities = 40;
    spec.seed = 21;
    const auto ds = synth(spec);
    const std::vector<IdealSpec> specs{ClusteredIdeal{4}, UniformIdeal{4, {}}, DesiredIdeal{preset("economics")}};
    EXPECT_EQ(to_json(analyze(ds, specs)), to_json(analyze(ds, specs)));
}

}  // namespace
}  // namespace hetero
