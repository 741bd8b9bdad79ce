// Command-line front end: impute, analyze, whatif, plotdata.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hetero/dataset.hpp"
#include "hetero/error.hpp"
#include "hetero/imputation.hpp"
#include "hetero/report.hpp"

namespace {

constexpr int kExitValidation = 2;

// --out wins; otherwise HETERO_OUT_DIR/<default_name>; otherwise stdout.
std::string resolve_out(const std::string& out, const std::string& default_name) {
    if (!out.empty()) return out;
    if (const char* dir = std::getenv("HETERO_OUT_DIR"); dir && *dir) {
        return (std::filesystem::path(dir) / default_name).string();
    }
    return "-";
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw hetero::ValidationError("cannot write '" + path + "'");
    write(out);
    if (!out) throw hetero::ValidationError("failed writing '" + path + "'");
}

struct CommonArgs {
    std::string input;
    std::string out;
    std::string group_label;
    std::string interval_method = "mean_std";
    bool split_by_form = false;
    bool drop_missing = false;

    hetero::Dataset load() const {
        const auto label = group_label.empty() ? std::filesystem::path(input).stem().string() : group_label;
        return hetero::load_csv(input, label);
    }

    hetero::AnalyzeOptions options() const {
        hetero::AnalyzeOptions opts;
        opts.interval_method = hetero::interval_method_from_string(interval_method);
        opts.split_by_form = split_by_form;
        opts.drop_missing = drop_missing;
        return opts;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool analysis_flags) {
    cmd->add_option("--input", args.input, "Student records CSV")->required();
    cmd->add_option("--out", args.out, "Output path ('-' for stdout)");
    cmd->add_option("--group-label", args.group_label, "Label of the group of majors");
    if (analysis_flags) {
        cmd->add_option("--interval-method", args.interval_method, "mean_std or min_max")
            ->check(CLI::IsMember({"mean_std", "min_max"}));
        cmd->add_flag("--split-by-form", args.split_by_form, "Analyze each funding form separately");
        cmd->add_flag("--drop-missing", args.drop_missing, "Ignore missing scores instead of failing");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval-order heterogeneity analysis of university entrance scores"};
    app.require_subcommand(1);

    // impute
    CommonArgs impute_args;
    std::optional<std::uint64_t> seed;
    std::size_t min_students = 15;
    double max_missing_frac = 0.25;
    std::string impute_report;
    auto* impute = app.add_subcommand("impute", "Exclude sparse universities and fill missing scores");
    add_common(impute, impute_args, false);
    impute->add_option("--seed", seed, "Random seed for the fills")->required();
    impute->add_option("--min-students", min_students, "Exclude universities with fewer students");
    impute->add_option("--max-missing-frac", max_missing_frac, "Exclude universities with at least this gap share");
    impute->add_option("--report", impute_report, "Write a JSON run report here");

    // analyze
    CommonArgs analyze_args;
    std::vector<std::string> ideals;
    std::optional<double> exclude_below;
    std::string format = "json";
    auto* analyze = app.add_subcommand("analyze", "Hamming distances between real and ideal orders");
    add_common(analyze, analyze_args, true);
    analyze->add_option("--ideal", ideals, "clustered:k=4 | uniform:k=4 | desired:preset=NAME | desired:breaks=a,b");
    analyze->add_option("--exclude-below", exclude_below, "Re-measure desired systems above this mean");
    analyze->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // whatif
    CommonArgs whatif_args;
    std::string whatif_ideal;
    std::vector<double> floors;
    auto* whatif = app.add_subcommand("whatif", "Desired-system distance after excluding weak universities");
    add_common(whatif, whatif_args, true);
    whatif->add_option("--ideal", whatif_ideal, "desired:preset=NAME | desired:breaks=...")->required();
    whatif->add_option("--floors", floors, "Exclusion floors")->delimiter(',')->required();

    // plotdata
    CommonArgs plot_args;
    auto* plot = app.add_subcommand("plotdata", "Per-university intervals and counts");
    add_common(plot, plot_args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*impute) {
            auto dataset = impute_args.load();
            const auto summary = hetero::missingness_summary(dataset.records);
            if (summary.warning) {
                std::cerr << "warning: " << summary.missing << " of " << summary.total
                          << " scores missing (above 5%)\n";
            }
            const auto excluded = hetero::apply_exclusion(dataset.records, {min_students, max_missing_frac});
            dataset.records = hetero::fill_missing(excluded.kept, *seed);
            const auto path = resolve_out(impute_args.out, "imputed.csv");
            with_output(path, [&](std::ostream& out) { hetero::write_csv(out, dataset, true); });

            nlohmann::ordered_json report;
            report["seed"] = *seed;
            report["min_students"] = min_students;
            report["max_missing_frac"] = max_missing_frac;
            report["missing_fraction"] = summary.overall;
            report["missing_warning"] = summary.warning;
            report["n_excluded"] = excluded.report.n_excluded;
            report["excluded_student_count"] = excluded.report.excluded_student_count;
            report["excluded"] = nlohmann::ordered_json::array();
            for (const auto& e : excluded.report.excluded) {
                nlohmann::ordered_json row;
                row["university"] = e.university;
                row["students"] = e.students;
                row["missing"] = e.missing;
                row["reasons"] = nlohmann::ordered_json::array();
                for (auto r : e.reasons) row["reasons"].push_back(std::string(hetero::to_string(r)));
                report["excluded"].push_back(std::move(row));
            }
            std::size_t n_imputed = 0;
            for (const auto& r : dataset.records) n_imputed += r.imputed ? 1 : 0;
            report["n_imputed"] = n_imputed;
            report["nothing_left"] = excluded.report.nothing_left;
            if (!impute_report.empty()) {
                with_output(impute_report, [&](std::ostream& out) { out << report.dump(2) << '\n'; });
            }
            std::cerr << "excluded " << excluded.report.n_excluded << " universities, imputed " << n_imputed
                      << " scores (seed " << *seed << ")\n";
        } else if (*analyze) {
            const auto dataset = analyze_args.load();
            if (ideals.empty()) ideals = {"clustered:k=4", "uniform:k=4"};
            std::vector<hetero::IdealSpec> specs;
            for (const auto& text : ideals) specs.push_back(hetero::parse_ideal_spec(text));
            auto options = analyze_args.options();
            options.floor = exclude_below;
            const auto report = hetero::analyze(dataset, specs, options);
            const auto fmt = hetero::report_format_from_string(format);
            hetero::emit(report, fmt, resolve_out(analyze_args.out, fmt == hetero::ReportFormat::json ? "report.json"
                                                                                                         : "report.csv"));
        } else if (*whatif) {
            const auto dataset = whatif_args.load();
            const auto spec = hetero::parse_ideal_spec(whatif_ideal);
            if (!std::holds_alternative<hetero::DesiredIdeal>(spec)) {
                throw hetero::ValidationError("whatif works on desired ideals only");
            }
            const auto rows =
                hetero::whatif_exclusion(dataset, std::get<hetero::DesiredIdeal>(spec).spec, floors, whatif_args.options());
            with_output(resolve_out(whatif_args.out, "whatif.csv"),
                        [&](std::ostream& out) { hetero::write_whatif_csv(out, rows); });
        } else if (*plot) {
            const auto dataset = plot_args.load();
            const auto rows = hetero::plotdata(dataset, plot_args.options());
            with_output(resolve_out(plot_args.out, "plotdata.csv"),
                        [&](std::ostream& out) { hetero::write_plotdata_csv(out, rows); });
        }
    } catch (const hetero::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
