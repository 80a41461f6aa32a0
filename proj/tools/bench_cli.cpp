// Benchmark CLI: cross-validated error rates for the discriminant
// methods over one CSV dataset or a manifest of datasets.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discrim/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitIoError = 2;

std::vector<discrim::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<discrim::Method> methods;
    for (const auto& raw : names) {
        std::stringstream ss(raw);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (name.empty()) continue;
            if (name == "all") {
                for (auto m : {discrim::Method::Fda, discrim::Method::UcFda, discrim::Method::Lda,
                               discrim::Method::Qda, discrim::Method::Sda, discrim::Method::UcSda,
                               discrim::Method::LdaLp, discrim::Method::UcLdaLp})
                    methods.push_back(m);
                continue;
            }
            auto m = discrim::parse_method(name);
            if (!m)
                throw std::invalid_argument(
                    "unknown method '" + name +
                    "'; valid: fda, uc-fda, lda, qda, sda, uc-sda, lda-lp, uc-lda-lp, all");
            methods.push_back(*m);
        }
    }
    return methods;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discriminant-analysis benchmark: k-fold CV error rates for FDA, "
                 "UC-FDA, LDA, QDA, SDA, UC-SDA, LDA-Lp and UC-LDA-Lp"};

    std::string dataset_path, label_column, manifest_path, out_path;
    std::vector<std::string> method_names{"all"};
    std::string format_name = "markdown";
    discrim::BenchmarkConfig config;
    bool assumption_tests = false;
    bool per_fold_scaling = false;

    app.add_option("--dataset", dataset_path, "CSV file with one label column");
    app.add_option("--label", label_column, "label column name or 0-based index");
    app.add_option("--manifest", manifest_path, "INI-style manifest of datasets");
    app.add_option("--method", method_names,
                   "methods to run (comma separated or repeated); 'all' for every method");
    app.add_option("--folds", config.folds, "cross-validation fold count")->check(CLI::Range(2, 1000));
    app.add_option("--seed", config.seed, "fold shuffling seed");
    app.add_option("--r", config.r, "projection count (default min(C-1, p))");
    app.add_option("--p", config.lp_exponent, "Lp norm exponent for the Lp methods");
    app.add_option("--epsilon", config.lp_epsilon, "Lp convergence tolerance");
    app.add_option("--max-iters", config.lp_max_iters, "Lp iteration cap");
    app.add_option("--format", format_name, "output format: markdown, csv or json")
        ->check(CLI::IsMember({"markdown", "csv", "json"}));
    app.add_option("--out", out_path, "write the report to this file instead of stdout");
    app.add_flag("--assumption-tests", assumption_tests,
                 "run Box's M (with Levene fallback) per dataset");
    app.add_flag("--per-fold-scaling", per_fold_scaling,
                 "fit the min-max scaler on each training fold instead of the full dataset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        config.methods = parse_methods(method_names);
        config.assumption_tests = assumption_tests;
        config.per_fold_scaling = per_fold_scaling;

        if (!manifest_path.empty()) {
            config.datasets = discrim::load_manifest(manifest_path);
        } else if (!dataset_path.empty()) {
            if (label_column.empty()) {
                std::cerr << "error: --dataset requires --label\n";
                return kExitConfigError;
            }
            std::string name = dataset_path;
            if (const auto slash = name.find_last_of('/'); slash != std::string::npos)
                name = name.substr(slash + 1);
            if (const auto dot = name.find_last_of('.'); dot != std::string::npos)
                name = name.substr(0, dot);
            config.datasets.push_back({name, dataset_path, label_column, true, {"minmax"}});
        } else {
            std::cerr << "error: provide --dataset or --manifest\n";
            return kExitConfigError;
        }

        const auto report = discrim::run_benchmark(config);
        const auto format = format_name == "csv"    ? discrim::ReportFormat::Csv
                            : format_name == "json" ? discrim::ReportFormat::Json
                                                    : discrim::ReportFormat::Markdown;
        const std::string text = discrim::format_report(report, format);

        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return kExitIoError;
            }
            out << text;
        }
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}
