#pragma once

// Experiment harness: per-dataset, per-method k-fold cross-validation
// error rates with assumption-test results, plus manifest loading and
// markdown/csv/json report rendering.

#include <chrono>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "discrim/classifiers.hpp"
#include "discrim/dataset.hpp"
#include "discrim/stats_tests.hpp"

namespace discrim {

struct DatasetSpec {
    std::string name;
    std::string path;
    std::string label_column;
    bool has_header = true;
    std::vector<std::string> preprocess;  // steps in order, e.g. "prune:10", "minmax"
};

struct BenchmarkConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<Method> methods;
    std::size_t folds = 5;
    unsigned seed = 0;
    std::size_t r = 0;  // 0 => per-dataset default min(C - 1, p)
    double lp_exponent = 1.5;
    double lp_epsilon = 1e-5;
    std::size_t lp_max_iters = 500;
    Normalization normalization = Normalization::WithinSphered;
    bool assumption_tests = false;
    bool per_fold_scaling = false;  // leakage-safe: fit the scaler on each training fold
};

struct BenchmarkCell {
    bool ok = false;
    double error_rate = 0.0;
    std::size_t misclassified = 0;
    std::size_t total = 0;
    std::string na_reason;  // non-empty iff !ok
    double wall_seconds = 0.0;
    std::size_t extra_params = 0;  // parameter count relative to FDA

    bool operator==(const BenchmarkCell& other) const {
        return ok == other.ok && misclassified == other.misclassified && total == other.total &&
               na_reason == other.na_reason && extra_params == other.extra_params;
    }
};

struct DatasetResult {
    std::string name;
    std::size_t samples = 0;
    std::size_t features = 0;
    std::size_t classes = 0;
    std::optional<TestReport> assumptions;
    std::vector<BenchmarkCell> cells;  // aligned with BenchmarkReport::methods

    bool operator==(const DatasetResult& other) const {
        return name == other.name && samples == other.samples && features == other.features &&
               classes == other.classes && cells == other.cells;
    }
};

struct BenchmarkReport {
    std::vector<Method> methods;
    std::vector<DatasetResult> datasets;

    bool operator==(const BenchmarkReport& other) const {
        return methods == other.methods && datasets == other.datasets;
    }
};

// Minimal INI/TOML-style manifest: one [section] per dataset with
// path/label/header/preprocess keys. Relative paths resolve against the
// manifest's own directory.
inline std::vector<DatasetSpec> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);

    std::string base_dir;
    if (const auto slash = path.find_last_of('/'); slash != std::string::npos)
        base_dir = path.substr(0, slash + 1);

    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\"");
        const auto e = s.find_last_not_of(" \t\r\"");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };

    std::vector<DatasetSpec> specs;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[') {
            const auto close = t.find(']');
            if (close == std::string::npos)
                throw std::runtime_error("manifest: unterminated section header: " + t);
            specs.push_back(DatasetSpec{trim(t.substr(1, close - 1)), "", "", true, {}});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos || specs.empty())
            throw std::runtime_error("manifest: expected key = value, got: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        DatasetSpec& spec = specs.back();
        if (key == "path") {
            spec.path = (!value.empty() && value.front() == '/') ? value : base_dir + value;
        } else if (key == "label") {
            spec.label_column = value;
        } else if (key == "header") {
            spec.has_header = (value == "true" || value == "1" || value == "yes");
        } else if (key == "preprocess") {
            std::stringstream ss(value);
            std::string step;
            while (std::getline(ss, step, ','))
                if (const std::string st = trim(step); !st.empty()) spec.preprocess.push_back(st);
        } else {
            throw std::runtime_error("manifest: unknown key '" + key + "'");
        }
    }
    for (const auto& s : specs)
        if (s.path.empty() || s.label_column.empty())
            throw std::runtime_error("manifest: dataset '" + s.name + "' needs path and label");
    return specs;
}

namespace detail {

struct PreparedDataset {
    LabeledDataset data;
    bool scale_per_fold = false;  // minmax requested but deferred to the fold loop
};

inline PreparedDataset prepare_dataset(const DatasetSpec& spec, bool per_fold_scaling) {
    PreparedDataset prep;
    prep.data = load_csv(spec.path, spec.label_column, spec.has_header);
    for (const auto& step : spec.preprocess) {
        if (step == "minmax") {
            if (per_fold_scaling)
                prep.scale_per_fold = true;
            else
                prep.data = apply_minmax(fit_minmax(prep.data), prep.data);
        } else if (step.rfind("prune:", 0) == 0) {
            prep.data = prune_sparse_columns(prep.data,
                                             static_cast<std::size_t>(std::stoul(step.substr(6))));
        } else {
            throw std::runtime_error("unknown preprocessing step: " + step);
        }
    }
    return prep;
}

}  // namespace detail

// Cross-validated error rate for one (dataset, method) cell. Exceptions
// surface as NA cells and never leak into other cells.
inline BenchmarkCell evaluate_cell(const LabeledDataset& data, Method method,
                                   const BenchmarkConfig& config, bool scale_per_fold) {
    BenchmarkCell cell;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const FoldPlan plan = stratified_kfold(data, config.folds, config.seed);
        std::size_t wrong = 0;
        for (std::size_t f = 0; f < config.folds; ++f) {
            std::vector<std::size_t> train_rows, test_rows;
            for (std::size_t i = 0; i < data.sample_count(); ++i)
                (plan.assignments[i] == f ? test_rows : train_rows).push_back(i);
            if (test_rows.empty()) continue;

            LabeledDataset train = subset(data, train_rows);
            LabeledDataset test = subset(data, test_rows);
            if (scale_per_fold) {
                const ScalerParams params = fit_minmax(train);
                train = apply_minmax(params, train);
                test = apply_minmax(params, test);
            }

            FitConfig fit_config;
            fit_config.r = config.r;
            fit_config.normalization = config.normalization;
            fit_config.lp_exponent = config.lp_exponent;
            fit_config.lp_epsilon = config.lp_epsilon;
            fit_config.lp_max_iters = config.lp_max_iters;
            const FittedModel model = fit(method, train, fit_config);

            for (std::size_t i = 0; i < test.sample_count(); ++i)
                if (predict(model, test.features.row(i)) != test.labels[i]) ++wrong;
        }
        cell.ok = true;
        cell.misclassified = wrong;
        cell.total = data.sample_count();
        cell.error_rate = static_cast<double>(wrong) / static_cast<double>(data.sample_count());

        const auto stats = compute_population_stats(data);
        const std::size_t r_used =
            config.r > 0 ? config.r
                         : default_projection_count(stats.class_count, data.feature_count());
        cell.extra_params =
            parameter_count(method, stats.class_count, data.feature_count(), r_used);
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.na_reason = e.what();
    }
    cell.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cell;
}

inline BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    if (config.methods.empty())
        throw std::invalid_argument("run_benchmark: no methods selected");
    if (config.folds < 2)
        throw std::invalid_argument("run_benchmark: folds must be >= 2");

    BenchmarkReport report;
    report.methods = config.methods;
    for (const auto& spec : config.datasets) {
        DatasetResult result;
        result.name = spec.name;
        const auto prep = detail::prepare_dataset(spec, config.per_fold_scaling);
        result.samples = prep.data.sample_count();
        result.features = prep.data.feature_count();
        result.classes = prep.data.class_count();
        if (config.assumption_tests)
            result.assumptions = check_assumptions(prep.data);
        for (Method m : config.methods)
            result.cells.push_back(evaluate_cell(prep.data, m, config, prep.scale_per_fold));
        report.datasets.push_back(std::move(result));
    }
    return report;
}

namespace detail {

inline std::string format_error(const BenchmarkCell& cell) {
    if (!cell.ok) return "NA";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << cell.error_rate;
    return os.str();
}

}  // namespace detail

inline std::string format_markdown(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "| Dataset |";
    for (Method m : report.methods) os << ' ' << method_name(m) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < report.methods.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& ds : report.datasets) {
        // best = lowest error among non-NA cells
        std::size_t best = ds.cells.size();
        for (std::size_t i = 0; i < ds.cells.size(); ++i)
            if (ds.cells[i].ok && (best == ds.cells.size() ||
                                   ds.cells[i].error_rate < ds.cells[best].error_rate))
                best = i;
        os << "| " << ds.name << " |";
        for (std::size_t i = 0; i < ds.cells.size(); ++i) {
            const std::string text = detail::format_error(ds.cells[i]);
            os << ' ' << (i == best ? "**" + text + "**" : text) << " |";
        }
        os << '\n';
        if (ds.assumptions) {
            const auto& a = *ds.assumptions;
            os << "| " << ds.name << " ("
               << (a.test_name == TestReport::Kind::BoxM ? "Box M" : "Levene fallback")
               << ": p=" << std::scientific << std::setprecision(3) << a.p_value
               << (a.rejected_at_05 ? ", rejected at 0.05" : ", not rejected") << ") |";
            os.unsetf(std::ios::scientific);
            for (std::size_t i = 0; i < ds.cells.size(); ++i) os << " |";
            os << '\n';
        }
    }
    return os.str();
}

inline std::string format_csv(const BenchmarkReport& report) {
    std::ostringstream os;
    // wall time is deliberately left out: csv output must be byte-stable
    // across identical runs
    os << "dataset,method,error_rate,misclassified,total,extra_params,na_reason\n";
    for (const auto& ds : report.datasets)
        for (std::size_t i = 0; i < ds.cells.size(); ++i) {
            const auto& c = ds.cells[i];
            os << ds.name << ',' << method_name(report.methods[i]) << ','
               << detail::format_error(c) << ',' << c.misclassified << ',' << c.total << ','
               << c.extra_params << ",\"" << c.na_reason << "\"\n";
        }
    return os.str();
}

inline nlohmann::json to_json(const TestReport& report) {
    nlohmann::json j{{"test", report.test_name == TestReport::Kind::BoxM ? "box_m" : "levene"},
                     {"statistic", report.statistic},
                     {"df1", report.df1},
                     {"df2", report.df2},
                     {"p_value", report.p_value},
                     {"rejected_at_05", report.rejected_at_05},
                     {"fallback_used", report.fallback_used}};
    if (!report.per_feature.empty()) {
        j["per_feature"] = nlohmann::json::array();
        for (const auto& f : report.per_feature) j["per_feature"].push_back(to_json(f));
    }
    return j;
}

inline nlohmann::json to_json(const BenchmarkReport& report) {
    nlohmann::json j;
    j["methods"] = nlohmann::json::array();
    for (Method m : report.methods) j["methods"].push_back(method_name(m));
    j["datasets"] = nlohmann::json::array();
    for (const auto& ds : report.datasets) {
        nlohmann::json d{{"name", ds.name},
                         {"samples", ds.samples},
                         {"features", ds.features},
                         {"classes", ds.classes}};
        if (ds.assumptions) d["assumptions"] = to_json(*ds.assumptions);
        d["cells"] = nlohmann::json::array();
        for (const auto& c : ds.cells)
            d["cells"].push_back({{"ok", c.ok},
                                  {"error_rate", c.error_rate},
                                  {"misclassified", c.misclassified},
                                  {"total", c.total},
                                  {"extra_params", c.extra_params},
                                  {"wall_seconds", c.wall_seconds},
                                  {"na_reason", c.na_reason}});
        j["datasets"].push_back(std::move(d));
    }
    return j;
}

inline BenchmarkReport report_from_json(const nlohmann::json& j) {
    BenchmarkReport report;
    for (const auto& name : j.at("methods")) {
        auto m = parse_method(name.get<std::string>());
        if (!m) throw std::runtime_error("unknown method in report: " + name.get<std::string>());
        report.methods.push_back(*m);
    }
    for (const auto& d : j.at("datasets")) {
        DatasetResult ds;
        ds.name = d.at("name").get<std::string>();
        ds.samples = d.at("samples").get<std::size_t>();
        ds.features = d.at("features").get<std::size_t>();
        ds.classes = d.at("classes").get<std::size_t>();
        for (const auto& c : d.at("cells")) {
            BenchmarkCell cell;
            cell.ok = c.at("ok").get<bool>();
            cell.error_rate = c.at("error_rate").get<double>();
            cell.misclassified = c.at("misclassified").get<std::size_t>();
            cell.total = c.at("total").get<std::size_t>();
            cell.extra_params = c.at("extra_params").get<std::size_t>();
            cell.wall_seconds = c.at("wall_seconds").get<double>();
            cell.na_reason = c.at("na_reason").get<std::string>();
            ds.cells.push_back(std::move(cell));
        }
        report.datasets.push_back(std::move(ds));
    }
    return report;
}

enum class ReportFormat { Markdown, Csv, Json };

inline std::string format_report(const BenchmarkReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Markdown: return format_markdown(report);
        case ReportFormat::Csv: return format_csv(report);
        case ReportFormat::Json: return to_json(report).dump(2) + "\n";
    }
    throw std::logic_error("format_report: unknown format");
}

}  // namespace discrim
