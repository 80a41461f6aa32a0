#pragma once

// Dataset ingestion and preprocessing: CSV loading, min-max scaling,
// sparse-column pruning, stratified k-fold planning.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "discrim/linalg.hpp"

namespace discrim {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& what)
        : std::runtime_error("parse error at line " + std::to_string(line) +
                             ", column " + std::to_string(col) + ": " + what) {}
};

class MissingLabelColumn : public std::runtime_error {
public:
    explicit MissingLabelColumn(const std::string& name)
        : std::runtime_error("label column not found: " + name) {}
};

class AllColumnsDropped : public std::runtime_error {
public:
    AllColumnsDropped() : std::runtime_error("pruning removed every feature column") {}
};

class KTooLarge : public std::runtime_error {
public:
    KTooLarge() : std::runtime_error("fold count exceeds sample count") {}
};

// Feature matrix (n x p) with integer class ids aligned to rows.
// Class ids are dense, assigned in first-appearance order.
struct LabeledDataset {
    DenseMatrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t sample_count() const { return features.rows(); }
    std::size_t feature_count() const { return features.cols(); }
    std::size_t class_count() const { return class_names.size(); }
};

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;  // per-row fold index
    unsigned seed = 0;
};

struct ScalerParams {
    Vector min;
    Vector max;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

}  // namespace detail

// Loads a comma-separated file. The label column may be given by header
// name or by 0-based index ("2"); all remaining columns must be numeric.
inline LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                               bool has_header = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    if (has_header) {
        if (!std::getline(in, line)) throw ParseError(1, 0, "empty file");
        ++line_no;
        header = detail::split_csv_line(line);
    }

    std::optional<std::size_t> label_idx;
    if (!header.empty()) {
        auto it = std::find(header.begin(), header.end(), label_column);
        if (it != header.end())
            label_idx = static_cast<std::size_t>(it - header.begin());
    }
    if (!label_idx) {
        if (auto n = detail::parse_number(label_column);
            n && *n == std::floor(*n) && *n >= 0)
            label_idx = static_cast<std::size_t>(*n);
        else
            throw MissingLabelColumn(label_column);
    }

    LabeledDataset ds;
    std::unordered_map<std::string, int> class_ids;
    std::vector<double> values;
    std::size_t n_cols = header.size();

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = detail::split_csv_line(line);
        if (n_cols == 0) n_cols = cells.size();
        if (cells.size() != n_cols)
            throw ParseError(line_no, cells.size(), "expected " + std::to_string(n_cols) + " cells");
        if (*label_idx >= n_cols) throw MissingLabelColumn(label_column);

        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c == *label_idx) {
                const std::string& name = cells[c];
                auto [it, inserted] = class_ids.try_emplace(name, static_cast<int>(ds.class_names.size()));
                if (inserted) ds.class_names.push_back(name);
                ds.labels.push_back(it->second);
            } else {
                auto v = detail::parse_number(cells[c]);
                if (!v) throw ParseError(line_no, c, "non-numeric feature value '" + cells[c] + "'");
                values.push_back(*v);
            }
        }
    }
    if (ds.labels.empty()) throw std::runtime_error("empty dataset: " + path);

    const std::size_t p = n_cols - 1;
    ds.features = DenseMatrix(ds.labels.size(), p, std::move(values));
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == *label_idx) continue;
        ds.feature_names.push_back(c < header.size() ? header[c] : "f" + std::to_string(c));
    }
    return ds;
}

inline ScalerParams fit_minmax(const LabeledDataset& data) {
    const std::size_t p = data.feature_count();
    ScalerParams s;
    s.min.assign(p, std::numeric_limits<double>::infinity());
    s.max.assign(p, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.sample_count(); ++i)
        for (std::size_t j = 0; j < p; ++j) {
            s.min[j] = std::min(s.min[j], data.features(i, j));
            s.max[j] = std::max(s.max[j], data.features(i, j));
        }
    return s;
}

// (x - min) / (max - min); constant features map to 0. No clipping, so
// values outside the fitted range land outside [0, 1].
inline LabeledDataset apply_minmax(const ScalerParams& params, const LabeledDataset& data) {
    if (params.min.size() != data.feature_count())
        throw std::invalid_argument("apply_minmax: feature count mismatch");
    LabeledDataset out = data;
    for (std::size_t j = 0; j < data.feature_count(); ++j) {
        const double range = params.max[j] - params.min[j];
        for (std::size_t i = 0; i < data.sample_count(); ++i)
            out.features(i, j) = range > 0.0
                                     ? (data.features(i, j) - params.min[j]) / range
                                     : 0.0;
    }
    return out;
}

// Drops every feature whose nonzero count is below min_nonzero.
inline LabeledDataset prune_sparse_columns(const LabeledDataset& data, std::size_t min_nonzero,
                                           std::vector<std::string>* dropped = nullptr) {
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < data.feature_count(); ++j) {
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < data.sample_count(); ++i)
            if (data.features(i, j) != 0.0) ++nonzero;
        if (nonzero >= min_nonzero)
            keep.push_back(j);
        else if (dropped)
            dropped->push_back(data.feature_names[j]);
    }
    if (keep.empty()) throw AllColumnsDropped();
    LabeledDataset out;
    out.labels = data.labels;
    out.class_names = data.class_names;
    out.features = DenseMatrix(data.sample_count(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.feature_names.push_back(data.feature_names[keep[j]]);
        for (std::size_t i = 0; i < data.sample_count(); ++i)
            out.features(i, j) = data.features(i, keep[j]);
    }
    return out;
}

// Stratified fold assignment: per-class seeded shuffle, then round-robin.
// Classes smaller than k still get spread round-robin (each appears in
// at most n_i folds), so no fold is ever empty of a class by more than 1.
inline FoldPlan stratified_kfold(const LabeledDataset& data, std::size_t k, unsigned seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    if (k > data.sample_count()) throw KTooLarge();
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(data.sample_count(), 0);

    std::mt19937 rng(seed);
    for (std::size_t c = 0; c < data.class_count(); ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.sample_count(); ++i)
            if (data.labels[i] == static_cast<int>(c)) idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < idx.size(); ++i)
            plan.assignments[idx[i]] = i % k;
    }
    return plan;
}

// Builds a dataset from raw rows; class names default to the label text.
inline LabeledDataset make_dataset(DenseMatrix features, std::vector<int> labels) {
    if (features.rows() != labels.size())
        throw std::invalid_argument("make_dataset: row/label count mismatch");
    LabeledDataset ds;
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    int max_label = -1;
    for (int l : ds.labels) {
        if (l < 0) throw std::invalid_argument("make_dataset: negative label");
        max_label = std::max(max_label, l);
    }
    for (int c = 0; c <= max_label; ++c) ds.class_names.push_back(std::to_string(c));
    for (std::size_t j = 0; j < ds.features.cols(); ++j)
        ds.feature_names.push_back("f" + std::to_string(j));
    return ds;
}

// Row-subset helper used by cross-validation.
inline LabeledDataset subset(const LabeledDataset& data, const std::vector<std::size_t>& rows) {
    LabeledDataset out;
    out.feature_names = data.feature_names;
    out.class_names = data.class_names;
    out.features = DenseMatrix(rows.size(), data.feature_count());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < data.feature_count(); ++j)
            out.features(i, j) = data.features(rows[i], j);
        out.labels.push_back(data.labels[rows[i]]);
    }
    return out;
}

}  // namespace discrim
