#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "confaudit/matrix.hpp"

namespace confaudit {

enum class ColumnKind { continuous, binary, categorical };
enum class TargetKind { classification, regression };
enum class MissingPolicy { reject_file, drop_rows };

std::string to_string(ColumnKind k);
std::string to_string(TargetKind k);
std::optional<ColumnKind> column_kind_from_string(const std::string& s);

// Tabular dataset: feature matrix, target, confound matrix, per-column kind
// metadata. Categorical columns hold non-negative integer level codes whose
// labels live in the parallel *_levels vectors. Classification targets are
// coded 0/1 with the original labels kept in class_labels. Immutable by
// convention after construction; operations return new datasets.
struct Dataset {
    Matrix features;
    std::vector<std::string> feature_names;
    std::vector<ColumnKind> feature_kinds;
    std::vector<std::vector<std::string>> feature_levels;  // empty unless categorical

    std::vector<double> target;
    TargetKind target_kind = TargetKind::regression;
    std::vector<std::string> class_labels;  // size 2 for classification

    Matrix confounds;
    std::vector<std::string> confound_names;
    std::vector<ColumnKind> confound_kinds;
    std::vector<std::vector<std::string>> confound_levels;

    std::size_t n_rows() const { return target.size(); }
    std::size_t n_features() const { return features.cols(); }
    std::size_t n_confounds() const { return confounds.cols(); }

    // Enforces the structural invariants; throws DataError on violation.
    void validate() const;

    Dataset select_rows(std::span<const int> idx) const;

    // Stable FNV-1a digest of shape, names, kinds and target kind.
    std::string fingerprint() const;
};

struct LoadOptions {
    std::string target_col;
    std::vector<std::string> confound_cols;
    std::map<std::string, ColumnKind> kind_overrides;
    MissingPolicy missing = MissingPolicy::reject_file;
    // When unset the target kind is inferred: <=2 distinct values or a
    // non-numeric column means classification.
    std::optional<TargetKind> target_kind;
};

// RFC-4180-style CSV with a mandatory header row. Column kinds are inferred
// per column: <=2 distinct numeric values -> binary, any non-numeric cell ->
// categorical (levels coded in lexicographic label order), else continuous.
Dataset load_csv(const std::string& path, const LoadOptions& opts);

// Writes features, confounds and target back out as CSV. extra_cols are
// appended verbatim (used by the simulator for auxiliary flags).
void write_csv(const Dataset& d, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& extra_cols = {});

// Replaces each categorical column (features and confounds alike) with one
// indicator column per level, named <col>=<level>. Full encoding, no level
// dropped. Binary and continuous columns pass through.
Dataset one_hot_encode(const Dataset& d);

// Per-column centering/scaling for continuous feature and confound columns.
// Scale is the population standard deviation; zero-variance columns store
// scale 1 so they come out centered only.
struct Standardizer {
    struct ColStats {
        std::size_t col;
        double mean;
        double scale;
    };
    std::vector<ColStats> feature_stats;
    std::vector<ColStats> confound_stats;

    static Standardizer fit(const Dataset& d, std::span<const int> rows);
    Dataset apply(const Dataset& d) const;
};

// Undersamples the majority class to the minority count, without
// replacement. Row order of the kept rows is preserved.
Dataset balance_classes(const Dataset& d, std::uint64_t seed);

// Index-level split. Test size is round(n * fraction) with ties toward the
// larger test set. Stratified splits allocate per class by largest
// remainder.
std::pair<std::vector<int>, std::vector<int>> split_indices(const Dataset& d,
                                                            double test_fraction,
                                                            std::uint64_t seed,
                                                            bool stratify);

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed, bool stratify);

// Independently permutes each feature column across rows; target and
// confounds untouched.
Dataset shuffle_features(const Dataset& d, std::uint64_t seed);

}  // namespace confaudit
