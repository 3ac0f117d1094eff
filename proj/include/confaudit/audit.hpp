#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confaudit/cv.hpp"
#include "confaudit/dataset.hpp"
#include "confaudit/models.hpp"
#include "confaudit/rope.hpp"

namespace confaudit {

// The five evaluation variants of the leakage framework.
enum class AuditVariant { raw_x, x_cr, shuffled_x, shuffled_x_cr, x_hat_only };

std::string to_string(AuditVariant v);
std::optional<AuditVariant> audit_variant_from_string(const std::string& s);

enum class ConfoundSourceMode { user, taco, simulated };

struct ConfoundSource {
    ConfoundSourceMode mode = ConfoundSourceMode::taco;
    double r = 0.5;            // simulated: requested target correlation
    double tolerance = 0.02;   // simulated: retry band around r
    int max_retries = 100;
    std::string describe() const;
};

enum class VerdictLevel { no_evidence, leakage_suspected, leakage_strong };

std::string to_string(VerdictLevel v);

struct AuditConfig {
    std::vector<ModelSpec> models;
    CVScheme scheme;
    std::vector<AuditVariant> variants = {AuditVariant::raw_x, AuditVariant::x_cr,
                                          AuditVariant::shuffled_x,
                                          AuditVariant::shuffled_x_cr,
                                          AuditVariant::x_hat_only};
    RopeConfig rope;
    bool single_shuffle = false;  // one permutation for all repeats instead of per-repeat
    bool swap_per_fold = false;
    SwapScope swap_scope = SwapScope::train_only;
    bool standardize = true;
    bool encode = true;
    std::uint64_t seed = 0;
};

struct AuditCell {
    AuditVariant variant;
    std::string model;  // model kind name
    CvResult cv;
    bool valid = false;
    std::string error;
};

struct RopeComparison {
    std::string label;   // e.g. "x_cr_vs_raw_x"
    std::string model;
    RopeResult result;
    bool valid = false;
    std::string error;
};

struct AssociationRow {
    std::string confound;
    std::string method;  // "pearson" or "point_biserial"
    double target_association = 0.0;
    bool target_defined = false;
    // distribution of per-feature associations
    double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
    int features_defined = 0;
    int features_total = 0;
};

struct AuditReport {
    std::string dataset_fingerprint;
    std::string confound_source;
    std::string metric_name;
    std::uint64_t seed = 0;
    std::vector<AuditCell> cells;
    std::vector<RopeComparison> comparisons;
    std::vector<AssociationRow> associations;
    VerdictLevel verdict = VerdictLevel::no_evidence;
    std::vector<std::string> verdict_reasons;
    nlohmann::json config_echo;

    const AuditCell* find_cell(AuditVariant v, const std::string& model) const;

    nlohmann::json to_json() const;                // schema_version 1
    static AuditReport from_json(const nlohmann::json& j);
    std::string to_markdown() const;
    std::string fold_scores_csv() const;           // repeat,fold,variant,model,score
};

// Replaces the confound matrix by a single column equal to the coded target.
Dataset make_taco(const Dataset& d);

// c = r * z(y) + sqrt(1 - r^2) * eps, resampled until the empirical Pearson
// correlation with the coded target lands within tolerance of r.
std::vector<double> simulate_confound(std::span<const double> target, double r,
                                      std::uint64_t seed, double tolerance = 0.02,
                                      int max_retries = 100);

// Association overview: each confound against the target and against every
// feature (Pearson, or point-biserial when one side is binary). Degenerate
// pairs are marked undefined rather than failing.
std::vector<AssociationRow> association_table(const Dataset& d);

// Evidence for the verdict rule, one entry per model.
struct VerdictEvidence {
    std::string model;
    std::optional<RopeResult> cr_vs_raw;        // x_cr against raw_x
    std::optional<RopeResult> xhat_vs_raw;      // x_hat_only against raw_x
    std::optional<RopeResult> shufcr_vs_dummy;  // shuffled_x_cr against dummy chance
};

// leakage_suspected when x_cr is meaningfully higher than raw_x for any
// model; upgraded to leakage_strong when additionally the shuffled-CR
// variant beats dummy chance or x_hat_only beats raw_x. Throws
// InvalidArgument when no model has both required cells.
std::pair<VerdictLevel, std::vector<std::string>> decide_verdict(
    std::span<const VerdictEvidence> evidence);

// Full audit: every requested variant x model cell through run_cv, the
// dummy chance reference, ROPE comparisons, association table and verdict.
AuditReport run_audit(const Dataset& d, const ConfoundSource& source, const AuditConfig& cfg);

}  // namespace confaudit
