#include "confaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "confaudit/error.hpp"
#include "confaudit/metrics.hpp"
#include "confaudit/rng.hpp"

namespace confaudit {

std::string to_string(AuditVariant v) {
    switch (v) {
        case AuditVariant::raw_x: return "raw_x";
        case AuditVariant::x_cr: return "x_cr";
        case AuditVariant::shuffled_x: return "shuffled_x";
        case AuditVariant::shuffled_x_cr: return "shuffled_x_cr";
        case AuditVariant::x_hat_only: return "x_hat_only";
    }
    return "?";
}

std::optional<AuditVariant> audit_variant_from_string(const std::string& s) {
    if (s == "raw_x") return AuditVariant::raw_x;
    if (s == "x_cr") return AuditVariant::x_cr;
    if (s == "shuffled_x") return AuditVariant::shuffled_x;
    if (s == "shuffled_x_cr") return AuditVariant::shuffled_x_cr;
    if (s == "x_hat_only") return AuditVariant::x_hat_only;
    return std::nullopt;
}

std::string to_string(VerdictLevel v) {
    switch (v) {
        case VerdictLevel::no_evidence: return "no_evidence";
        case VerdictLevel::leakage_suspected: return "leakage_suspected";
        case VerdictLevel::leakage_strong: return "leakage_strong";
    }
    return "?";
}

std::string ConfoundSource::describe() const {
    switch (mode) {
        case ConfoundSourceMode::user: return "user confounds";
        case ConfoundSourceMode::taco: return "taco (target as confound)";
        case ConfoundSourceMode::simulated: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "simulated confound, r=%g", r);
            return buf;
        }
    }
    return "?";
}

Dataset make_taco(const Dataset& d) {
    Dataset out = d;
    out.confounds = Matrix(d.n_rows(), 1);
    std::copy(d.target.begin(), d.target.end(), out.confounds.col(0).begin());
    out.confound_names = {"taco"};
    out.confound_kinds = {d.target_kind == TargetKind::classification ? ColumnKind::binary
                                                                      : ColumnKind::continuous};
    out.confound_levels = {{}};
    return out;
}

std::vector<double> simulate_confound(std::span<const double> target, double r,
                                      std::uint64_t seed, double tolerance, int max_retries) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("simulate_confound: r must be in (0, 1)");
    const std::size_t n = target.size();
    if (n < 3) throw InvalidArgument("simulate_confound needs at least 3 rows");

    double mean = 0.0;
    for (double t : target) mean += t;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double t : target) {
        const double d = t - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd <= 0.0) throw InvalidArgument("simulate_confound: constant target");

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (target[i] - mean) / sd;

    const double noise_scale = std::sqrt(1.0 - r * r);
    double best_err = std::numeric_limits<double>::infinity();
    double best_r = 0.0;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Rng rng(derive_seed(seed, seedtag::retry, static_cast<std::uint64_t>(attempt)));
        std::vector<double> c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = r * z[i] + noise_scale * rng.normal();
        const double achieved = pearson(c, std::vector<double>(target.begin(), target.end()));
        const double err = std::abs(achieved - r);
        if (err <= tolerance) return c;
        if (err < best_err) {
            best_err = err;
            best_r = achieved;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "simulate_confound: gave up after %d retries, closest correlation %.4f "
                  "for requested %.4f",
                  max_retries, best_r, r);
    throw DataError(buf);
}

namespace {

bool is_binary_column(std::span<const double> col) {
    std::set<double> vals;
    for (double v : col) {
        vals.insert(v);
        if (vals.size() > 2) return false;
    }
    for (double v : vals) {
        if (v != 0.0 && v != 1.0) return false;
    }
    return true;
}

std::optional<double> association(std::span<const double> a, std::span<const double> b) {
    try {
        return pearson(a, b);
    } catch (const UndefinedMetric&) {
        return std::nullopt;
    }
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - std::floor(pos);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::vector<AssociationRow> association_table(const Dataset& d) {
    std::vector<AssociationRow> rows;
    for (std::size_t c = 0; c < d.n_confounds(); ++c) {
        AssociationRow row;
        row.confound = d.confound_names[c];
        const auto conf = d.confounds.col(c);
        const bool conf_binary = d.confound_kinds[c] == ColumnKind::binary ||
                                 is_binary_column(conf);
        const bool target_binary = d.target_kind == TargetKind::classification;
        row.method = conf_binary || target_binary ? "point_biserial" : "pearson";

        if (const auto a = association(conf, d.target)) {
            row.target_association = *a;
            row.target_defined = true;
        }

        std::vector<double> feats(d.n_features());
        std::vector<char> defined(d.n_features(), 0);
#pragma omp parallel for schedule(static)
        for (long long j = 0; j < static_cast<long long>(d.n_features()); ++j) {
            const auto a = association(conf, d.features.col(static_cast<std::size_t>(j)));
            if (a) {
                feats[static_cast<std::size_t>(j)] = *a;
                defined[static_cast<std::size_t>(j)] = 1;
            }
        }
        std::vector<double> present;
        for (std::size_t j = 0; j < d.n_features(); ++j) {
            if (defined[j]) present.push_back(feats[j]);
        }
        std::sort(present.begin(), present.end());
        row.features_total = static_cast<int>(d.n_features());
        row.features_defined = static_cast<int>(present.size());
        if (!present.empty()) {
            row.min = present.front();
            row.q25 = quantile_sorted(present, 0.25);
            row.median = quantile_sorted(present, 0.5);
            row.q75 = quantile_sorted(present, 0.75);
            row.max = present.back();
        }
        rows.push_back(row);
    }
    return rows;
}

std::pair<VerdictLevel, std::vector<std::string>> decide_verdict(
    std::span<const VerdictEvidence> evidence) {
    bool any_pair = false;
    VerdictLevel level = VerdictLevel::no_evidence;
    std::vector<std::string> reasons;
    for (const auto& ev : evidence) {
        if (!ev.cr_vs_raw) continue;
        any_pair = true;
        if (ev.cr_vs_raw->decision != RopeDecision::meaningfully_higher) continue;

        level = std::max(level, VerdictLevel::leakage_suspected);
        reasons.push_back(ev.model + ": x_cr meaningfully higher than raw_x");
        if (ev.shufcr_vs_dummy &&
            ev.shufcr_vs_dummy->decision == RopeDecision::meaningfully_higher) {
            level = VerdictLevel::leakage_strong;
            reasons.push_back(ev.model + ": shuffled_x_cr meaningfully above dummy chance");
        }
        if (ev.xhat_vs_raw &&
            ev.xhat_vs_raw->decision == RopeDecision::meaningfully_higher) {
            level = VerdictLevel::leakage_strong;
            reasons.push_back(ev.model + ": x_hat_only meaningfully higher than raw_x");
        }
    }
    if (!any_pair)
        throw InvalidArgument(
            "verdict is inconclusive: no model has both raw_x and x_cr scores");
    return {level, std::move(reasons)};
}

const AuditCell* AuditReport::find_cell(AuditVariant v, const std::string& model) const {
    for (const auto& c : cells) {
        if (c.variant == v && c.model == model) return &c;
    }
    return nullptr;
}

namespace {

PipelineSpec pipeline_for(AuditVariant variant, const ModelSpec& model, CrVariant cr,
                          const AuditConfig& cfg) {
    PipelineSpec p;
    p.standardize = cfg.standardize;
    p.encode = cfg.encode;
    p.model = model;
    p.swap_per_fold = cfg.swap_per_fold;
    p.swap_scope = cfg.swap_scope;
    switch (variant) {
        case AuditVariant::raw_x:
            p.cr_variant = CrVariant::none;
            break;
        case AuditVariant::x_cr:
            p.cr_variant = cr;
            break;
        case AuditVariant::shuffled_x:
            p.cr_variant = CrVariant::none;
            p.shuffle = cfg.single_shuffle ? ShuffleMode::single : ShuffleMode::per_repeat;
            break;
        case AuditVariant::shuffled_x_cr:
            p.cr_variant = cr;
            p.shuffle = cfg.single_shuffle ? ShuffleMode::single : ShuffleMode::per_repeat;
            break;
        case AuditVariant::x_hat_only:
            p.cr_variant = cr;
            p.feature_mode = FeatureMode::x_hat_only;
            break;
    }
    return p;
}

// Paired fold scores restricted to folds valid on both sides, ordered by
// (repeat, fold).
bool paired_scores(const CvResult& a, const CvResult& b, std::vector<double>& sa,
                   std::vector<double>& sb) {
    if (a.scores.size() != b.scores.size()) return false;
    sa.clear();
    sb.clear();
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        if (!a.scores[i].valid || !b.scores[i].valid) continue;
        sa.push_back(a.scores[i].score);
        sb.push_back(b.scores[i].score);
    }
    return sa.size() >= 2;
}

}  // namespace

AuditReport run_audit(const Dataset& d, const ConfoundSource& source, const AuditConfig& cfg) {
    if (cfg.models.empty()) throw InvalidArgument("run_audit: no models requested");
    if (cfg.variants.empty()) throw InvalidArgument("run_audit: no variants requested");
    d.validate();

    // Resolve the confound source into a working dataset.
    Dataset working = d;
    CrVariant cr = CrVariant::confounds;
    switch (source.mode) {
        case ConfoundSourceMode::user:
            if (d.n_confounds() == 0)
                throw DataError("confound source 'user' needs confound columns in the data");
            break;
        case ConfoundSourceMode::taco:
            cr = CrVariant::taco;
            break;
        case ConfoundSourceMode::simulated: {
            working.confounds = Matrix(d.n_rows(), 1);
            const auto c = simulate_confound(d.target, source.r,
                                             derive_seed(cfg.seed, seedtag::confound),
                                             source.tolerance, source.max_retries);
            std::copy(c.begin(), c.end(), working.confounds.col(0).begin());
            char name[32];
            std::snprintf(name, sizeof(name), "sim_r%g", source.r);
            working.confound_names = {name};
            working.confound_kinds = {ColumnKind::continuous};
            working.confound_levels = {{}};
            break;
        }
    }

    AuditReport report;
    report.dataset_fingerprint = working.fingerprint();
    report.confound_source = source.describe();
    report.metric_name =
        d.target_kind == TargetKind::classification ? "aucroc" : "r2";
    report.seed = cfg.seed;

    CVScheme scheme = cfg.scheme;
    scheme.seed = derive_seed(cfg.seed, seedtag::folds);

    // The dummy chance reference is always evaluated, on raw features.
    ModelSpec dummy_spec;
    dummy_spec.kind = ModelKind::dummy;
    CvResult dummy_cv =
        run_cv(working, pipeline_for(AuditVariant::raw_x, dummy_spec, cr, cfg), scheme);

    // Variant x model grid. Cells are independent; each one is internally
    // parallel over folds, so the grid itself stays a serial loop.
    for (const auto variant : cfg.variants) {
        for (const auto& model : cfg.models) {
            AuditCell cell;
            cell.variant = variant;
            cell.model = to_string(model.kind);
            try {
                cell.cv = run_cv(working, pipeline_for(variant, model, cr, cfg), scheme);
                cell.valid = true;
                int invalid = 0;
                for (const auto& f : cell.cv.scores) {
                    if (!f.valid) ++invalid;
                }
                if (invalid == static_cast<int>(cell.cv.scores.size())) {
                    cell.valid = false;
                    cell.error = "all folds failed: " + cell.cv.scores.front().error;
                }
            } catch (const Error& e) {
                cell.valid = false;
                cell.error = e.what();
            }
            report.cells.push_back(std::move(cell));
        }
    }
    {
        AuditCell cell;
        cell.variant = AuditVariant::raw_x;
        cell.model = "dummy";
        cell.cv = std::move(dummy_cv);
        cell.valid = true;
        report.cells.push_back(std::move(cell));
    }

    // ROPE comparisons per model: x_cr vs raw_x, x_hat_only vs raw_x,
    // shuffled_x_cr vs dummy chance.
    const auto* dummy_cell = report.find_cell(AuditVariant::raw_x, "dummy");
    std::vector<VerdictEvidence> evidence;
    for (const auto& model : cfg.models) {
        const std::string name = to_string(model.kind);
        VerdictEvidence ev;
        ev.model = name;
        auto compare = [&](const char* label, const AuditCell* a, const AuditCell* b)
            -> std::optional<RopeResult> {
            RopeComparison cmp;
            cmp.label = label;
            cmp.model = name;
            if (!a || !b || !a->valid || !b->valid) {
                cmp.error = "missing or invalid cells";
                report.comparisons.push_back(cmp);
                return std::nullopt;
            }
            std::vector<double> sa, sb;
            if (!paired_scores(a->cv, b->cv, sa, sb)) {
                cmp.error = "fewer than 2 paired valid folds";
                report.comparisons.push_back(cmp);
                return std::nullopt;
            }
            RopeConfig rope = cfg.rope;
            rope.rho = 1.0 / static_cast<double>(scheme.folds);
            cmp.result = rope_compare(sa, sb, rope);
            cmp.valid = true;
            report.comparisons.push_back(cmp);
            return cmp.result;
        };

        ev.cr_vs_raw = compare("x_cr_vs_raw_x", report.find_cell(AuditVariant::x_cr, name),
                               report.find_cell(AuditVariant::raw_x, name));
        ev.xhat_vs_raw =
            compare("x_hat_only_vs_raw_x", report.find_cell(AuditVariant::x_hat_only, name),
                    report.find_cell(AuditVariant::raw_x, name));
        ev.shufcr_vs_dummy =
            compare("shuffled_x_cr_vs_dummy",
                    report.find_cell(AuditVariant::shuffled_x_cr, name), dummy_cell);
        evidence.push_back(std::move(ev));
    }

    report.associations = association_table(working);

    try {
        auto [level, reasons] = decide_verdict(evidence);
        report.verdict = level;
        report.verdict_reasons = std::move(reasons);
    } catch (const InvalidArgument&) {
        report.verdict = VerdictLevel::no_evidence;
        report.verdict_reasons = {"inconclusive: raw_x and x_cr were not both evaluated"};
    }

    return report;
}

}  // namespace confaudit
