#include "confaudit/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/simgen.hpp"

namespace confaudit {

std::string to_string(CrVariant v) {
    switch (v) {
        case CrVariant::none: return "none";
        case CrVariant::confounds: return "confounds";
        case CrVariant::taco: return "taco";
    }
    return "?";
}

std::vector<double> CvResult::valid_scores() const {
    std::vector<double> out;
    for (const auto& s : scores) {
        if (s.valid) out.push_back(s.score);
    }
    return out;
}

ScoreSummary CvResult::summary() const {
    const auto v = valid_scores();
    return ScoreSummary::of(v);
}

std::vector<std::vector<int>> kfold_partition(int n, int folds, std::span<const int> strata,
                                              std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("kfold_partition needs folds >= 2");
    if (n < folds) throw DataError("kfold_partition: fewer rows than folds");
    Rng rng(seed);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));

    if (strata.empty()) {
        auto perm = rng.permutation(n);
        const int base = n / folds;
        const int extra = n % folds;
        int pos = 0;
        for (int f = 0; f < folds; ++f) {
            const int len = base + (f < extra ? 1 : 0);
            auto& fold = out[static_cast<std::size_t>(f)];
            fold.assign(perm.begin() + pos, perm.begin() + pos + len);
            pos += len;
        }
    } else {
        if (static_cast<int>(strata.size()) != n)
            throw InvalidArgument("kfold_partition: strata length mismatch");
        std::map<int, std::vector<int>> groups;
        for (int i = 0; i < n; ++i) groups[strata[static_cast<std::size_t>(i)]].push_back(i);
        int stratum_idx = 0;
        for (auto& [key, rows] : groups) {
            (void)key;
            if (static_cast<int>(rows.size()) < folds)
                throw DataError("stratified k-fold: a stratum has fewer rows than folds");
            rng.shuffle(rows);
            // Chunks differ by at most one row; rotating the start spreads
            // the larger chunks across folds.
            const int base = static_cast<int>(rows.size()) / folds;
            const int extra = static_cast<int>(rows.size()) % folds;
            int pos = 0;
            for (int c = 0; c < folds; ++c) {
                const int len = base + (c < extra ? 1 : 0);
                auto& fold = out[static_cast<std::size_t>((c + stratum_idx) % folds)];
                fold.insert(fold.end(), rows.begin() + pos, rows.begin() + pos + len);
                pos += len;
            }
            ++stratum_idx;
        }
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

namespace {

struct FoldEval {
    double score = 0.0;
    bool valid = false;
    std::string error;
    int tree_nodes = -1;
    FittedModel model;
    std::optional<ConfoundModel> cr;
    std::vector<double> test_scores;
    std::vector<double> test_y;
};

std::vector<int> all_rows(std::size_t n) {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

void apply_spec_param(ModelSpec& spec, const std::string& name, double value) {
    if (name == "max_depth") spec.max_depth = static_cast<int>(value);
    else if (name == "min_samples_leaf") spec.min_samples_leaf = static_cast<int>(value);
    else if (name == "n_trees") spec.n_trees = static_cast<int>(value);
    else if (name == "mtry") spec.mtry = static_cast<int>(value);
    else if (name == "ridge_lambda") spec.ridge_lambda = value;
    else if (name == "hidden_units") spec.hidden_units = static_cast<int>(value);
    else if (name == "epochs") spec.epochs = static_cast<int>(value);
    else if (name == "learning_rate") spec.learning_rate = value;
    else if (name == "batch_size") spec.batch_size = static_cast<int>(value);
    else throw InvalidArgument("inner search: unknown hyperparameter '" + name + "'");
}

double score_predictions(TargetKind task, std::span<const double> y_test,
                         std::span<const double> scores) {
    for (double s : scores) {
        if (!std::isfinite(s)) throw UndefinedMetric("model produced non-finite scores");
    }
    return task == TargetKind::classification ? aucroc(y_test, scores) : r2(y_test, scores);
}

// Grid search over the cartesian product of the parameter grid, scored by
// inner k-fold on the already-transformed training matrix. Ties keep the
// first combination in enumeration order.
ModelSpec select_by_inner_cv(const ModelSpec& base, const InnerSearch& search, const Matrix& x,
                             std::span<const double> y, TargetKind task,
                             std::span<const int> strata, std::uint64_t seed) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
    for (const auto& [name, vals] : search.grid) {
        if (vals.empty()) continue;
        names.push_back(name);
        values.push_back(vals);
    }
    if (names.empty()) return base;

    const auto folds = kfold_partition(static_cast<int>(x.rows()), search.inner_folds, strata,
                                       derive_seed(seed, seedtag::folds));
    std::vector<std::vector<int>> train_sets(folds.size());
    std::vector<char> in_test(x.rows());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::fill(in_test.begin(), in_test.end(), 0);
        for (int r : folds[f]) in_test[static_cast<std::size_t>(r)] = 1;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (!in_test[i]) train_sets[f].push_back(static_cast<int>(i));
        }
    }

    std::vector<std::size_t> idx(names.size(), 0);
    ModelSpec best = base;
    double best_score = -std::numeric_limits<double>::infinity();
    bool done = false;
    while (!done) {
        ModelSpec cand = base;
        for (std::size_t k = 0; k < names.size(); ++k)
            apply_spec_param(cand, names[k], values[k][idx[k]]);

        double sum = 0.0;
        int count = 0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            try {
                ModelSpec fold_spec = cand;
                fold_spec.seed =
                    derive_seed(cand.seed, seedtag::model, static_cast<std::uint64_t>(f));
                const Matrix x_tr = x.select_rows(train_sets[f]);
                const Matrix x_te = x.select_rows(folds[f]);
                const auto y_tr = select(y, train_sets[f]);
                const auto y_te = select(y, folds[f]);
                const auto fitted = fit_model(fold_spec, x_tr, y_tr, task);
                const auto scores = predict_scores(fitted, x_te);
                sum += score_predictions(task, y_te, scores);
                ++count;
            } catch (const Error&) {
                // a degenerate inner fold contributes nothing
            }
        }
        if (count > 0 && sum / count > best_score) {
            best_score = sum / count;
            best = cand;
        }

        for (std::size_t k = names.size();; --k) {
            if (k == 0) {
                done = true;
                break;
            }
            if (++idx[k - 1] < values[k - 1].size()) break;
            idx[k - 1] = 0;
        }
    }
    return best;
}

FoldEval evaluate_fold(const Dataset& data, std::span<const int> train_idx,
                       std::span<const int> test_idx, const PipelineSpec& p,
                       const std::optional<InnerSearch>& inner, std::uint64_t scheme_seed,
                       int repeat, int fold, const FoldProbe& probe, bool keep_artifacts) {
    FoldEval out;
    try {
        Dataset d_train = data.select_rows(train_idx);
        Dataset d_test = data.select_rows(test_idx);

        if (p.swap_per_fold) {
            Rng swap_rng(derive_seed(scheme_seed, seedtag::swap,
                                     static_cast<std::uint64_t>(repeat),
                                     static_cast<std::uint64_t>(fold)));
            const auto train_scope = all_rows(d_train.n_rows());
            for (std::size_t j = 0; j < d_train.n_features(); ++j)
                swap_two_values(d_train.features.col(j), train_scope, d_train.target, swap_rng);
            if (p.swap_scope == SwapScope::train_and_test) {
                const auto test_scope = all_rows(d_test.n_rows());
                for (std::size_t j = 0; j < d_test.n_features(); ++j)
                    swap_two_values(d_test.features.col(j), test_scope, d_test.target, swap_rng);
            }
        }

        if (p.standardize) {
            const auto rows = all_rows(d_train.n_rows());
            const auto std_fit = Standardizer::fit(d_train, rows);
            d_train = std_fit.apply(d_train);
            d_test = std_fit.apply(d_test);
        }

        Matrix x_train = std::move(d_train.features);
        Matrix x_test = std::move(d_test.features);
        if (p.cr_variant != CrVariant::none) {
            Matrix conf_train, conf_test;
            std::vector<std::string> conf_names;
            if (p.cr_variant == CrVariant::taco) {
                // the coded target itself is the single confound column
                conf_train = Matrix(d_train.n_rows(), 1);
                conf_test = Matrix(d_test.n_rows(), 1);
                std::copy(d_train.target.begin(), d_train.target.end(),
                          conf_train.col(0).begin());
                std::copy(d_test.target.begin(), d_test.target.end(),
                          conf_test.col(0).begin());
                conf_names = {"taco"};
            } else {
                if (d_train.n_confounds() == 0)
                    throw DataError("cr_variant=confounds requires at least one confound");
                conf_train = d_train.confounds;
                conf_test = d_test.confounds;
                conf_names = d_train.confound_names;
            }
            out.cr = fit_cr(x_train, conf_train, conf_names);
            auto tr = transform_cr(*out.cr, x_train, conf_train);
            auto te = transform_cr(*out.cr, x_test, conf_test);
            if (p.feature_mode == FeatureMode::x_hat_only) {
                x_train = std::move(tr.x_hat);
                x_test = std::move(te.x_hat);
            } else {
                x_train = std::move(tr.x_cr);
                x_test = std::move(te.x_cr);
            }
        } else if (p.feature_mode == FeatureMode::x_hat_only) {
            throw InvalidArgument("x_hat_only requires a CR variant");
        }

        ModelSpec spec = p.model;
        if (inner && !inner->grid.empty()) {
            std::vector<int> train_strata;
            if (data.target_kind == TargetKind::classification) {
                train_strata.reserve(d_train.n_rows());
                for (double t : d_train.target) train_strata.push_back(static_cast<int>(t));
            }
            spec = select_by_inner_cv(
                spec, *inner, x_train, d_train.target, data.target_kind, train_strata,
                derive_seed(scheme_seed, seedtag::model, static_cast<std::uint64_t>(repeat),
                            static_cast<std::uint64_t>(fold)));
        }
        spec.seed = derive_seed(p.model.seed, seedtag::model, static_cast<std::uint64_t>(repeat),
                                static_cast<std::uint64_t>(fold));

        out.model = fit_model(spec, x_train, d_train.target, data.target_kind);
        out.test_scores = predict_scores(out.model, x_test);
        out.score = score_predictions(data.target_kind, d_test.target, out.test_scores);
        out.valid = true;
        out.test_y = std::move(d_test.target);
        if (out.model.kind == ModelKind::tree)
            out.tree_nodes = static_cast<int>(out.model.nodes.size());

        if (probe) {
            FoldContext ctx{repeat,         fold,       train_idx, test_idx,
                            x_train,        x_test,     d_train.target,
                            out.test_y,     out.model,  out.cr ? &*out.cr : nullptr};
#pragma omp critical(confaudit_fold_probe)
            probe(ctx);
        }
        if (!keep_artifacts) {
            out.model = FittedModel{};
            out.cr.reset();
            out.test_scores.clear();
            out.test_y.clear();
        }
    } catch (const Error& e) {
        out.valid = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

CvResult run_cv(const Dataset& d, const PipelineSpec& p, const CVScheme& s,
                const FoldProbe& probe) {
    d.validate();
    p.model.validate();
    if (s.folds < 2) throw InvalidArgument("CVScheme needs folds >= 2");
    if (s.repeats < 1) throw InvalidArgument("CVScheme needs repeats >= 1");
    if (p.cr_variant == CrVariant::confounds && d.n_confounds() == 0)
        throw DataError("cr_variant=confounds requires a dataset with confounds");
    if (!s.strata.empty() && s.strata.size() != d.n_rows())
        throw InvalidArgument("CVScheme strata length mismatch");

    const Dataset encoded = p.encode ? one_hot_encode(d) : d;
    const int n = static_cast<int>(encoded.n_rows());

    std::vector<int> strata = s.strata;
    if (strata.empty() && s.stratified && d.target_kind == TargetKind::classification) {
        strata.reserve(encoded.target.size());
        for (double t : encoded.target) strata.push_back(static_cast<int>(t));
    }

    // Per-repeat inputs, precomputed serially: fold partitions and, for the
    // shuffle diagnostics, a fresh feature permutation per repeat.
    std::vector<std::vector<std::vector<int>>> partitions(static_cast<std::size_t>(s.repeats));
    std::vector<Dataset> shuffled;
    for (int r = 0; r < s.repeats; ++r) {
        partitions[static_cast<std::size_t>(r)] = kfold_partition(
            n, s.folds, strata,
            derive_seed(s.seed, seedtag::folds, static_cast<std::uint64_t>(r)));
        if (p.shuffle != ShuffleMode::none) {
            const std::uint64_t shuffle_rep =
                p.shuffle == ShuffleMode::single ? 0 : static_cast<std::uint64_t>(r);
            shuffled.push_back(
                shuffle_features(encoded, derive_seed(s.seed, seedtag::shuffle, shuffle_rep)));
        }
    }

    const int cells = s.repeats * s.folds;
    std::vector<FoldEval> evals(static_cast<std::size_t>(cells));

#pragma omp parallel for schedule(dynamic)
    for (long long cell = 0; cell < static_cast<long long>(cells); ++cell) {
        const int repeat = static_cast<int>(cell) / s.folds;
        const int fold = static_cast<int>(cell) % s.folds;
        const Dataset& data = p.shuffle != ShuffleMode::none
                                  ? shuffled[static_cast<std::size_t>(repeat)]
                                  : encoded;
        const auto& test_idx =
            partitions[static_cast<std::size_t>(repeat)][static_cast<std::size_t>(fold)];
        std::vector<char> in_test(static_cast<std::size_t>(n), 0);
        for (int r : test_idx) in_test[static_cast<std::size_t>(r)] = 1;
        std::vector<int> train_idx;
        train_idx.reserve(static_cast<std::size_t>(n) - test_idx.size());
        for (int i = 0; i < n; ++i) {
            if (!in_test[static_cast<std::size_t>(i)]) train_idx.push_back(i);
        }
        evals[static_cast<std::size_t>(cell)] =
            evaluate_fold(data, train_idx, test_idx, p, s.inner_search, s.seed, repeat, fold,
                          probe, /*keep_artifacts=*/false);
    }

    CvResult result;
    result.task = d.target_kind;
    result.metric_name = d.target_kind == TargetKind::classification ? "aucroc" : "r2";
    result.scores.resize(static_cast<std::size_t>(cells));
    for (int cell = 0; cell < cells; ++cell) {
        const auto& ev = evals[static_cast<std::size_t>(cell)];
        auto& fs = result.scores[static_cast<std::size_t>(cell)];
        fs.repeat = cell / s.folds;
        fs.fold = cell % s.folds;
        fs.score = ev.score;
        fs.valid = ev.valid;
        fs.error = ev.error;
        fs.tree_nodes = ev.tree_nodes;
    }
    return result;
}

HoldoutResult run_holdout(const Dataset& d, const PipelineSpec& p, double test_fraction,
                          std::uint64_t seed) {
    d.validate();
    const Dataset encoded = p.encode ? one_hot_encode(d) : d;
    const Dataset working =
        p.shuffle != ShuffleMode::none
            ? shuffle_features(encoded, derive_seed(seed, seedtag::shuffle))
            : encoded;
    const bool stratify = d.target_kind == TargetKind::classification;
    auto [train_idx, test_idx] = split_indices(working, test_fraction, seed, stratify);

    FoldEval ev = evaluate_fold(working, train_idx, test_idx, p, std::nullopt, seed, 0, 0,
                                nullptr, /*keep_artifacts=*/true);
    HoldoutResult out;
    out.score = ev.score;
    out.valid = ev.valid;
    out.error = ev.error;
    out.metric_name = d.target_kind == TargetKind::classification ? "aucroc" : "r2";
    out.model = std::move(ev.model);
    out.cr = std::move(ev.cr);
    out.train_rows = std::move(train_idx);
    out.test_rows = std::move(test_idx);
    out.test_scores = std::move(ev.test_scores);
    out.test_y = std::move(ev.test_y);
    return out;
}

}  // namespace confaudit
