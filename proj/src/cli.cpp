#include "confaudit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "confaudit/audit.hpp"
#include "confaudit/error.hpp"
#include "confaudit/histogram.hpp"
#include "confaudit/parallel.hpp"
#include "confaudit/simgen.hpp"

namespace confaudit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitLeakage = 3;

void print_error(const std::string& msg) { std::cerr << "confaudit: error: " << msg << "\n"; }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
}

// All audit settings in one flat struct: the JSON config file carries the
// same keys as the long flags, and explicitly passed flags win.
struct AuditOpts {
    std::string config;
    std::string data;
    std::string sim;
    int n = 1000;
    int p = 1;
    std::string dist = "normal";
    double noise_sd = 0.5;
    double mix_center_low = 0.0;
    double mix_center_high = 6.0;
    double mix_sd = 0.5;
    double extreme_fraction = 0.05;
    double extreme_center = 4.0;
    double extreme_sd = 0.2;
    int decimals = 1;

    std::string target;
    std::string confounds;  // comma separated column names
    std::string kinds;      // comma separated col=kind overrides
    std::string task = "auto";
    std::string missing = "reject_file";
    bool balance = false;

    bool taco = false;
    double simulated_confound = 0.0;  // >0 selects the simulated source
    double sim_confound_tolerance = 0.02;
    int sim_confound_retries = 100;

    std::string models = "tree";
    int max_depth = 0;  // 0 = unlimited
    int min_samples_leaf = 1;
    int n_trees = 100;
    int mtry = 0;  // 0 = rule default
    bool no_bootstrap = false;
    double ridge_lambda = 1e-8;
    int hidden_units = 100;
    int epochs = 100;
    double learning_rate = 0.01;
    int batch_size = 32;

    int repeats = 10;
    int folds = 5;
    bool no_stratify = false;
    bool stratify_cells = false;
    std::string inner_search;

    double rope_halfwidth = 0.01;
    double rope_threshold = 0.95;
    std::string variants;

    bool single_shuffle = false;
    bool swap_per_fold = false;
    std::string swap_scope = "train";
    bool no_standardize = false;
    bool no_encode = false;

    std::uint64_t seed = 0;
    std::string out = ".";
    bool fail_on_leakage = false;
    int jobs = -1;  // -1: env var or all cores
};

void add_audit_options(CLI::App* cmd, AuditOpts& o) {
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--data", o.data, "input CSV path");
    cmd->add_option("--sim", o.sim,
                    "generate the input instead: walkthrough|extremes|skewed|swap|rounded");
    cmd->add_option("--n", o.n, "simulation rows");
    cmd->add_option("--p", o.p, "simulation feature count (skewed)");
    cmd->add_option("--dist", o.dist, "simulation feature distribution: normal|chi2_df3");
    cmd->add_option("--noise-sd", o.noise_sd, "walkthrough target noise sd");
    cmd->add_option("--mix-center-low", o.mix_center_low, "walkthrough mixture center (low)");
    cmd->add_option("--mix-center-high", o.mix_center_high, "walkthrough mixture center (high)");
    cmd->add_option("--mix-sd", o.mix_sd, "walkthrough mixture sd");
    cmd->add_option("--extreme-fraction", o.extreme_fraction, "extremes cluster fraction");
    cmd->add_option("--extreme-center", o.extreme_center, "extremes cluster center");
    cmd->add_option("--extreme-sd", o.extreme_sd, "extremes cluster sd");
    cmd->add_option("--decimals", o.decimals, "rounded-feature decimals");

    cmd->add_option("--target", o.target, "target column name (CSV input)");
    cmd->add_option("--confounds", o.confounds, "comma-separated confound column names");
    cmd->add_option("--kinds", o.kinds,
                    "kind overrides col=continuous|binary|categorical, comma-separated");
    cmd->add_option("--task", o.task, "auto|classification|regression");
    cmd->add_option("--missing", o.missing, "missing-value policy: reject_file|drop_rows");
    cmd->add_flag("--balance", o.balance, "undersample the majority class first");

    cmd->add_flag("--taco", o.taco, "use the target itself as the confound");
    cmd->add_option("--simulated-confound", o.simulated_confound,
                    "simulate a confound with this target correlation (0,1)");
    cmd->add_option("--sim-confound-tolerance", o.sim_confound_tolerance,
                    "accepted deviation from the requested correlation");
    cmd->add_option("--sim-confound-retries", o.sim_confound_retries,
                    "resampling attempts before giving up");

    cmd->add_option("--models", o.models,
                    "comma-separated: dummy,linear,logistic,tree,forest,mlp");
    cmd->add_option("--max-depth", o.max_depth, "tree depth limit, 0 = unlimited");
    cmd->add_option("--min-samples-leaf", o.min_samples_leaf, "minimum rows per leaf");
    cmd->add_option("--n-trees", o.n_trees, "forest size");
    cmd->add_option("--mtry", o.mtry, "features tried per split, 0 = rule default");
    cmd->add_flag("--no-bootstrap", o.no_bootstrap, "disable forest bootstrap sampling");
    cmd->add_option("--ridge-lambda", o.ridge_lambda, "ridge term for linear/logistic");
    cmd->add_option("--hidden-units", o.hidden_units, "mlp hidden layer width");
    cmd->add_option("--epochs", o.epochs, "mlp training epochs");
    cmd->add_option("--learning-rate", o.learning_rate, "mlp learning rate");
    cmd->add_option("--batch-size", o.batch_size, "mlp minibatch size");

    cmd->add_option("--repeats", o.repeats, "CV repeats");
    cmd->add_option("--folds", o.folds, "CV folds");
    cmd->add_flag("--no-stratify", o.no_stratify, "disable stratified folds");
    cmd->add_flag("--stratify-cells", o.stratify_cells,
                  "stratify folds on target x binary-feature cells");
    cmd->add_option("--inner-search", o.inner_search,
                    "inner-CV grid, e.g. 'max_depth=2,4,8;min_samples_leaf=1,5'");

    cmd->add_option("--rope-halfwidth", o.rope_halfwidth, "ROPE half-width in score units");
    cmd->add_option("--rope-threshold", o.rope_threshold, "ROPE decision threshold");
    cmd->add_option("--variants", o.variants,
                    "comma-separated subset of raw_x,x_cr,shuffled_x,shuffled_x_cr,x_hat_only");

    cmd->add_flag("--single-shuffle", o.single_shuffle,
                  "one shuffle permutation for all repeats");
    cmd->add_flag("--swap-per-fold", o.swap_per_fold,
                  "swap two distinct feature values within each training fold");
    cmd->add_option("--swap-scope", o.swap_scope, "train|train_and_test");
    cmd->add_flag("--no-standardize", o.no_standardize, "skip standardization");
    cmd->add_flag("--no-encode", o.no_encode, "skip one-hot encoding");

    cmd->add_option("--seed", o.seed, "run seed (mandatory, no wall-clock default)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--fail-on-leakage", o.fail_on_leakage,
                  "exit 3 when the verdict is leakage_suspected or worse");
    cmd->add_option("--jobs", o.jobs, "worker threads, 0 = all cores");
}

// Config-file merge: any option the user did not pass on the command line
// takes its value from the JSON config when present.
void merge_config(const CLI::App* cmd, const json& cfg, AuditOpts& o) {
    auto take = [&](const char* flag, const char* key, auto& target) {
        using T = std::decay_t<decltype(target)>;
        const auto* opt = cmd->get_option(flag);
        if (opt && opt->count() > 0) return;
        if (!cfg.contains(key)) return;
        target = cfg.at(key).get<T>();
    };
    take("--data", "data", o.data);
    take("--sim", "sim", o.sim);
    take("--n", "n", o.n);
    take("--p", "p", o.p);
    take("--dist", "dist", o.dist);
    take("--noise-sd", "noise_sd", o.noise_sd);
    take("--mix-center-low", "mix_center_low", o.mix_center_low);
    take("--mix-center-high", "mix_center_high", o.mix_center_high);
    take("--mix-sd", "mix_sd", o.mix_sd);
    take("--extreme-fraction", "extreme_fraction", o.extreme_fraction);
    take("--extreme-center", "extreme_center", o.extreme_center);
    take("--extreme-sd", "extreme_sd", o.extreme_sd);
    take("--decimals", "decimals", o.decimals);
    take("--target", "target", o.target);
    take("--confounds", "confounds", o.confounds);
    take("--kinds", "kinds", o.kinds);
    take("--task", "task", o.task);
    take("--missing", "missing", o.missing);
    take("--balance", "balance", o.balance);
    take("--taco", "taco", o.taco);
    take("--simulated-confound", "simulated_confound", o.simulated_confound);
    take("--sim-confound-tolerance", "sim_confound_tolerance", o.sim_confound_tolerance);
    take("--sim-confound-retries", "sim_confound_retries", o.sim_confound_retries);
    take("--models", "models", o.models);
    take("--max-depth", "max_depth", o.max_depth);
    take("--min-samples-leaf", "min_samples_leaf", o.min_samples_leaf);
    take("--n-trees", "n_trees", o.n_trees);
    take("--mtry", "mtry", o.mtry);
    take("--no-bootstrap", "no_bootstrap", o.no_bootstrap);
    take("--ridge-lambda", "ridge_lambda", o.ridge_lambda);
    take("--hidden-units", "hidden_units", o.hidden_units);
    take("--epochs", "epochs", o.epochs);
    take("--learning-rate", "learning_rate", o.learning_rate);
    take("--batch-size", "batch_size", o.batch_size);
    take("--repeats", "repeats", o.repeats);
    take("--folds", "folds", o.folds);
    take("--no-stratify", "no_stratify", o.no_stratify);
    take("--stratify-cells", "stratify_cells", o.stratify_cells);
    take("--inner-search", "inner_search", o.inner_search);
    take("--rope-halfwidth", "rope_halfwidth", o.rope_halfwidth);
    take("--rope-threshold", "rope_threshold", o.rope_threshold);
    take("--variants", "variants", o.variants);
    take("--single-shuffle", "single_shuffle", o.single_shuffle);
    take("--swap-per-fold", "swap_per_fold", o.swap_per_fold);
    take("--swap-scope", "swap_scope", o.swap_scope);
    take("--no-standardize", "no_standardize", o.no_standardize);
    take("--no-encode", "no_encode", o.no_encode);
    take("--seed", "seed", o.seed);
    take("--out", "out", o.out);
    take("--fail-on-leakage", "fail_on_leakage", o.fail_on_leakage);
    take("--jobs", "jobs", o.jobs);
}

json echo_config(const AuditOpts& o) {
    json j;
    j["data"] = o.data;
    j["sim"] = o.sim;
    j["n"] = o.n;
    j["p"] = o.p;
    j["dist"] = o.dist;
    j["target"] = o.target;
    j["confounds"] = o.confounds;
    j["kinds"] = o.kinds;
    j["task"] = o.task;
    j["missing"] = o.missing;
    j["balance"] = o.balance;
    j["taco"] = o.taco;
    j["simulated_confound"] = o.simulated_confound;
    j["models"] = o.models;
    j["max_depth"] = o.max_depth;
    j["min_samples_leaf"] = o.min_samples_leaf;
    j["n_trees"] = o.n_trees;
    j["mtry"] = o.mtry;
    j["no_bootstrap"] = o.no_bootstrap;
    j["ridge_lambda"] = o.ridge_lambda;
    j["hidden_units"] = o.hidden_units;
    j["epochs"] = o.epochs;
    j["learning_rate"] = o.learning_rate;
    j["batch_size"] = o.batch_size;
    j["repeats"] = o.repeats;
    j["folds"] = o.folds;
    j["no_stratify"] = o.no_stratify;
    j["stratify_cells"] = o.stratify_cells;
    j["inner_search"] = o.inner_search;
    j["rope_halfwidth"] = o.rope_halfwidth;
    j["rope_threshold"] = o.rope_threshold;
    j["variants"] = o.variants;
    j["single_shuffle"] = o.single_shuffle;
    j["swap_per_fold"] = o.swap_per_fold;
    j["swap_scope"] = o.swap_scope;
    j["no_standardize"] = o.no_standardize;
    j["no_encode"] = o.no_encode;
    j["seed"] = o.seed;
    j["fail_on_leakage"] = o.fail_on_leakage;
    return j;
}

SimSpec sim_spec_from_opts(const std::string& kind_str, const AuditOpts& o) {
    const auto kind = sim_kind_from_string(kind_str);
    if (!kind) throw InvalidArgument("unknown simulation kind '" + kind_str + "'");
    SimSpec s;
    s.kind = *kind;
    s.n = o.n;
    s.seed = o.seed;
    s.p = o.p;
    if (o.dist == "chi2_df3") s.dist = FeatureDist::chi2_df3;
    else if (o.dist == "normal") s.dist = FeatureDist::normal;
    else throw InvalidArgument("unknown distribution '" + o.dist + "'");
    s.noise_sd = o.noise_sd;
    s.mix_center_low = o.mix_center_low;
    s.mix_center_high = o.mix_center_high;
    s.mix_sd = o.mix_sd;
    s.extreme_fraction = o.extreme_fraction;
    s.extreme_center = o.extreme_center;
    s.extreme_sd = o.extreme_sd;
    s.decimals = o.decimals;
    return s;
}

Dataset load_audit_dataset(const AuditOpts& o) {
    if (!o.data.empty() && !o.sim.empty())
        throw InvalidArgument("choose exactly one of --data and --sim");
    if (o.data.empty() && o.sim.empty())
        throw InvalidArgument("an input is required: --data CSV or --sim KIND");

    if (!o.sim.empty()) {
        auto result = generate(sim_spec_from_opts(o.sim, o));
        // rounded kind: the audit runs on the rounded twin, that is the
        // variant the mechanism is about
        if (result.rounded_twin) return *result.rounded_twin;
        return result.data;
    }

    if (o.target.empty()) throw InvalidArgument("--target is required with --data");
    LoadOptions lo;
    lo.target_col = o.target;
    lo.confound_cols = split_list(o.confounds);
    if (o.missing == "reject_file") lo.missing = MissingPolicy::reject_file;
    else if (o.missing == "drop_rows") lo.missing = MissingPolicy::drop_rows;
    else throw InvalidArgument("unknown missing policy '" + o.missing + "'");
    if (o.task == "classification") lo.target_kind = TargetKind::classification;
    else if (o.task == "regression") lo.target_kind = TargetKind::regression;
    else if (o.task != "auto") throw InvalidArgument("unknown task '" + o.task + "'");
    for (const auto& spec : split_list(o.kinds)) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("kind override must look like col=kind: " + spec);
        const auto kind = column_kind_from_string(spec.substr(eq + 1));
        if (!kind) throw InvalidArgument("unknown column kind in '" + spec + "'");
        lo.kind_overrides[spec.substr(0, eq)] = *kind;
    }
    return load_csv(o.data, lo);
}

InnerSearch parse_inner_search(const std::string& s) {
    InnerSearch search;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ';')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("inner search entries look like name=v1,v2: " + part);
        std::vector<double> vals;
        for (const auto& v : split_list(part.substr(eq + 1))) vals.push_back(std::stod(v));
        if (vals.empty()) throw InvalidArgument("inner search grid for '" + part + "' is empty");
        search.grid[part.substr(0, eq)] = std::move(vals);
    }
    return search;
}

std::vector<int> cell_strata(const Dataset& d, int folds) {
    (void)folds;
    std::vector<std::size_t> binary_cols;
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        if (d.feature_kinds[j] == ColumnKind::binary) binary_cols.push_back(j);
        if (binary_cols.size() >= 10) break;  // 2^10 cells is already far too fine
    }
    std::vector<int> strata(d.n_rows());
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        int label = d.target_kind == TargetKind::classification
                        ? static_cast<int>(d.target[i])
                        : 0;
        for (std::size_t b : binary_cols) {
            label = label * 2 + (d.features(i, b) != 0.0 ? 1 : 0);
        }
        strata[i] = label;
    }
    return strata;
}

int cmd_audit(const CLI::App* cmd, AuditOpts o) {
    if (!o.config.empty()) merge_config(cmd, load_json_file(o.config), o);
    if (cmd->get_option("--seed")->count() == 0 &&
        (o.config.empty() || !load_json_file(o.config).contains("seed")))
        throw InvalidArgument("--seed is mandatory; there is no wall-clock default");

    if (o.jobs < 0) {
        const char* env = std::getenv("CONFOUND_AUDIT_JOBS");
        o.jobs = env ? std::atoi(env) : 0;
    }
    set_global_jobs(o.jobs);

    Dataset data = load_audit_dataset(o);
    if (o.balance) data = balance_classes(data, derive_seed(o.seed, seedtag::balance));

    ConfoundSource source;
    if (o.taco) {
        source.mode = ConfoundSourceMode::taco;
    } else if (o.simulated_confound > 0.0) {
        source.mode = ConfoundSourceMode::simulated;
        source.r = o.simulated_confound;
        source.tolerance = o.sim_confound_tolerance;
        source.max_retries = o.sim_confound_retries;
    } else if (data.n_confounds() > 0) {
        source.mode = ConfoundSourceMode::user;
    } else {
        throw InvalidArgument(
            "no confound source: pass --taco, --simulated-confound R, or --confounds");
    }

    AuditConfig cfg;
    cfg.seed = o.seed;
    cfg.rope.halfwidth = o.rope_halfwidth;
    cfg.rope.decision_threshold = o.rope_threshold;
    cfg.single_shuffle = o.single_shuffle;
    cfg.swap_per_fold = o.swap_per_fold;
    if (o.swap_scope == "train") cfg.swap_scope = SwapScope::train_only;
    else if (o.swap_scope == "train_and_test") cfg.swap_scope = SwapScope::train_and_test;
    else throw InvalidArgument("unknown swap scope '" + o.swap_scope + "'");
    cfg.standardize = !o.no_standardize;
    cfg.encode = !o.no_encode;

    cfg.scheme.repeats = o.repeats;
    cfg.scheme.folds = o.folds;
    cfg.scheme.stratified = !o.no_stratify;
    if (o.stratify_cells) cfg.scheme.strata = cell_strata(data, o.folds);
    if (!o.inner_search.empty()) cfg.scheme.inner_search = parse_inner_search(o.inner_search);

    for (const auto& name : split_list(o.models)) {
        const auto kind = model_kind_from_string(name);
        if (!kind) throw InvalidArgument("unknown model '" + name + "'");
        ModelSpec spec;
        spec.kind = *kind;
        if (o.max_depth > 0) spec.max_depth = o.max_depth;
        spec.min_samples_leaf = o.min_samples_leaf;
        spec.n_trees = o.n_trees;
        if (o.mtry > 0) spec.mtry = o.mtry;
        spec.bootstrap = !o.no_bootstrap;
        spec.ridge_lambda = o.ridge_lambda;
        spec.hidden_units = o.hidden_units;
        spec.epochs = o.epochs;
        spec.learning_rate = o.learning_rate;
        spec.batch_size = o.batch_size;
        spec.seed = derive_seed(o.seed, seedtag::model);
        cfg.models.push_back(spec);
    }
    if (cfg.models.empty()) throw InvalidArgument("--models must name at least one model");

    if (!o.variants.empty()) {
        cfg.variants.clear();
        for (const auto& name : split_list(o.variants)) {
            const auto v = audit_variant_from_string(name);
            if (!v) throw InvalidArgument("unknown variant '" + name + "'");
            cfg.variants.push_back(*v);
        }
    }

    AuditReport report = run_audit(data, source, cfg);
    report.config_echo = echo_config(o);

    fs::create_directories(o.out);
    const auto base = fs::path(o.out);
    write_file((base / "report.json").string(), report.to_json().dump(2) + "\n");
    write_file((base / "report.md").string(), report.to_markdown());
    write_file((base / "fold_scores.csv").string(), report.fold_scores_csv());

    std::cout << "verdict: " << to_string(report.verdict) << "\n";
    for (const auto& reason : report.verdict_reasons) std::cout << "  - " << reason << "\n";
    std::cout << "report: " << (base / "report.json").string() << "\n";

    if (o.fail_on_leakage && report.verdict != VerdictLevel::no_evidence) return kExitLeakage;
    return kExitOk;
}

struct SimulateOpts {
    std::string kind;
    AuditOpts params;  // reuses the simulation parameter fields and seed
    std::string out;
};

int cmd_simulate(const CLI::App* cmd, SimulateOpts& so) {
    if (cmd->get_option("--seed")->count() == 0)
        throw InvalidArgument("--seed is mandatory; there is no wall-clock default");
    const SimSpec spec = sim_spec_from_opts(so.kind, so.params);
    auto result = generate(spec);

    const std::string base = so.out.empty() ? to_string(spec.kind) : so.out;
    if (spec.kind == SimKind::rounded_feature) {
        write_csv(result.data, base + "_raw.csv");
        write_csv(*result.rounded_twin, base + "_rounded.csv");
        std::cout << "wrote " << base << "_raw.csv, " << base << "_rounded.csv\n";
    } else if (spec.kind == SimKind::opposing_extremes) {
        std::vector<double> flags(result.extreme_rows.begin(), result.extreme_rows.end());
        write_csv(result.data, base + ".csv", {{"is_extreme", flags}});
        std::cout << "wrote " << base << ".csv\n";
    } else {
        write_csv(result.data, base + ".csv");
        std::cout << "wrote " << base << ".csv\n";
    }
    write_file(base + ".json", spec.to_json().dump(2) + "\n");
    return kExitOk;
}

struct ReportOpts {
    std::string report_path;
    std::string format = "md";
    std::string histograms;  // "feature,confound"
    std::string data;
    std::string target;
    std::string confounds;
    std::string task = "auto";
    int bins = 30;
    std::string out;
};

int cmd_report(ReportOpts& ro) {
    if (!ro.histograms.empty()) {
        const auto parts = split_list(ro.histograms);
        if (parts.size() != 2)
            throw InvalidArgument("--histograms expects FEATURE,CONFOUND");
        if (ro.data.empty() || ro.target.empty() || ro.confounds.empty())
            throw InvalidArgument("histogram mode needs --data, --target and --confounds");
        AuditOpts lo;
        lo.data = ro.data;
        lo.target = ro.target;
        lo.confounds = ro.confounds;
        lo.task = ro.task;
        const Dataset d = load_audit_dataset(lo);
        const auto csv = histogram_csv(d, parts[0], parts[1], ro.bins);
        const std::string out = ro.out.empty() ? "histograms.csv" : ro.out;
        write_file(out, csv);
        std::cout << "wrote " << out << "\n";
        return kExitOk;
    }

    if (ro.report_path.empty())
        throw InvalidArgument("pass a report.json path or --histograms");
    const AuditReport report = AuditReport::from_json(load_json_file(ro.report_path));
    const auto stem = fs::path(ro.report_path).stem().string();
    if (ro.format == "md") {
        const std::string out = ro.out.empty() ? stem + ".md" : ro.out;
        write_file(out, report.to_markdown());
        std::cout << "wrote " << out << "\n";
    } else if (ro.format == "csv") {
        const std::string out = ro.out.empty() ? stem + ".csv" : ro.out;
        write_file(out, report.fold_scores_csv());
        std::cout << "wrote " << out << "\n";
    } else {
        throw InvalidArgument("unknown format '" + ro.format + "'");
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"CV-consistent confound regression and leakage auditing for tabular ML"};
    app.require_subcommand(1);

    AuditOpts audit_opts;
    auto* audit_cmd = app.add_subcommand("audit", "run the leakage audit on a dataset");
    add_audit_options(audit_cmd, audit_opts);

    SimulateOpts sim_opts;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a simulation dataset as CSV");
    sim_cmd->add_option("--kind", sim_opts.kind,
                        "walkthrough|extremes|skewed|swap|rounded")->required();
    sim_cmd->add_option("--n", sim_opts.params.n, "rows");
    sim_cmd->add_option("--p", sim_opts.params.p, "feature count (skewed)");
    sim_cmd->add_option("--dist", sim_opts.params.dist, "normal|chi2_df3");
    sim_cmd->add_option("--noise-sd", sim_opts.params.noise_sd, "walkthrough target noise sd");
    sim_cmd->add_option("--mix-center-low", sim_opts.params.mix_center_low,
                        "walkthrough mixture center (low)");
    sim_cmd->add_option("--mix-center-high", sim_opts.params.mix_center_high,
                        "walkthrough mixture center (high)");
    sim_cmd->add_option("--mix-sd", sim_opts.params.mix_sd, "walkthrough mixture sd");
    sim_cmd->add_option("--extreme-fraction", sim_opts.params.extreme_fraction,
                        "extremes cluster fraction");
    sim_cmd->add_option("--extreme-center", sim_opts.params.extreme_center,
                        "extremes cluster center");
    sim_cmd->add_option("--extreme-sd", sim_opts.params.extreme_sd, "extremes cluster sd");
    sim_cmd->add_option("--decimals", sim_opts.params.decimals, "rounded-feature decimals");
    sim_cmd->add_option("--seed", sim_opts.params.seed, "generator seed (mandatory)");
    sim_cmd->add_option("--out", sim_opts.out, "output base path (default: kind name)");

    ReportOpts report_opts;
    auto* report_cmd = app.add_subcommand("report", "render a report or histogram CSVs");
    report_cmd->add_option("report", report_opts.report_path, "report.json produced by audit");
    report_cmd->add_option("--format", report_opts.format, "md|csv");
    report_cmd->add_option("--histograms", report_opts.histograms,
                           "FEATURE,CONFOUND conditional histograms");
    report_cmd->add_option("--data", report_opts.data, "CSV for histogram mode");
    report_cmd->add_option("--target", report_opts.target, "target column for histogram mode");
    report_cmd->add_option("--confounds", report_opts.confounds,
                           "confound columns for histogram mode");
    report_cmd->add_option("--task", report_opts.task, "auto|classification|regression");
    report_cmd->add_option("--bins", report_opts.bins, "histogram bins");
    report_cmd->add_option("--out", report_opts.out, "output path");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        print_error(e.what());
        return kExitUsage;
    }

    try {
        if (audit_cmd->parsed()) return cmd_audit(audit_cmd, audit_opts);
        if (sim_cmd->parsed()) return cmd_simulate(sim_cmd, sim_opts);
        if (report_cmd->parsed()) return cmd_report(report_opts);
        print_error("no subcommand given");
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        print_error(e.what());
        return kExitUsage;
    } catch (const UndefinedMetric& e) {
        print_error(e.what());
        return kExitData;
    } catch (const Error& e) {
        print_error(e.what());
        return kExitData;
    } catch (const std::exception& e) {
        print_error(e.what());
        return kExitData;
    }
}

}  // namespace confaudit
