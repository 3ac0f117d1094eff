#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "confaudit/audit.hpp"
#include "confaudit/error.hpp"

namespace confaudit {

namespace {

constexpr int kSchemaVersion = 1;

std::string num(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string fixed(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

nlohmann::json rope_to_json(const RopeResult& r) {
    nlohmann::json j;
    j["p_left"] = r.p_left;
    j["p_rope"] = r.p_rope;
    j["p_right"] = r.p_right;
    j["halfwidth"] = r.halfwidth;
    j["decision"] = to_string(r.decision);
    return j;
}

RopeResult rope_from_json(const nlohmann::json& j) {
    RopeResult r;
    r.p_left = j.at("p_left").get<double>();
    r.p_rope = j.at("p_rope").get<double>();
    r.p_right = j.at("p_right").get<double>();
    r.halfwidth = j.at("halfwidth").get<double>();
    const auto d = j.at("decision").get<std::string>();
    if (d == "meaningfully_higher") r.decision = RopeDecision::meaningfully_higher;
    else if (d == "meaningfully_lower") r.decision = RopeDecision::meaningfully_lower;
    else if (d == "practically_equivalent") r.decision = RopeDecision::practically_equivalent;
    else r.decision = RopeDecision::undecided;
    return r;
}

}  // namespace

nlohmann::json AuditReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["dataset_fingerprint"] = dataset_fingerprint;
    j["confound_source"] = confound_source;
    j["metric"] = metric_name;
    j["seed"] = seed;

    nlohmann::json cells_json = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json cj;
        cj["variant"] = to_string(c.variant);
        cj["model"] = c.model;
        cj["valid"] = c.valid;
        if (!c.error.empty()) cj["error"] = c.error;
        const auto summary = c.cv.summary();
        cj["summary"] = {{"mean", summary.mean},
                         {"sd", summary.sd},
                         {"folds_valid", summary.fold_scores.size()}};
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& f : c.cv.scores) {
            nlohmann::json fj;
            fj["repeat"] = f.repeat;
            fj["fold"] = f.fold;
            fj["valid"] = f.valid;
            if (f.valid) fj["score"] = f.score;
            else fj["error"] = f.error;
            if (f.tree_nodes >= 0) fj["tree_nodes"] = f.tree_nodes;
            folds.push_back(std::move(fj));
        }
        cj["folds"] = std::move(folds);
        cells_json.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells_json);

    nlohmann::json cmp_json = nlohmann::json::array();
    for (const auto& c : comparisons) {
        nlohmann::json cj;
        cj["label"] = c.label;
        cj["model"] = c.model;
        cj["valid"] = c.valid;
        if (c.valid) cj["rope"] = rope_to_json(c.result);
        else cj["error"] = c.error;
        cmp_json.push_back(std::move(cj));
    }
    j["rope_comparisons"] = std::move(cmp_json);

    nlohmann::json assoc = nlohmann::json::array();
    for (const auto& a : associations) {
        nlohmann::json aj;
        aj["confound"] = a.confound;
        aj["method"] = a.method;
        if (a.target_defined) aj["target_association"] = a.target_association;
        else aj["target_association"] = nullptr;
        aj["feature_associations"] = {{"min", a.min},     {"q25", a.q25}, {"median", a.median},
                                      {"q75", a.q75},     {"max", a.max},
                                      {"defined", a.features_defined},
                                      {"total", a.features_total}};
        assoc.push_back(std::move(aj));
    }
    j["associations"] = std::move(assoc);

    j["verdict"] = {{"level", to_string(verdict)}, {"reasons", verdict_reasons}};
    j["config"] = config_echo;
    return j;
}

AuditReport AuditReport::from_json(const nlohmann::json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
        throw DataError("unknown report schema version " + std::to_string(version));

    AuditReport r;
    r.dataset_fingerprint = j.value("dataset_fingerprint", "");
    r.confound_source = j.value("confound_source", "");
    r.metric_name = j.value("metric", "");
    r.seed = j.value("seed", std::uint64_t{0});

    for (const auto& cj : j.at("cells")) {
        AuditCell c;
        const auto v = audit_variant_from_string(cj.at("variant").get<std::string>());
        if (!v) throw DataError("unknown variant in report");
        c.variant = *v;
        c.model = cj.at("model").get<std::string>();
        c.valid = cj.at("valid").get<bool>();
        c.error = cj.value("error", "");
        for (const auto& fj : cj.at("folds")) {
            FoldScore f;
            f.repeat = fj.at("repeat").get<int>();
            f.fold = fj.at("fold").get<int>();
            f.valid = fj.at("valid").get<bool>();
            if (f.valid) f.score = fj.at("score").get<double>();
            else f.error = fj.value("error", "");
            f.tree_nodes = fj.value("tree_nodes", -1);
            c.cv.scores.push_back(f);
        }
        r.cells.push_back(std::move(c));
    }
    for (const auto& cj : j.at("rope_comparisons")) {
        RopeComparison c;
        c.label = cj.at("label").get<std::string>();
        c.model = cj.at("model").get<std::string>();
        c.valid = cj.at("valid").get<bool>();
        if (c.valid) c.result = rope_from_json(cj.at("rope"));
        else c.error = cj.value("error", "");
        r.comparisons.push_back(std::move(c));
    }
    for (const auto& aj : j.at("associations")) {
        AssociationRow a;
        a.confound = aj.at("confound").get<std::string>();
        a.method = aj.at("method").get<std::string>();
        if (!aj.at("target_association").is_null()) {
            a.target_association = aj.at("target_association").get<double>();
            a.target_defined = true;
        }
        const auto& f = aj.at("feature_associations");
        a.min = f.at("min").get<double>();
        a.q25 = f.at("q25").get<double>();
        a.median = f.at("median").get<double>();
        a.q75 = f.at("q75").get<double>();
        a.max = f.at("max").get<double>();
        a.features_defined = f.at("defined").get<int>();
        a.features_total = f.at("total").get<int>();
        r.associations.push_back(std::move(a));
    }
    const auto& vj = j.at("verdict");
    const auto level = vj.at("level").get<std::string>();
    if (level == "leakage_strong") r.verdict = VerdictLevel::leakage_strong;
    else if (level == "leakage_suspected") r.verdict = VerdictLevel::leakage_suspected;
    else r.verdict = VerdictLevel::no_evidence;
    r.verdict_reasons = vj.at("reasons").get<std::vector<std::string>>();
    if (j.contains("config")) r.config_echo = j.at("config");
    return r;
}

std::string AuditReport::to_markdown() const {
    std::ostringstream md;
    md << "# Confound-leakage audit\n\n";
    md << "- dataset fingerprint: `" << dataset_fingerprint << "`\n";
    md << "- confound source: " << confound_source << "\n";
    md << "- metric: " << metric_name << "\n";
    md << "- seed: " << seed << "\n\n";

    md << "## Verdict: " << to_string(verdict) << "\n\n";
    for (const auto& reason : verdict_reasons) md << "- " << reason << "\n";
    md << "\n## Scores\n\n";
    md << "| variant | model | mean | sd | valid folds | tree nodes (median) |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& c : cells) {
        md << "| " << to_string(c.variant) << " | " << c.model << " | ";
        if (c.valid) {
            const auto s = c.cv.summary();
            md << fixed(s.mean) << " | " << fixed(s.sd) << " | " << s.fold_scores.size()
               << " | ";
            std::vector<double> nodes;
            for (const auto& f : c.cv.scores) {
                if (f.valid && f.tree_nodes >= 0) nodes.push_back(f.tree_nodes);
            }
            if (!nodes.empty()) {
                std::sort(nodes.begin(), nodes.end());
                md << nodes[nodes.size() / 2];
            }
        } else {
            md << "invalid: " << c.error << " | | 0 | ";
        }
        md << " |\n";
    }

    md << "\n## ROPE comparisons\n\n";
    md << "| comparison | model | p_left | p_rope | p_right | decision |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& c : comparisons) {
        md << "| " << c.label << " | " << c.model << " | ";
        if (c.valid) {
            md << fixed(c.result.p_left) << " | " << fixed(c.result.p_rope) << " | "
               << fixed(c.result.p_right) << " | " << to_string(c.result.decision);
        } else {
            md << " | | | invalid: " << c.error;
        }
        md << " |\n";
    }

    if (!associations.empty()) {
        md << "\n## Confound associations\n\n";
        md << "| confound | method | vs target | feature min | q25 | median | q75 | max |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& a : associations) {
            md << "| " << a.confound << " | " << a.method << " | "
               << (a.target_defined ? fixed(a.target_association) : std::string("undefined"))
               << " | " << fixed(a.min) << " | " << fixed(a.q25) << " | " << fixed(a.median)
               << " | " << fixed(a.q75) << " | " << fixed(a.max) << " |\n";
        }
    }
    md << "\n";
    return md.str();
}

std::string AuditReport::fold_scores_csv() const {
    std::ostringstream csv;
    csv << "repeat,fold,variant,model,score\n";
    for (const auto& c : cells) {
        for (const auto& f : c.cv.scores) {
            csv << f.repeat << ',' << f.fold << ',' << to_string(c.variant) << ',' << c.model
                << ',' << (f.valid ? num(f.score) : std::string("nan")) << '\n';
        }
    }
    return csv.str();
}

}  // namespace confaudit
