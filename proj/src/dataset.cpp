#include "confaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"

namespace confaudit {

namespace {

void warn(const std::string& msg) {
    std::cerr << "confaudit: warning: " << msg << "\n";
}

bool is_missing_token(const std::string& s) {
    if (s.empty()) return true;
    static const char* tokens[] = {"na", "n/a", "nan", "null", "none"};
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (const char* t : tokens) {
        if (lower == t) return true;
    }
    return false;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

// One CSV record, honoring quoted fields ("" escapes a quote). May consume
// multiple physical lines when a quoted field contains newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

struct RawColumn {
    std::string name;
    std::vector<std::string> cells;
};

// Level codes in lexicographic label order, stable across platforms.
std::vector<std::string> sorted_levels(const std::vector<std::string>& cells) {
    std::set<std::string> s(cells.begin(), cells.end());
    return {s.begin(), s.end()};
}

double encode_level(const std::vector<std::string>& levels, const std::string& cell) {
    const auto it = std::lower_bound(levels.begin(), levels.end(), cell);
    return static_cast<double>(it - levels.begin());
}

}  // namespace

std::string to_string(ColumnKind k) {
    switch (k) {
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::binary: return "binary";
        case ColumnKind::categorical: return "categorical";
    }
    return "?";
}

std::string to_string(TargetKind k) {
    return k == TargetKind::classification ? "classification" : "regression";
}

std::optional<ColumnKind> column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "binary") return ColumnKind::binary;
    if (s == "categorical") return ColumnKind::categorical;
    return std::nullopt;
}

void Dataset::validate() const {
    const std::size_t n = n_rows();
    if (n < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(n));
    if (n_features() < 1) throw DataError("dataset needs at least 1 feature column");
    if (features.rows() != n) throw DataError("feature row count does not match target length");
    if (!confounds.empty() && confounds.rows() != n)
        throw DataError("confound row count does not match target length");
    if (feature_names.size() != n_features() || feature_kinds.size() != n_features() ||
        feature_levels.size() != n_features())
        throw DataError("feature metadata length mismatch");
    if (confound_names.size() != n_confounds() || confound_kinds.size() != n_confounds() ||
        confound_levels.size() != n_confounds())
        throw DataError("confound metadata length mismatch");
    if (!features.all_finite() || !confounds.all_finite())
        throw DataError("dataset contains non-finite values");
    if (target_kind == TargetKind::classification) {
        if (class_labels.size() != 2)
            throw DataError("classification target must have exactly 2 labels");
        for (double t : target) {
            if (t != 0.0 && t != 1.0)
                throw DataError("classification target must be coded 0/1");
        }
    } else {
        for (double t : target) {
            if (!std::isfinite(t)) throw DataError("regression target contains non-finite values");
        }
    }
    for (std::size_t j = 0; j < n_features(); ++j) {
        if (feature_kinds[j] != ColumnKind::categorical) continue;
        for (double v : features.col(j)) {
            if (v < 0.0 || v != std::floor(v))
                throw DataError("categorical column '" + feature_names[j] +
                                "' holds a non-integer level code");
        }
    }
}

Dataset Dataset::select_rows(std::span<const int> idx) const {
    Dataset out = *this;
    out.features = features.select_rows(idx);
    out.confounds = confounds.empty() ? Matrix(idx.size(), 0) : confounds.select_rows(idx);
    out.target = select(target, idx);
    return out;
}

std::string Dataset::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    mix(std::to_string(n_rows()));
    mix(std::to_string(n_features()));
    mix(std::to_string(n_confounds()));
    mix(to_string(target_kind));
    for (std::size_t j = 0; j < n_features(); ++j) {
        mix(feature_names[j]);
        mix(to_string(feature_kinds[j]));
    }
    for (std::size_t j = 0; j < n_confounds(); ++j) {
        mix(confound_names[j]);
        mix(to_string(confound_kinds[j]));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Dataset load_csv(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    std::vector<std::string> header;
    if (!read_record(in, header) || header.empty())
        throw DataError("missing header row in " + path);

    std::vector<RawColumn> cols(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) cols[j].name = header[j];

    std::vector<std::string> fields;
    std::size_t line = 1;
    while (read_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != header.size())
            throw DataError(path + ": row " + std::to_string(line) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) cols[j].cells.push_back(fields[j]);
    }
    const std::size_t n_raw = cols.empty() ? 0 : cols[0].cells.size();
    if (n_raw == 0) throw DataError(path + ": no data rows");

    auto find_col = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].name == name) return j;
        }
        throw DataError(path + ": column '" + name + "' not found in header");
    };

    const std::size_t target_idx = find_col(opts.target_col);
    std::vector<std::size_t> confound_idx;
    for (const auto& c : opts.confound_cols) confound_idx.push_back(find_col(c));
    for (const auto& [name, kind] : opts.kind_overrides) {
        (void)kind;
        find_col(name);  // unknown override names are an error
    }

    // Missing handling first: drop rows or reject, then infer kinds on what
    // remains.
    std::vector<char> keep(n_raw, 1);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < n_raw; ++i) {
            if (!is_missing_token(cols[j].cells[i])) continue;
            if (opts.missing == MissingPolicy::reject_file)
                throw DataError(path + ": missing value at row " + std::to_string(i + 2) +
                                ", column '" + cols[j].name + "'");
            keep[i] = 0;
        }
    }
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n_raw; ++i) {
        if (keep[i]) rows.push_back(i);
    }
    if (rows.size() < n_raw)
        warn("dropped " + std::to_string(n_raw - rows.size()) + " rows with missing values");
    if (rows.size() < 2) throw DataError(path + ": fewer than 2 usable rows after drops");

    struct TypedColumn {
        ColumnKind kind;
        std::vector<std::string> levels;  // categorical only
        std::vector<double> values;
    };

    auto type_column = [&](const RawColumn& rc, const std::optional<ColumnKind>& override_kind)
        -> TypedColumn {
        bool numeric = true;
        std::vector<double> nums(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!parse_double(rc.cells[rows[i]], nums[i])) {
                numeric = false;
                break;
            }
        }
        ColumnKind kind;
        if (override_kind) {
            kind = *override_kind;
        } else if (!numeric) {
            kind = ColumnKind::categorical;
        } else {
            std::set<double> distinct(nums.begin(), nums.end());
            kind = distinct.size() <= 2 ? ColumnKind::binary : ColumnKind::continuous;
        }

        TypedColumn out;
        out.kind = kind;
        if (kind == ColumnKind::categorical) {
            std::vector<std::string> cells(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) cells[i] = rc.cells[rows[i]];
            out.levels = sorted_levels(cells);
            out.values.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                out.values[i] = encode_level(out.levels, cells[i]);
        } else {
            if (!numeric) {
                // An override forced a numeric kind onto a column with an
                // unparseable cell: report the offending position.
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    double v;
                    if (!parse_double(rc.cells[rows[i]], v))
                        throw DataError(path + ": cannot parse '" + rc.cells[rows[i]] +
                                        "' as a number at row " + std::to_string(rows[i] + 2) +
                                        ", column '" + rc.name + "'");
                }
            }
            if (kind == ColumnKind::binary) {
                std::set<double> distinct(nums.begin(), nums.end());
                if (distinct.size() > 2)
                    throw DataError(path + ": column '" + rc.name +
                                    "' overridden as binary but has " +
                                    std::to_string(distinct.size()) + " distinct values");
            }
            out.values = std::move(nums);
        }
        return out;
    };

    auto override_for = [&](const std::string& name) -> std::optional<ColumnKind> {
        const auto it = opts.kind_overrides.find(name);
        if (it == opts.kind_overrides.end()) return std::nullopt;
        return it->second;
    };

    Dataset d;

    // Target.
    {
        const RawColumn& rc = cols[target_idx];
        bool numeric = true;
        std::vector<double> nums(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!parse_double(rc.cells[rows[i]], nums[i])) {
                numeric = false;
                break;
            }
        }
        std::vector<std::string> cells(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) cells[i] = rc.cells[rows[i]];
        const auto levels = sorted_levels(cells);

        TargetKind tk;
        if (opts.target_kind) {
            tk = *opts.target_kind;
        } else {
            tk = (!numeric || levels.size() <= 2) ? TargetKind::classification
                                                  : TargetKind::regression;
        }
        d.target_kind = tk;
        if (tk == TargetKind::classification) {
            if (levels.size() != 2)
                throw DataError(path + ": classification target '" + rc.name + "' has " +
                                std::to_string(levels.size()) + " distinct labels, need 2");
            d.class_labels = levels;
            d.target.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                d.target[i] = encode_level(levels, cells[i]);
        } else {
            if (!numeric)
                throw DataError(path + ": regression target '" + rc.name +
                                "' has non-numeric values");
            d.target = std::move(nums);
        }
    }

    std::set<std::size_t> confound_set(confound_idx.begin(), confound_idx.end());
    std::vector<TypedColumn> feat_cols, conf_cols;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (j == target_idx) continue;
        TypedColumn tc = type_column(cols[j], override_for(cols[j].name));
        if (confound_set.count(j)) {
            conf_cols.push_back(std::move(tc));
            d.confound_names.push_back(cols[j].name);
        } else {
            feat_cols.push_back(std::move(tc));
            d.feature_names.push_back(cols[j].name);
        }
    }
    if (d.feature_names.empty()) throw DataError(path + ": no feature columns left");

    d.features = Matrix(rows.size(), feat_cols.size());
    for (std::size_t j = 0; j < feat_cols.size(); ++j) {
        std::copy(feat_cols[j].values.begin(), feat_cols[j].values.end(),
                  d.features.col(j).begin());
        d.feature_kinds.push_back(feat_cols[j].kind);
        d.feature_levels.push_back(std::move(feat_cols[j].levels));
    }
    d.confounds = Matrix(rows.size(), conf_cols.size());
    for (std::size_t j = 0; j < conf_cols.size(); ++j) {
        std::copy(conf_cols[j].values.begin(), conf_cols[j].values.end(),
                  d.confounds.col(j).begin());
        d.confound_kinds.push_back(conf_cols[j].kind);
        d.confound_levels.push_back(std::move(conf_cols[j].levels));
    }

    d.validate();
    return d;
}

void write_csv(const Dataset& d, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& extra_cols) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);

    for (std::size_t j = 0; j < d.n_features(); ++j) {
        out << csv_escape(d.feature_names[j]) << ',';
    }
    for (std::size_t j = 0; j < d.n_confounds(); ++j) {
        out << csv_escape(d.confound_names[j]) << ',';
    }
    for (const auto& [name, col] : extra_cols) {
        (void)col;
        out << csv_escape(name) << ',';
    }
    out << "target\n";

    auto cell = [&](double v, ColumnKind kind, const std::vector<std::string>& levels) {
        if (kind == ColumnKind::categorical) {
            const auto code = static_cast<std::size_t>(v);
            return csv_escape(levels.at(code));
        }
        return format_double(v);
    };

    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        for (std::size_t j = 0; j < d.n_features(); ++j) {
            out << cell(d.features(i, j), d.feature_kinds[j], d.feature_levels[j]) << ',';
        }
        for (std::size_t j = 0; j < d.n_confounds(); ++j) {
            out << cell(d.confounds(i, j), d.confound_kinds[j], d.confound_levels[j]) << ',';
        }
        for (const auto& [name, col] : extra_cols) {
            (void)name;
            out << format_double(col.at(i)) << ',';
        }
        if (d.target_kind == TargetKind::classification) {
            out << csv_escape(d.class_labels[static_cast<std::size_t>(d.target[i])]);
        } else {
            out << format_double(d.target[i]);
        }
        out << '\n';
    }
}

namespace {

// Encodes one side (features or confounds) of the dataset.
void encode_side(const Matrix& m, const std::vector<std::string>& names,
                 const std::vector<ColumnKind>& kinds,
                 const std::vector<std::vector<std::string>>& levels, Matrix& out_m,
                 std::vector<std::string>& out_names, std::vector<ColumnKind>& out_kinds,
                 std::vector<std::vector<std::string>>& out_levels) {
    const std::size_t n = m.rows();
    std::size_t out_cols = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        out_cols += kinds[j] == ColumnKind::categorical ? std::max<std::size_t>(levels[j].size(), 1)
                                                        : 1;
    }
    out_m = Matrix(n, out_cols);
    out_names.clear();
    out_kinds.clear();
    out_levels.clear();
    std::size_t oj = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (kinds[j] != ColumnKind::categorical) {
            std::copy(m.col(j).begin(), m.col(j).end(), out_m.col(oj).begin());
            out_names.push_back(names[j]);
            out_kinds.push_back(kinds[j]);
            out_levels.emplace_back();
            ++oj;
            continue;
        }
        const auto& lv = levels[j];
        if (lv.size() <= 1) {
            warn("categorical column '" + names[j] + "' has a single level; emitting a constant indicator");
        }
        const std::size_t k = std::max<std::size_t>(lv.size(), 1);
        for (std::size_t level = 0; level < k; ++level) {
            auto dst = out_m.col(oj);
            const auto src = m.col(j);
            for (std::size_t i = 0; i < n; ++i) {
                dst[i] = (static_cast<std::size_t>(src[i]) == level) ? 1.0 : 0.0;
            }
            out_names.push_back(names[j] + "=" + (level < lv.size() ? lv[level] : "0"));
            out_kinds.push_back(ColumnKind::binary);
            out_levels.emplace_back();
            ++oj;
        }
    }
}

}  // namespace

Dataset one_hot_encode(const Dataset& d) {
    Dataset out;
    out.target = d.target;
    out.target_kind = d.target_kind;
    out.class_labels = d.class_labels;
    encode_side(d.features, d.feature_names, d.feature_kinds, d.feature_levels, out.features,
                out.feature_names, out.feature_kinds, out.feature_levels);
    encode_side(d.confounds, d.confound_names, d.confound_kinds, d.confound_levels, out.confounds,
                out.confound_names, out.confound_kinds, out.confound_levels);
    return out;
}

namespace {

std::vector<Standardizer::ColStats> fit_side(const Matrix& m, const std::vector<ColumnKind>& kinds,
                                             std::span<const int> rows,
                                             const std::vector<std::string>& names) {
    std::vector<Standardizer::ColStats> stats;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (kinds[j] != ColumnKind::continuous) continue;
        const auto col = m.col(j);
        double sum = 0.0;
        for (int r : rows) sum += col[static_cast<std::size_t>(r)];
        const double mean = sum / static_cast<double>(rows.size());
        double ss = 0.0;
        for (int r : rows) {
            const double dlt = col[static_cast<std::size_t>(r)] - mean;
            ss += dlt * dlt;
        }
        double scale = std::sqrt(ss / static_cast<double>(rows.size()));
        if (scale <= 0.0) {
            warn("zero-variance column '" + names[j] + "'; centering only");
            scale = 1.0;
        }
        stats.push_back({j, mean, scale});
    }
    return stats;
}

void apply_side(Matrix& m, const std::vector<Standardizer::ColStats>& stats) {
    for (const auto& st : stats) {
        auto col = m.col(st.col);
        for (double& v : col) v = (v - st.mean) / st.scale;
    }
}

}  // namespace

Standardizer Standardizer::fit(const Dataset& d, std::span<const int> rows) {
    if (rows.empty()) throw InvalidArgument("Standardizer::fit requires a nonempty row set");
    Standardizer s;
    s.feature_stats = fit_side(d.features, d.feature_kinds, rows, d.feature_names);
    s.confound_stats = fit_side(d.confounds, d.confound_kinds, rows, d.confound_names);
    return s;
}

Dataset Standardizer::apply(const Dataset& d) const {
    Dataset out = d;
    apply_side(out.features, feature_stats);
    apply_side(out.confounds, confound_stats);
    return out;
}

Dataset balance_classes(const Dataset& d, std::uint64_t seed) {
    if (d.target_kind != TargetKind::classification)
        throw InvalidArgument("balance_classes requires a classification target");
    std::vector<int> pos, neg;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        (d.target[i] == 1.0 ? pos : neg).push_back(static_cast<int>(i));
    }
    if (pos.size() == neg.size()) return d;

    auto& majority = pos.size() > neg.size() ? pos : neg;
    const std::size_t want = std::min(pos.size(), neg.size());
    Rng rng(derive_seed(seed, seedtag::balance));
    auto chosen = rng.sample_without_replacement(static_cast<int>(majority.size()),
                                                 static_cast<int>(want));
    std::vector<char> keep_major(majority.size(), 0);
    for (int c : chosen) keep_major[static_cast<std::size_t>(c)] = 1;

    std::vector<char> keep(d.n_rows(), 1);
    for (std::size_t k = 0; k < majority.size(); ++k) {
        if (!keep_major[k]) keep[static_cast<std::size_t>(majority[k])] = 0;
    }
    std::vector<int> rows;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        if (keep[i]) rows.push_back(static_cast<int>(i));
    }
    return d.select_rows(rows);
}

std::pair<std::vector<int>, std::vector<int>> split_indices(const Dataset& d,
                                                            double test_fraction,
                                                            std::uint64_t seed, bool stratify) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InvalidArgument("test_fraction must be in (0, 1)");
    const int n = static_cast<int>(d.n_rows());
    const int test_total = static_cast<int>(std::floor(n * test_fraction + 0.5));
    Rng rng(derive_seed(seed, seedtag::split));

    std::vector<int> test_rows;
    if (stratify && d.target_kind == TargetKind::classification) {
        std::vector<std::vector<int>> groups(2);
        for (int i = 0; i < n; ++i)
            groups[static_cast<std::size_t>(d.target[static_cast<std::size_t>(i)])].push_back(i);
        // Largest-remainder allocation so the class proportions survive
        // rounding and the total comes out exact.
        std::vector<int> take(2);
        std::vector<double> frac(2);
        int allocated = 0;
        for (int g = 0; g < 2; ++g) {
            const double exact = static_cast<double>(groups[static_cast<std::size_t>(g)].size()) *
                                 test_fraction;
            take[static_cast<std::size_t>(g)] = static_cast<int>(std::floor(exact));
            frac[static_cast<std::size_t>(g)] = exact - std::floor(exact);
            allocated += take[static_cast<std::size_t>(g)];
        }
        for (int extra = 0; extra < test_total - allocated; ++extra) {
            const int g = frac[0] >= frac[1] ? 0 : 1;
            take[static_cast<std::size_t>(g)] += 1;
            frac[static_cast<std::size_t>(g)] = -1.0;
        }
        for (int g = 0; g < 2; ++g) {
            auto& rows = groups[static_cast<std::size_t>(g)];
            if (take[static_cast<std::size_t>(g)] >= static_cast<int>(rows.size()))
                throw DataError("stratified split leaves class '" +
                                d.class_labels[static_cast<std::size_t>(g)] + "' empty in train");
            rng.shuffle(rows);
            test_rows.insert(test_rows.end(), rows.begin(),
                             rows.begin() + take[static_cast<std::size_t>(g)]);
        }
    } else {
        auto perm = rng.permutation(n);
        test_rows.assign(perm.begin(), perm.begin() + test_total);
    }

    std::vector<char> is_test(static_cast<std::size_t>(n), 0);
    for (int r : test_rows) is_test[static_cast<std::size_t>(r)] = 1;
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) {
        (is_test[static_cast<std::size_t>(i)] ? test : train).push_back(i);
    }
    return {train, test};
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed, bool stratify) {
    auto [train, test] = split_indices(d, test_fraction, seed, stratify);
    return {d.select_rows(train), d.select_rows(test)};
}

Dataset shuffle_features(const Dataset& d, std::uint64_t seed) {
    Dataset out = d;
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        Rng rng(derive_seed(seed, seedtag::shuffle, static_cast<std::uint64_t>(j)));
        const auto perm = rng.permutation(static_cast<int>(d.n_rows()));
        const auto src = d.features.col(j);
        auto dst = out.features.col(j);
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = src[static_cast<std::size_t>(perm[i])];
        }
    }
    return out;
}

}  // namespace confaudit
