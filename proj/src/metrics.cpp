#include "confaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confaudit/error.hpp"

namespace confaudit {

double aucroc(std::span<const double> labels, std::span<const double> scores) {
    const std::size_t n = labels.size();
    if (scores.size() != n) throw InvalidArgument("aucroc: length mismatch");

    std::size_t n_pos = 0;
    for (double l : labels) {
        if (l != 0.0 && l != 1.0) throw InvalidArgument("aucroc: labels must be 0/1");
        if (l == 1.0) ++n_pos;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw UndefinedMetric("aucroc undefined: only one class present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; ranks are 1-based.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1.0) rank_sum_pos += midrank;
        }
        i = j + 1;
    }

    const double u = rank_sum_pos -
                     static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
    const std::size_t n = y_true.size();
    if (y_pred.size() != n) throw InvalidArgument("r2: length mismatch");
    if (n < 2) throw InvalidArgument("r2 needs at least 2 points");

    double mean = 0.0;
    for (double y : y_true) mean += y;
    mean /= static_cast<double>(n);

    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = y_true[i] - mean;
        const double dr = y_true[i] - y_pred[i];
        ss_tot += dt * dt;
        ss_res += dr * dr;
    }
    if (ss_tot <= 0.0) throw UndefinedMetric("r2 undefined: zero-variance truth");
    return 1.0 - ss_res / ss_tot;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw InvalidArgument("pearson: length mismatch");
    if (n < 2) throw InvalidArgument("pearson needs at least 2 points");

    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);

    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw UndefinedMetric("pearson undefined: constant input");
    return sab / std::sqrt(saa * sbb);
}

double point_biserial(std::span<const double> group, std::span<const double> values) {
    for (double g : group) {
        if (g != 0.0 && g != 1.0)
            throw InvalidArgument("point_biserial: group coding must be 0/1");
    }
    return pearson(group, values);
}

ScoreSummary ScoreSummary::of(std::span<const double> scores) {
    ScoreSummary s;
    s.fold_scores.assign(scores.begin(), scores.end());
    if (scores.empty()) return s;
    for (double v : scores) s.mean += v;
    s.mean /= static_cast<double>(scores.size());
    if (scores.size() > 1) {
        double ss = 0.0;
        for (double v : scores) {
            const double d = v - s.mean;
            ss += d * d;
        }
        s.sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));
    }
    return s;
}

}  // namespace confaudit
