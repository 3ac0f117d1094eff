// Timings for the OpenMP kernels against single-threaded runs of the same
// code paths: confound-regression fit/transform, forest fitting, and a full
// repeated-CV evaluation. Results are checked for bit-identity across
// worker counts while timing, since that is the contract the kernels make.

#include <chrono>
#include <cstdio>
#include <string>

#include "confaudit/confound_regression.hpp"
#include "confaudit/cv.hpp"
#include "confaudit/models.hpp"
#include "confaudit/parallel.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/simgen.hpp"

using namespace confaudit;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class F>
double time_ms(F&& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        fn();
        const double t1 = now_ms();
        if (t1 - t0 < best) best = t1 - t0;
    }
    return best;
}

struct Row {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool identical;
};

void print_row(const Row& r) {
    std::printf("%-28s %10.1f ms %10.1f ms   %5.2fx   %s\n", r.name, r.serial_ms,
                r.parallel_ms, r.serial_ms / r.parallel_ms,
                r.identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    const int hw = resolve_jobs(0);
    std::printf("kernel                            serial    %d threads   speedup   results\n",
                hw);

    // Confound regression: wide feature matrix, shared design.
    {
        Rng rng(7);
        const std::size_t n = 20000, p = 256, q = 4;
        Matrix x(n, p), c(n, q);
        for (std::size_t j = 0; j < p; ++j)
            for (double& v : x.col(j)) v = rng.normal();
        for (std::size_t j = 0; j < q; ++j)
            for (double& v : c.col(j)) v = rng.normal();

        ConfoundModel m1, m2;
        set_global_jobs(1);
        const double t1 = time_ms([&] { m1 = fit_cr(x, c); });
        set_global_jobs(0);
        const double t2 = time_ms([&] { m2 = fit_cr(x, c); });
        const bool same = m1.intercepts == m2.intercepts && m1.coefficients == m2.coefficients;

        CrTransform tr1, tr2;
        set_global_jobs(1);
        const double u1 = time_ms([&] { tr1 = transform_cr(m1, x, c); });
        set_global_jobs(0);
        const double u2 = time_ms([&] { tr2 = transform_cr(m2, x, c); });
        print_row({"fit_cr (20000x256, q=4)", t1, t2, same});
        print_row({"transform_cr", u1, u2, tr1.x_cr == tr2.x_cr && tr1.x_hat == tr2.x_hat});
    }

    // Forest fitting: trees are independent jobs.
    {
        const Dataset d = gen_skewed_features(2000, 20, FeatureDist::chi2_df3, 11);
        ModelSpec spec;
        spec.kind = ModelKind::forest;
        spec.n_trees = 64;
        spec.seed = 3;

        FittedModel f1, f2;
        set_global_jobs(1);
        const double t1 = time_ms([&] { f1 = fit_model(spec, d.features, d.target,
                                                       d.target_kind); }, 1);
        set_global_jobs(0);
        const double t2 = time_ms([&] { f2 = fit_model(spec, d.features, d.target,
                                                       d.target_kind); }, 1);
        bool same = f1.trees.size() == f2.trees.size();
        for (std::size_t t = 0; same && t < f1.trees.size(); ++t)
            same = f1.trees[t] == f2.trees[t];
        print_row({"forest fit (2000x20, 64 trees)", t1, t2, same});
    }

    // Full repeated CV: fold cells are independent jobs.
    {
        const Dataset d = gen_binary_balanced(1000, 5);
        PipelineSpec p;
        p.cr_variant = CrVariant::taco;
        p.swap_per_fold = true;
        p.model.kind = ModelKind::tree;
        CVScheme s;
        s.repeats = 10;
        s.folds = 5;
        s.seed = 21;

        CvResult r1, r2;
        set_global_jobs(1);
        const double t1 = time_ms([&] { r1 = run_cv(d, p, s); }, 1);
        set_global_jobs(0);
        const double t2 = time_ms([&] { r2 = run_cv(d, p, s); }, 1);
        bool same = r1.scores.size() == r2.scores.size();
        for (std::size_t i = 0; same && i < r1.scores.size(); ++i)
            same = r1.scores[i].score == r2.scores[i].score &&
                   r1.scores[i].valid == r2.scores[i].valid;
        print_row({"run_cv tree 10x5 (n=1000)", t1, t2, same});
    }

    set_global_jobs(0);
    return 0;
}
