#include "smd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smd {

namespace {

constexpr double kZeroDist = 1e-12;

std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t pool, Rng& rng) {
    // Partial Fisher-Yates over 0..pool-1.
    std::vector<std::size_t> idx(pool);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(n);
    return idx;
}

Points gather(const Points& pts, const std::vector<std::size_t>& idx) {
    Points out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(pts[i]);
    return out;
}

double max_movement(const Points& a, const Points& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, dist(a[i], b[i]));
    return m;
}

Points project_all(const Points& pts, const Region& region, bool* moved) {
    Points out;
    out.reserve(pts.size());
    bool any = false;
    for (const Vec& x : pts) {
        Vec px = region.project(x);
        if (dist(px, x) > 1e-12) any = true;
        out.push_back(std::move(px));
    }
    if (moved) *moved = any;
    return out;
}

}  // namespace

int SolverConfig::total_points() const {
    return std::accumulate(sizes.begin(), sizes.end(), 0);
}

void SolverConfig::validate() const {
    if (sizes.empty()) throw std::invalid_argument("solver: sizes must be nonempty");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("solver: slice sizes must be >= 1");
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("solver: lambda out of [0,1]");
    if (static_cast<int>(ref_size) < total_points())
        throw std::invalid_argument("solver: reference sample smaller than design");
    if (batch_size > ref_size)
        throw std::invalid_argument("solver: batch size exceeds reference sample");
    if (jitter <= 0.0) throw std::invalid_argument("solver: tau must be positive");
    if (tol <= 0.0) throw std::invalid_argument("solver: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
}

Points init_points(const ReferenceSample& ref, int n, double tau, const Region& region,
                   Rng& rng) {
    if (n > static_cast<int>(ref.size()))
        throw std::invalid_argument("solver: cannot draw more points than the reference holds");
    auto idx = draw_without_replacement(static_cast<std::size_t>(n), ref.size(), rng);
    std::uniform_real_distribution<double> noise(-tau, tau);
    Points out;
    out.reserve(n);
    for (std::size_t u : idx) {
        Vec x = ref.points[u];
        for (int j = 0; j < x.size(); ++j) x[j] += noise(rng);
        out.push_back(region.project(x));
    }
    return out;
}

Points jitter_repair(Points points, double tau_repair, const Region& region, Rng& rng,
                     const Points* others) {
    std::uniform_real_distribution<double> noise(-tau_repair, tau_repair);
    for (int round = 0; round < 100; ++round) {
        bool clean = true;
        for (std::size_t i = 0; i < points.size(); ++i) {
            bool clash = false;
            for (std::size_t j = 0; j < i && !clash; ++j)
                clash = dist(points[i], points[j]) < kZeroDist;
            if (others)
                for (const Vec& o : *others) {
                    if (clash) break;
                    clash = dist(points[i], o) < kZeroDist;
                }
            if (clash) {
                clean = false;
                Vec x = points[i];
                for (int c = 0; c < x.size(); ++c) x[c] += noise(rng);
                points[i] = region.project(x);
            }
        }
        if (clean) return points;
    }
    throw std::runtime_error("solver: jitter repair budget exhausted");
}

Points mm_update_oneshot_raw(const SlicedDesign& D, const Points& ref_batch, double lambda) {
    const double n = D.n();
    auto sizes = D.sizes();
    Points out;
    out.reserve(D.points.size());
    for (int i = 0; i < D.n(); ++i) {
        int k = D.slice_of[i] - 1;
        const Vec& xi = D.points[i];
        const double N = static_cast<double>(ref_batch.size());
        double weight = 0.0;
        Vec pull = Vec::Zero(xi.size());
        for (const Vec& y : ref_batch) {
            double d = dist(xi, y);
            if (d < kZeroDist) throw ZeroDistanceError();
            weight += 1.0 / d;
            pull += y / d;
        }
        weight /= N;
        pull /= N;
        Vec repel = Vec::Zero(xi.size());
        for (int j = 0; j < D.n(); ++j) {
            if (j == i) continue;
            double d = dist(xi, D.points[j]);
            if (d < kZeroDist) throw ZeroDistanceError();
            Vec u = (xi - D.points[j]) / d;
            repel += (lambda / n) * u;
            if (D.slice_of[j] - 1 == k) repel += (1.0 - lambda) / sizes[k] * u;
        }
        out.push_back((pull + repel) / weight);
    }
    return out;
}

SlicedDesign mm_update_oneshot(const SlicedDesign& D, const Points& ref_batch, double lambda,
                               const Region& region, bool* projection_moved) {
    SlicedDesign out = D;
    out.points = project_all(mm_update_oneshot_raw(D, ref_batch, lambda), region,
                             projection_moved);
    return out;
}

Points mm_update_sequential_raw(const Points& P_k, const Points& P_c, const Points& ref_batch,
                                double lambda_k) {
    const double nk = static_cast<double>(P_k.size());
    const double nc = static_cast<double>(P_c.size());
    const double cross_share = (nc > 0) ? lambda_k * nc / (nc + nk) : 0.0;
    const double within_coef = (1.0 - cross_share) / nk;
    const double cross_coef = (nc > 0) ? cross_share / nc : 0.0;
    Points out;
    out.reserve(P_k.size());
    for (std::size_t i = 0; i < P_k.size(); ++i) {
        const Vec& xi = P_k[i];
        const double N = static_cast<double>(ref_batch.size());
        double weight = 0.0;
        Vec pull = Vec::Zero(xi.size());
        for (const Vec& y : ref_batch) {
            double d = dist(xi, y);
            if (d < kZeroDist) throw ZeroDistanceError();
            weight += 1.0 / d;
            pull += y / d;
        }
        weight /= N;
        pull /= N;
        Vec repel = Vec::Zero(xi.size());
        for (std::size_t j = 0; j < P_k.size(); ++j) {
            if (j == i) continue;
            double d = dist(xi, P_k[j]);
            if (d < kZeroDist) throw ZeroDistanceError();
            repel += within_coef * (xi - P_k[j]) / d;
        }
        for (const Vec& xj : P_c) {
            double d = dist(xi, xj);
            if (d < kZeroDist) throw ZeroDistanceError();
            repel += cross_coef * (xi - xj) / d;
        }
        out.push_back((pull + repel) / weight);
    }
    return out;
}

Points mm_update_sequential(const Points& P_k, const Points& P_c, const Points& ref_batch,
                            double lambda_k, const Region& region, bool* projection_moved) {
    return project_all(mm_update_sequential_raw(P_k, P_c, ref_batch, lambda_k), region,
                       projection_moved);
}

double default_lambda_k(int n_c, int n_k) {
    if (n_k < 1) throw std::invalid_argument("solver: n_k must be >= 1");
    if (n_c == 0) return 1.0;  // first stage, value has no effect
    return std::clamp((n_c + n_k) / (2.0 * n_c), 0.0, 1.0);
}

namespace {

// Shared iteration driver. `step` maps the current points (plus a reference
// batch) to updated points and reports whether projection engaged.
template <typename Step, typename Objective>
SolveTrace iterate(Points& pts, const ReferenceSample& ref, const SolverConfig& cfg, Rng& rng,
                   const Region& region, Step step, Objective objective) {
    SolveTrace trace;
    const bool minibatch = cfg.batch_size > 0 && cfg.batch_size < ref.size();
    std::vector<double> movements;
    for (int t = 0; t < cfg.max_iter; ++t) {
        Points batch;
        const Points* batch_ptr = &ref.points;
        if (minibatch) {
            batch = gather(ref.points,
                           draw_without_replacement(cfg.batch_size, ref.size(), rng));
            batch_ptr = &batch;
        }
        Points next;
        bool proj_moved = false;
        bool repaired = false;
        for (int attempt = 0;; ++attempt) {
            try {
                next = step(pts, *batch_ptr, &proj_moved);
                break;
            } catch (const ZeroDistanceError&) {
                if (attempt >= 5) throw;
                repaired = true;
                pts = jitter_repair(std::move(pts), std::max(cfg.jitter, 1e-9), region, rng,
                                    batch_ptr);
            }
        }
        double move = max_movement(pts, next);
        pts = std::move(next);
        trace.objective.push_back(objective(pts));
        trace.projection_active.push_back(proj_moved);
        trace.repaired.push_back(repaired);
        trace.iterations = t + 1;
        trace.final_movement = move;
        movements.push_back(move);
        if (!minibatch) {
            if (move < cfg.tol) {
                trace.converged = true;
                break;
            }
        } else if (movements.size() >= 10) {
            // Batched runs converge on a trailing moving average of movement.
            double avg = 0.0;
            for (std::size_t i = movements.size() - 10; i < movements.size(); ++i)
                avg += movements[i];
            if (avg / 10.0 < cfg.tol) {
                trace.converged = true;
                break;
            }
        }
    }
    return trace;
}

}  // namespace

SolveResult run_oneshot(const Region& region, const SolverConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::MHED && cfg.method != Method::ComM)
        throw std::invalid_argument("solver: run_oneshot expects MHED or ComM");
    const double lambda = (cfg.method == Method::ComM) ? 0.0 : cfg.lambda;
    Rng rng(cfg.seed);

    SolveResult res;
    res.ref = ReferenceSample::draw(region, cfg.ref_size, rng);
    const int n = cfg.total_points();
    const int K = static_cast<int>(cfg.sizes.size());

    SlicedDesign D;
    D.num_slices = K;
    D.points = init_points(res.ref, n, cfg.jitter, region, rng);
    // Random slice assignment with the requested sizes.
    std::vector<int> labels;
    for (int k = 0; k < K; ++k) labels.insert(labels.end(), cfg.sizes[k], k + 1);
    std::shuffle(labels.begin(), labels.end(), rng);
    D.slice_of = labels;
    D.points = jitter_repair(std::move(D.points), std::max(cfg.jitter, 1e-9), region, rng);

    auto step = [&](const Points& cur, const Points& batch, bool* moved) {
        SlicedDesign tmp = D;
        tmp.points = cur;
        return mm_update_oneshot(tmp, batch, lambda, region, moved).points;
    };
    auto objective = [&](const Points& cur) {
        SlicedDesign tmp = D;
        tmp.points = cur;
        return objective_h(tmp, res.ref, lambda);
    };
    SolveTrace trace = iterate(D.points, res.ref, cfg, rng, region, step, objective);
    res.design = std::move(D);
    res.traces.push_back(std::move(trace));
    return res;
}

SolveResult run_sequential(const Region& region, const SolverConfig& cfg,
                           const std::vector<int>* stage_order) {
    cfg.validate();
    if (cfg.method != Method::SeqHED && cfg.method != Method::SeqM)
        throw std::invalid_argument("solver: run_sequential expects SeqHED or SeqM");
    const int K = static_cast<int>(cfg.sizes.size());
    Rng rng(cfg.seed);

    SolveResult res;
    res.ref = ReferenceSample::draw(region, cfg.ref_size, rng);

    // Stage order: caller-specified, else ascending size (stable).
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    if (stage_order) {
        if (stage_order->size() != static_cast<std::size_t>(K))
            throw std::invalid_argument("solver: stage order must list every slice once");
        order = *stage_order;
    } else {
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return cfg.sizes[a] < cfg.sizes[b]; });
    }

    Points accumulated;
    std::vector<Points> stage_result(K);
    for (int stage = 0; stage < K; ++stage) {
        const int slice = order[stage];
        const int nk = cfg.sizes[slice];
        const int nc = static_cast<int>(accumulated.size());
        double lambda_k;
        if (cfg.method == Method::SeqM)
            lambda_k = 1.0;
        else if (cfg.lambda_schedule == LambdaSchedule::Remark1)
            lambda_k = default_lambda_k(nc, nk);
        else
            lambda_k = cfg.lambda;

        Points pts = init_points(res.ref, nk, cfg.jitter, region, rng);
        pts = jitter_repair(std::move(pts), std::max(cfg.jitter, 1e-9), region, rng,
                            &accumulated);
        auto step = [&](const Points& cur, const Points& batch, bool* moved) {
            return mm_update_sequential(cur, accumulated, batch, lambda_k, region, moved);
        };
        auto objective = [&](const Points& cur) {
            return objective_h_seq(cur, accumulated, res.ref, lambda_k);
        };
        SolveTrace trace = iterate(pts, res.ref, cfg, rng, region, step, objective);
        accumulated.insert(accumulated.end(), pts.begin(), pts.end());
        stage_result[slice] = std::move(pts);
        res.traces.push_back(std::move(trace));
    }

    SlicedDesign D;
    D.num_slices = K;
    for (int k = 0; k < K; ++k)
        for (Vec& x : stage_result[k]) {
            D.points.push_back(std::move(x));
            D.slice_of.push_back(k + 1);
        }
    res.design = std::move(D);
    return res;
}

SolveResult run(const Region& region, const SolverConfig& cfg) {
    switch (cfg.method) {
        case Method::MHED:
        case Method::ComM:
            return run_oneshot(region, cfg);
        case Method::SeqHED:
        case Method::SeqM:
            return run_sequential(region, cfg);
    }
    throw std::invalid_argument("solver: unknown method");
}

}  // namespace smd
