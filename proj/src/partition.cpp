#include "smd/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "smd/solver.hpp"

namespace smd {

namespace {

void check_plan(const Points& D, const PartitionPlan& plan) {
    if (D.empty()) throw std::invalid_argument("partition: empty point set");
    int total = 0;
    for (int s : plan.sizes) {
        if (s < 1) throw std::invalid_argument("partition: sizes must be >= 1");
        total += s;
    }
    if (total != static_cast<int>(D.size()))
        throw std::invalid_argument("partition: sizes do not sum to the point count");
}

// Continuous prototypes: plain support-point MM against the pool's
// empirical distribution, unconstrained (prototypes are transient).
Points fit_prototypes(const Points& pool, int count, Rng& rng) {
    std::vector<int> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> noise(-1e-4, 1e-4);
    Points protos;
    protos.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vec x = pool[idx[i]];
        for (int c = 0; c < x.size(); ++c) x[c] += noise(rng);
        protos.push_back(std::move(x));
    }
    const Points empty;
    for (int t = 0; t < 200; ++t) {
        Points next;
        try {
            next = mm_update_sequential_raw(protos, empty, pool, 0.0);
        } catch (const ZeroDistanceError&) {
            for (Vec& x : protos)
                for (int c = 0; c < x.size(); ++c) x[c] += noise(rng);
            continue;
        }
        double move = 0.0;
        for (std::size_t i = 0; i < protos.size(); ++i)
            move = std::max(move, dist(protos[i], next[i]));
        protos = std::move(next);
        if (move < 1e-6) break;
    }
    return protos;
}

}  // namespace

SlicedDesign random_partition(const Points& D, const PartitionPlan& plan, Rng& rng) {
    check_plan(D, plan);
    const int K = static_cast<int>(plan.sizes.size());
    std::vector<int> labels;
    for (int k = 0; k < K; ++k) labels.insert(labels.end(), plan.sizes[k], k + 1);
    std::shuffle(labels.begin(), labels.end(), rng);
    SlicedDesign out;
    out.points = D;
    out.slice_of = std::move(labels);
    out.num_slices = K;
    return out;
}

SlicedDesign energy_partition(const Points& D, const PartitionPlan& plan, Rng& rng) {
    check_plan(D, plan);
    const int K = static_cast<int>(plan.sizes.size());
    const int n = static_cast<int>(D.size());

    // Process ascending by size; the constraint forces the last subset to
    // take whatever remains.
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return plan.sizes[a] < plan.sizes[b]; });

    std::vector<int> label_of(n, 0);
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);

    for (int stage = 0; stage + 1 < K; ++stage) {
        const int slice = order[stage];
        const int nk = plan.sizes[slice];
        if (pool.empty()) throw std::runtime_error("partition: pool exhausted early");
        Points pool_pts;
        pool_pts.reserve(pool.size());
        for (int i : pool) pool_pts.push_back(D[i]);
        Points protos = fit_prototypes(pool_pts, nk, rng);
        for (const Vec& proto : protos) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < pool.size(); ++s) {
                double d = dist(proto, D[pool[s]]);
                if (d < best_d) {  // strict: ties keep the lowest pool index
                    best_d = d;
                    best = static_cast<int>(s);
                }
            }
            label_of[pool[best]] = slice + 1;
            pool.erase(pool.begin() + best);
        }
    }
    for (int i : pool) label_of[i] = order[K - 1] + 1;

    // Swap-descent polish over labelings, evaluated on a precomputed
    // distance matrix. The matched labeling competes with a few shuffled
    // restarts; sizes are preserved because only labels trade places.
    Mat dmat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dmat(i, j) = dist(D[i], D[j]);
    double full_mean = dmat.sum() / (static_cast<double>(n) * n);

    auto objective = [&](const std::vector<int>& labels) {
        double total = 0.0;
        for (int k = 1; k <= K; ++k) {
            double cross = 0.0, self = 0.0;
            int nk = 0;
            for (int i = 0; i < n; ++i) {
                if (labels[i] != k) continue;
                ++nk;
                for (int j = 0; j < n; ++j) {
                    cross += dmat(i, j);
                    if (labels[j] == k) self += dmat(i, j);
                }
            }
            double nkd = nk;
            total += nkd / n * (2.0 * cross / (nkd * n) - self / (nkd * nkd) - full_mean);
        }
        return total;
    };
    auto polish = [&](std::vector<int>& labels) {
        double cur = objective(labels);
        for (int round = 0; round < 100; ++round) {
            bool improved = false;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    if (labels[i] == labels[j]) continue;
                    std::swap(labels[i], labels[j]);
                    double cand = objective(labels);
                    if (cand < cur - 1e-14) {
                        cur = cand;
                        improved = true;
                    } else {
                        std::swap(labels[i], labels[j]);
                    }
                }
            if (!improved) break;
        }
        return cur;
    };

    std::vector<int> best_labels = label_of;
    double best_obj = polish(best_labels);
    if (K > 1) {
        // Restart pool built in processing order so that permuting the
        // requested sizes renames labels without changing the search path.
        std::vector<int> base;
        for (int stage = 0; stage < K; ++stage)
            base.insert(base.end(), plan.sizes[order[stage]], order[stage] + 1);
        for (int restart = 0; restart < 8; ++restart) {
            std::vector<int> labels = base;
            std::shuffle(labels.begin(), labels.end(), rng);
            double obj = polish(labels);
            if (obj < best_obj - 1e-14) {
                best_obj = obj;
                best_labels = std::move(labels);
            }
        }
    }

    SlicedDesign out;
    out.points = D;
    out.slice_of = std::move(best_labels);
    out.num_slices = K;
    return out;
}

double partition_objective(const SlicedDesign& D) {
    const double n = D.n();
    KahanSum acc;
    for (int k = 1; k <= D.num_slices; ++k) {
        Points slice = D.slice_points(k);
        acc.add(slice.size() / n * energy_distance(slice, D.points));
    }
    return acc.value();
}

}  // namespace smd
