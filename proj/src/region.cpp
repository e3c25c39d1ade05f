#include "smd/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace smd {

namespace {

// Euclidean projection onto the standard simplex (sort and threshold).
Vec project_standard_simplex(const Vec& v) {
    const int p = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + p);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (int i = 0; i < p; ++i) {
        cumsum += u[i];
        double t = (cumsum - 1.0) / (i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    Vec out(p);
    for (int i = 0; i < p; ++i) out[i] = std::max(v[i] - theta, 0.0);
    return out;
}

// Dykstra's alternating projections onto an intersection of convex sets.
Vec dykstra(const Vec& x0, const std::vector<std::function<Vec(const Vec&)>>& projectors,
            const std::function<bool(const Vec&)>& feasible, double tol, int max_sweeps) {
    Vec x = x0;
    std::vector<Vec> increments(projectors.size(), Vec::Zero(x0.size()));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Vec x_prev = x;
        for (std::size_t s = 0; s < projectors.size(); ++s) {
            Vec y = x + increments[s];
            Vec px = projectors[s](y);
            increments[s] = y - px;
            x = px;
        }
        if ((x - x_prev).norm() < tol && feasible(x)) return x;
    }
    throw std::runtime_error("region: projection did not converge");
}

}  // namespace

Region Region::simplex(int p) {
    if (p < 1) throw std::invalid_argument("region: p must be positive");
    Region r;
    r.p_ = p;
    r.kind_ = RegionKind::StandardSimplex;
    r.ineq_A_ = -Mat::Identity(p, p);
    r.ineq_b_ = Vec::Zero(p);
    r.eq_C_ = Mat::Ones(1, p);
    r.eq_d_ = Vec::Ones(1);
    r.finalize();
    return r;
}

Region Region::bounded(const Vec& lower, const Vec& upper) {
    const int p = static_cast<int>(lower.size());
    if (upper.size() != p || p < 1)
        throw std::invalid_argument("region: bound vectors must agree in size");
    for (int i = 0; i < p; ++i) {
        if (lower[i] > upper[i])
            throw std::invalid_argument("region: lower bound exceeds upper bound");
        if (lower[i] < 0.0 || upper[i] > 1.0)
            throw std::invalid_argument("region: bounds must lie in [0,1]");
    }
    if (lower.sum() > 1.0 + 1e-12 || upper.sum() < 1.0 - 1e-12)
        throw std::invalid_argument("region: bounds are infeasible on the simplex");
    Region r;
    r.p_ = p;
    r.kind_ = RegionKind::BoundedSimplex;
    r.lower_ = lower;
    r.upper_ = upper;
    r.ineq_A_.resize(2 * p, p);
    r.ineq_b_.resize(2 * p);
    r.ineq_A_.topRows(p) = Mat::Identity(p, p);
    r.ineq_b_.head(p) = upper;
    r.ineq_A_.bottomRows(p) = -Mat::Identity(p, p);
    r.ineq_b_.tail(p) = -lower;
    r.eq_C_ = Mat::Ones(1, p);
    r.eq_d_ = Vec::Ones(1);
    r.finalize();
    return r;
}

Region Region::polytope(const Mat& A, const Vec& b, const Mat& C, const Vec& d) {
    const int p = static_cast<int>(A.cols());
    if (p < 1 || C.cols() != p || A.rows() != b.size() || C.rows() != d.size())
        throw std::invalid_argument("region: inconsistent constraint dimensions");
    bool has_sum_row = false;
    for (int i = 0; i < C.rows(); ++i) {
        if ((C.row(i).transpose() - Vec::Ones(p)).norm() < 1e-12 &&
            std::abs(d[i] - 1.0) < 1e-12)
            has_sum_row = true;
    }
    if (!has_sum_row)
        throw std::invalid_argument("region: equality system must include the sum-to-one row");
    Region r;
    r.p_ = p;
    r.kind_ = RegionKind::LinearPolytope;
    r.ineq_A_ = A;
    r.ineq_b_ = b;
    r.eq_C_ = C;
    r.eq_d_ = d;
    r.finalize();
    if (!r.contains(r.interior_, 1e-9))
        throw std::invalid_argument("region: no feasible point found, region is empty");
    return r;
}

void Region::finalize() {
    auto cod = eq_C_.completeOrthogonalDecomposition();
    eq_pinv_ = cod.pseudoInverse();
    null_proj_ = Mat::Identity(p_, p_) - eq_pinv_ * eq_C_;

    // Interior point per kind.
    if (kind_ == RegionKind::StandardSimplex) {
        interior_ = Vec::Constant(p_, 1.0 / p_);
    } else if (kind_ == RegionKind::BoundedSimplex) {
        Vec mid = 0.5 * (lower_ + upper_);
        double s = mid.sum();
        Vec x = (s > 0.0) ? Vec(mid / s) : Vec(Vec::Constant(p_, 1.0 / p_));
        if (!contains(x, 1e-9)) x = project(mid);
        interior_ = x;
    } else {
        // Start on the equality-affine subspace, repair feasibility, then
        // push away from the tightest inequality by projected subgradient
        // ascent on the minimum normalized slack.
        Vec x = eq_pinv_ * eq_d_;
        if (!contains(x, 1e-9)) {
            try {
                x = project(x);
            } catch (const std::runtime_error&) {
                // keep x, ascent below may still rescue a feasible point
            }
        }
        double step = 0.1;
        for (int it = 0; it < 2000; ++it) {
            int tight = 0;
            double worst = std::numeric_limits<double>::infinity();
            for (int i = 0; i < ineq_A_.rows(); ++i) {
                double nrm = ineq_A_.row(i).norm();
                if (nrm < 1e-14) continue;
                double slack = (ineq_b_[i] - ineq_A_.row(i).dot(x)) / nrm;
                if (slack < worst) {
                    worst = slack;
                    tight = i;
                }
            }
            if (worst > 0.2) break;
            Vec g = -ineq_A_.row(tight).transpose() / ineq_A_.row(tight).norm();
            Vec gproj = null_proj_ * g;
            if (gproj.norm() < 1e-12) break;
            Vec cand = x + step * gproj.normalized();
            if (min_normalized_slack(cand) > worst) {
                x = cand;
            } else {
                step *= 0.5;
                if (step < 1e-12) break;
            }
        }
        interior_ = x;
    }
    degenerate_ = min_normalized_slack(interior_) < 1e-6;
}

double Region::min_normalized_slack(const Vec& x) const {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ineq_A_.rows(); ++i) {
        double nrm = ineq_A_.row(i).norm();
        if (nrm < 1e-14) continue;
        worst = std::min(worst, (ineq_b_[i] - ineq_A_.row(i).dot(x)) / nrm);
    }
    return worst;
}

bool Region::contains(const Vec& x, double tol) const {
    if (x.size() != p_) throw std::invalid_argument("region: point dimension mismatch");
    if (!x.allFinite() || tol < 0.0)
        throw std::invalid_argument("region: point must be finite, tol nonnegative");
    for (int i = 0; i < ineq_A_.rows(); ++i)
        if (ineq_A_.row(i).dot(x) > ineq_b_[i] + tol) return false;
    for (int i = 0; i < eq_C_.rows(); ++i)
        if (std::abs(eq_C_.row(i).dot(x) - eq_d_[i]) > tol) return false;
    return true;
}

Vec Region::project(const Vec& x) const {
    if (x.size() != p_) throw std::invalid_argument("region: point dimension mismatch");
    if (contains(x, 1e-9)) return x;
    if (kind_ == RegionKind::StandardSimplex) return project_standard_simplex(x);

    std::vector<std::function<Vec(const Vec&)>> projectors;
    // Equality subspace first; halfspace/box projections follow.
    projectors.push_back([this](const Vec& v) -> Vec {
        return v - eq_pinv_ * (eq_C_ * v - eq_d_);
    });
    if (kind_ == RegionKind::BoundedSimplex) {
        projectors.push_back([this](const Vec& v) -> Vec {
            return v.cwiseMax(lower_).cwiseMin(upper_);
        });
    } else {
        for (int i = 0; i < ineq_A_.rows(); ++i) {
            projectors.push_back([this, i](const Vec& v) -> Vec {
                double viol = ineq_A_.row(i).dot(v) - ineq_b_[i];
                double nrm2 = ineq_A_.row(i).squaredNorm();
                if (viol <= 0.0 || nrm2 < 1e-28) return v;
                return v - (viol / nrm2) * ineq_A_.row(i).transpose();
            });
        }
    }
    auto feasible = [this](const Vec& v) { return contains(v, 1e-9); };
    return dykstra(x, projectors, feasible, 1e-10, 100000);
}

Vec Region::hit_and_run_step(Vec x, Rng& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 32; ++attempt) {
        Vec g(p_);
        for (int i = 0; i < p_; ++i) g[i] = gauss(rng);
        Vec v = null_proj_ * g;
        double nrm = v.norm();
        if (nrm < 1e-12) return x;  // null space empty: single-point region
        v /= nrm;
        double t_lo = -std::numeric_limits<double>::infinity();
        double t_hi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < ineq_A_.rows(); ++i) {
            double denom = ineq_A_.row(i).dot(v);
            double room = ineq_b_[i] - ineq_A_.row(i).dot(x);
            if (denom > 1e-14)
                t_hi = std::min(t_hi, room / denom);
            else if (denom < -1e-14)
                t_lo = std::max(t_lo, room / denom);
            else if (room < -1e-9)
                t_hi = t_lo - 1.0;  // off the chord entirely
        }
        if (!(t_hi > t_lo) || !std::isfinite(t_hi) || !std::isfinite(t_lo)) continue;
        std::uniform_real_distribution<double> u(t_lo, t_hi);
        return x + u(rng) * v;
    }
    return x;
}

Points Region::hit_and_run(std::size_t count, Rng& rng) const {
    Points out;
    out.reserve(count);
    Vec x = interior_;
    const int burn = 10 * p_;
    for (std::size_t c = 0; c < count; ++c) {
        for (int s = 0; s < burn; ++s) x = hit_and_run_step(x, rng);
        out.push_back(x);
    }
    return out;
}

Points Region::sample_uniform(std::size_t count, Rng& rng) const {
    if (count < 1) throw std::invalid_argument("region: count must be positive");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw_simplex = [&]() {
        // Normalized exponential spacings, the flat Dirichlet.
        Vec x(p_);
        for (int i = 0; i < p_; ++i) x[i] = -std::log(1.0 - unif(rng));
        return Vec(x / x.sum());
    };
    if (kind_ == RegionKind::StandardSimplex) {
        Points out;
        out.reserve(count);
        for (std::size_t c = 0; c < count; ++c) out.push_back(draw_simplex());
        return out;
    }
    if (kind_ == RegionKind::BoundedSimplex && !degenerate_) {
        Points out;
        out.reserve(count);
        std::size_t budget = 10000 * count;
        std::size_t attempts = 0;
        while (out.size() < count && attempts < budget) {
            ++attempts;
            Vec x = draw_simplex();
            bool ok = true;
            for (int i = 0; i < p_ && ok; ++i)
                ok = x[i] >= lower_[i] && x[i] <= upper_[i];
            if (ok) out.push_back(std::move(x));
        }
        if (out.size() == count) return out;
        // Too-thin box for rejection; remaining points via hit-and-run.
        Points rest = hit_and_run(count - out.size(), rng);
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    }
    return hit_and_run(count, rng);
}

}  // namespace smd
