#include "smd/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace smd {

namespace {

void check_same_dim(const Points& P, const Points& Q) {
    if (P.empty() || Q.empty())
        throw std::invalid_argument("energy: point sets must be nonempty");
    if (P.front().size() != Q.front().size())
        throw std::invalid_argument("energy: point dimension mismatch");
}

}  // namespace

ReferenceSample ReferenceSample::from_points(Points pts) {
    if (pts.empty()) throw std::invalid_argument("energy: empty reference sample");
    ReferenceSample ref;
    ref.points = std::move(pts);
    return ref;
}

double ReferenceSample::self_energy() const {
    if (self_energy_ < 0.0) self_energy_ = mean_cross_distance(points, points);
    return self_energy_;
}

ReferenceSample ReferenceSample::draw(const Region& region, std::size_t count, Rng& rng) {
    return from_points(region.sample_uniform(count, rng));
}

double mean_cross_distance(const Points& P, const Points& Q) {
    check_same_dim(P, Q);
    KahanSum acc;
    for (const Vec& p : P)
        for (const Vec& q : Q) acc.add(dist(p, q));
    return acc.value() / (static_cast<double>(P.size()) * static_cast<double>(Q.size()));
}

double energy_distance(const Points& P, const Points& ref) {
    return 2.0 * mean_cross_distance(P, ref) - mean_cross_distance(P, P) -
           mean_cross_distance(ref, ref);
}

double energy_distance(const Points& P, const ReferenceSample& ref) {
    return 2.0 * mean_cross_distance(P, ref.points) - mean_cross_distance(P, P) -
           ref.self_energy();
}

DecompositionReport decompose(const SlicedDesign& D, const ReferenceSample& ref) {
    const int K = D.num_slices;
    const double n = D.n();
    auto sizes = D.sizes();
    for (int k = 0; k < K; ++k)
        if (sizes[k] == 0) throw std::invalid_argument("energy: empty slice");

    DecompositionReport rep;
    rep.full_energy = energy_distance(D.points, ref);
    rep.per_slice_energies.resize(K);
    rep.cross_energies = Mat::Zero(K, K);

    std::vector<Points> slices(K);
    for (int k = 0; k < K; ++k) slices[k] = D.slice_points(k + 1);
    std::vector<double> self(K);
    for (int k = 0; k < K; ++k) {
        self[k] = mean_cross_distance(slices[k], slices[k]);
        rep.per_slice_energies[k] =
            2.0 * mean_cross_distance(slices[k], ref.points) - self[k] - ref.self_energy();
    }
    for (int k1 = 0; k1 < K; ++k1)
        for (int k2 = k1 + 1; k2 < K; ++k2) {
            double e = 2.0 * mean_cross_distance(slices[k1], slices[k2]) - self[k1] - self[k2];
            rep.cross_energies(k1, k2) = e;
            rep.cross_energies(k2, k1) = e;
        }

    KahanSum rhs;
    for (int k = 0; k < K; ++k) rhs.add(sizes[k] / n * rep.per_slice_energies[k]);
    for (int k1 = 0; k1 < K; ++k1)
        for (int k2 = k1 + 1; k2 < K; ++k2)
            rhs.add(-sizes[k1] * sizes[k2] / (n * n) * rep.cross_energies(k1, k2));
    rep.reconstructed_full = rhs.value();
    rep.residual = std::abs(rep.full_energy - rep.reconstructed_full);
    return rep;
}

double hybrid_energy(const SlicedDesign& D, const ReferenceSample& ref, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("energy: lambda out of [0,1]");
    const double n = D.n();
    auto sizes = D.sizes();
    KahanSum acc;
    acc.add(lambda * energy_distance(D.points, ref));
    for (int k = 0; k < D.num_slices; ++k)
        acc.add((1.0 - lambda) * sizes[k] / n * energy_distance(D.slice_points(k + 1), ref));
    return acc.value();
}

double objective_h(const SlicedDesign& D, const ReferenceSample& ref, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("energy: lambda out of [0,1]");
    const double n = D.n();
    const double N = static_cast<double>(ref.size());
    auto sizes = D.sizes();
    auto idx = D.slice_indices();

    KahanSum acc;
    for (const Vec& x : D.points)
        for (const Vec& y : ref.points) acc.add(2.0 / (n * N) * dist(x, y));
    for (int k = 0; k < D.num_slices; ++k) {
        double coef = (1.0 - lambda) / (n * sizes[k]) + lambda / (n * n);
        for (int i : idx[k])
            for (int j : idx[k]) acc.add(-coef * dist(D.points[i], D.points[j]));
    }
    for (int k1 = 0; k1 < D.num_slices; ++k1)
        for (int k2 = 0; k2 < D.num_slices; ++k2) {
            if (k1 == k2) continue;
            for (int i : idx[k1])
                for (int j : idx[k2])
                    acc.add(-lambda / (n * n) * dist(D.points[i], D.points[j]));
        }
    return acc.value();
}

double objective_h_seq(const Points& P_k, const Points& P_c, const ReferenceSample& ref,
                       double lambda_k) {
    if (P_k.empty()) throw std::invalid_argument("energy: empty stage subset");
    if (lambda_k < 0.0 || lambda_k > 1.0)
        throw std::invalid_argument("energy: lambda_k out of [0,1]");
    const double nk = static_cast<double>(P_k.size());
    const double nc = static_cast<double>(P_c.size());
    const double N = static_cast<double>(ref.size());

    KahanSum acc;
    for (const Vec& x : P_k)
        for (const Vec& y : ref.points) acc.add(2.0 / (nk * N) * dist(x, y));
    double within = (1.0 - lambda_k * nc / (nc + nk)) / (nk * nk);
    for (const Vec& xi : P_k)
        for (const Vec& xj : P_k) acc.add(-within * dist(xi, xj));
    if (!P_c.empty()) {
        double cross = 2.0 * lambda_k / ((nc + nk) * nk);
        for (const Vec& xi : P_k)
            for (const Vec& xj : P_c) acc.add(-cross * dist(xi, xj));
    }
    return acc.value();
}

}  // namespace smd
