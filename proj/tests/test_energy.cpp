#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "smd/energy.hpp"

using namespace smd;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

// Independent naive evaluator of the energy distance, plain double loops.
double naive_energy(const Points& P, const Points& Q) {
    double cross = 0, self_p = 0, self_q = 0;
    for (const Vec& a : P)
        for (const Vec& b : Q) cross += (a - b).norm();
    for (const Vec& a : P)
        for (const Vec& b : P) self_p += (a - b).norm();
    for (const Vec& a : Q)
        for (const Vec& b : Q) self_q += (a - b).norm();
    double np = P.size(), nq = Q.size();
    return 2.0 * cross / (np * nq) - self_p / (np * np) - self_q / (nq * nq);
}

Points random_points(int n, int p, Rng& rng) {
    Region T = Region::simplex(p);
    return T.sample_uniform(n, rng);
}

SlicedDesign random_design(int n, int K, int p, Rng& rng) {
    SlicedDesign D;
    D.points = random_points(n, p, rng);
    D.num_slices = K;
    for (int i = 0; i < n; ++i) D.slice_of.push_back(i % K + 1);
    return D;
}

}  // namespace

TEST_CASE("mean cross distance basics") {
    Points a = {v3(1, 0, 0)};
    CHECK(mean_cross_distance(a, a) == doctest::Approx(0.0));
    Points b = {v3(0, 1, 0)};
    CHECK(mean_cross_distance(a, b) == doctest::Approx(std::sqrt(2.0)));
    Points p = {v2(1, 0), v2(0, 1)};
    Points q = {v2(0.5, 0.5)};
    CHECK(mean_cross_distance(p, q) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(mean_cross_distance(p, q) == mean_cross_distance(q, p));
    CHECK_THROWS_AS(mean_cross_distance(a, p), std::invalid_argument);
}

TEST_CASE("energy distance basics and oracle equivalence") {
    Points a = {v3(1, 0, 0)};
    Points b = {v3(0, 1, 0)};
    CHECK(energy_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(energy_distance(a, b) == doctest::Approx(2.0 * std::sqrt(2.0)));

    Rng rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        Points P = random_points(10, 3, rng);
        Points ref = random_points(500, 3, rng);
        CHECK(std::abs(energy_distance(P, ref) - naive_energy(P, ref)) < 1e-12);
    }
    // duplicate points allowed
    Points dup = {v3(0.5, 0.25, 0.25), v3(0.5, 0.25, 0.25)};
    Points ref = random_points(50, 3, rng);
    CHECK(std::abs(energy_distance(dup, ref) - naive_energy(dup, ref)) < 1e-12);
}

TEST_CASE("energy distance nonnegativity") {
    Rng rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        Points P = random_points(5 + rep % 10, 3, rng);
        Points Q = random_points(30, 3, rng);
        CHECK(energy_distance(P, Q) >= -1e-12);
    }
}

TEST_CASE("reference sample caches its self energy") {
    Rng rng(3);
    ReferenceSample ref = ReferenceSample::draw(Region::simplex(3), 200, rng);
    CHECK(std::abs(ref.self_energy() - mean_cross_distance(ref.points, ref.points)) < 1e-12);
}

TEST_CASE("decomposition identity") {
    Rng rng(4);
    SUBCASE("K=1 degenerates") {
        SlicedDesign D = random_design(8, 1, 3, rng);
        ReferenceSample ref = ReferenceSample::from_points(random_points(200, 3, rng));
        DecompositionReport rep = decompose(D, ref);
        CHECK(rep.residual < 1e-12);
        CHECK(rep.per_slice_energies[0] == doctest::Approx(rep.full_energy).epsilon(1e-12));
    }
    SUBCASE("identical slices collapse to one slice's energy") {
        Points base = random_points(6, 3, rng);
        SlicedDesign D;
        D.num_slices = 3;
        for (int k = 1; k <= 3; ++k)
            for (const Vec& x : base) {
                D.points.push_back(x);
                D.slice_of.push_back(k);
            }
        ReferenceSample ref = ReferenceSample::from_points(random_points(300, 3, rng));
        DecompositionReport rep = decompose(D, ref);
        CHECK(std::abs(rep.full_energy - rep.per_slice_energies[0]) < 1e-12);
    }
    SUBCASE("random designs, residual bound") {
        SlicedDesign D = random_design(30, 3, 3, rng);
        // uneven sizes (5,10,15)
        D.slice_of.clear();
        for (int i = 0; i < 5; ++i) D.slice_of.push_back(1);
        for (int i = 0; i < 10; ++i) D.slice_of.push_back(2);
        for (int i = 0; i < 15; ++i) D.slice_of.push_back(3);
        ReferenceSample ref = ReferenceSample::from_points(random_points(1000, 3, rng));
        DecompositionReport rep = decompose(D, ref);
        CHECK(rep.residual <= 1e-10 * std::max(1.0, std::abs(rep.full_energy)));
        CHECK(rep.cross_energies.diagonal().norm() == 0.0);
        CHECK((rep.cross_energies - rep.cross_energies.transpose()).norm() == 0.0);
    }
    SUBCASE("empty slice rejected") {
        SlicedDesign D = random_design(4, 2, 3, rng);
        for (int& lbl : D.slice_of) lbl = 1;
        CHECK_THROWS_AS(decompose(D, ReferenceSample::from_points(random_points(50, 3, rng))),
                        std::invalid_argument);
    }
}

TEST_CASE("two-slice specialization") {
    Rng rng(5);
    SlicedDesign D = random_design(20, 2, 3, rng);
    ReferenceSample ref = ReferenceSample::from_points(random_points(400, 3, rng));
    auto sizes = D.sizes();
    double n = D.n();
    double e1 = energy_distance(D.slice_points(1), ref);
    double e2 = energy_distance(D.slice_points(2), ref);
    double e12 = energy_distance(D.slice_points(1), D.slice_points(2));
    double rhs = sizes[0] / n * e1 + sizes[1] / n * e2 - sizes[0] * sizes[1] / (n * n) * e12;
    CHECK(std::abs(energy_distance(D.points, ref) - rhs) < 1e-10);
}

TEST_CASE("upper bound by slice energies") {
    Rng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        SlicedDesign D = random_design(12, 3, 3, rng);
        ReferenceSample ref = ReferenceSample::from_points(random_points(200, 3, rng));
        DecompositionReport r = decompose(D, ref);
        auto sizes = D.sizes();
        double bound = 0;
        for (int k = 0; k < 3; ++k) bound += sizes[k] / double(D.n()) * r.per_slice_energies[k];
        CHECK(r.full_energy >= -1e-12);
        CHECK(r.full_energy <= bound + 1e-10);
    }
}

TEST_CASE("hybrid criterion") {
    Rng rng(7);
    SlicedDesign D = random_design(20, 2, 3, rng);
    ReferenceSample ref = ReferenceSample::from_points(random_points(300, 3, rng));
    double full = energy_distance(D.points, ref);
    double h0 = hybrid_energy(D, ref, 0.0);
    double h1 = hybrid_energy(D, ref, 1.0);
    double h_half = hybrid_energy(D, ref, 0.5);
    CHECK(h1 == doctest::Approx(full).epsilon(1e-12));
    auto sizes = D.sizes();
    double weighted = 0;
    for (int k = 1; k <= 2; ++k)
        weighted += sizes[k - 1] / double(D.n()) * energy_distance(D.slice_points(k), ref);
    CHECK(h0 == doctest::Approx(weighted).epsilon(1e-12));
    CHECK(std::abs(h_half - 0.5 * (h0 + h1)) < 1e-12);  // affine in lambda
    CHECK_THROWS_AS(hybrid_energy(D, ref, 1.5), std::invalid_argument);
}

TEST_CASE("hybrid matches the subset-only expansion") {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        SlicedDesign D = random_design(15, 3, 3, rng);
        ReferenceSample ref = ReferenceSample::from_points(random_points(200, 3, rng));
        double lambda = (rep % 5) / 4.0;
        DecompositionReport r = decompose(D, ref);
        auto sizes = D.sizes();
        double n = D.n();
        double expanded = 0;
        for (int k = 0; k < 3; ++k) expanded += sizes[k] / n * r.per_slice_energies[k];
        for (int k1 = 0; k1 < 3; ++k1)
            for (int k2 = 0; k2 < 3; ++k2)
                expanded -=
                    lambda * sizes[k1] * sizes[k2] / (2 * n * n) * r.cross_energies(k1, k2);
        double h = hybrid_energy(D, ref, lambda);
        CHECK(std::abs(h - expanded) <= 1e-10 * std::max(1.0, std::abs(h)));
    }
}

TEST_CASE("solver objective differs from the hybrid by the self-energy constant") {
    Rng rng(9);
    SlicedDesign D = random_design(12, 2, 3, rng);
    ReferenceSample ref = ReferenceSample::from_points(random_points(250, 3, rng));
    for (double lambda : {0.0, 0.3, 1.0}) {
        double h = objective_h(D, ref, lambda);
        double hy = hybrid_energy(D, ref, lambda);
        CHECK(std::abs(h - ref.self_energy() - hy) <= 1e-10 * std::max(1.0, std::abs(h)));
    }
}

TEST_CASE("solver objective, single point") {
    Rng rng(10);
    ReferenceSample ref = ReferenceSample::from_points(random_points(100, 3, rng));
    SlicedDesign D;
    D.points = {v3(0.2, 0.3, 0.5)};
    D.slice_of = {1};
    D.num_slices = 1;
    double expect = 0;
    for (const Vec& y : ref.points) expect += (D.points[0] - y).norm();
    expect *= 2.0 / ref.size();
    CHECK(objective_h(D, ref, 0.7) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("solver objective tolerates duplicate points") {
    Rng rng(11);
    ReferenceSample ref = ReferenceSample::from_points(random_points(100, 3, rng));
    SlicedDesign D;
    D.points = {v3(0.2, 0.3, 0.5), v3(0.2, 0.3, 0.5)};
    D.slice_of = {1, 1};
    D.num_slices = 1;
    CHECK(std::isfinite(objective_h(D, ref, 1.0)));
}

TEST_CASE("sequential stage objective") {
    Rng rng(12);
    ReferenceSample ref = ReferenceSample::from_points(random_points(500, 3, rng));
    Points P_k = random_points(8, 3, rng);
    Points P_c = random_points(12, 3, rng);

    SUBCASE("empty accumulated set collapses") {
        double with_c0 = objective_h_seq(P_k, {}, ref, 0.9);
        double lam0 = objective_h_seq(P_k, P_c, ref, 0.0);
        // lambda_k = 0 removes every P_c term
        double nk = P_k.size(), N = ref.size();
        double expect = 0;
        for (const Vec& x : P_k)
            for (const Vec& y : ref.points) expect += 2.0 / (nk * N) * (x - y).norm();
        for (const Vec& a : P_k)
            for (const Vec& b : P_k) expect -= (a - b).norm() / (nk * nk);
        CHECK(std::abs(with_c0 - expect) < 1e-10);
        CHECK(std::abs(lam0 - expect) < 1e-10);
    }
    SUBCASE("triple-loop oracle") {
        double lambda_k = 0.6;
        double nk = P_k.size(), nc = P_c.size(), N = ref.size();
        double val = 0;
        for (const Vec& x : P_k)
            for (const Vec& y : ref.points) val += 2.0 / (nk * N) * (x - y).norm();
        for (const Vec& a : P_k)
            for (const Vec& b : P_k)
                val -= (1.0 - lambda_k * nc / (nc + nk)) / (nk * nk) * (a - b).norm();
        for (const Vec& a : P_k)
            for (const Vec& b : P_c)
                val -= 2.0 * lambda_k / ((nc + nk) * nk) * (a - b).norm();
        CHECK(std::abs(objective_h_seq(P_k, P_c, ref, lambda_k) - val) < 1e-12);
    }
}

TEST_CASE("permutation invariance of pairwise sums") {
    Rng rng(13);
    Points P = random_points(15, 3, rng);
    Points Q = random_points(25, 3, rng);
    double base = mean_cross_distance(P, Q);
    std::shuffle(P.begin(), P.end(), rng);
    std::shuffle(Q.begin(), Q.end(), rng);
    CHECK(std::abs(mean_cross_distance(P, Q) - base) < 1e-12);
}
