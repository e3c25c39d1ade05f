#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smd/metrics.hpp"

using namespace smd;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

SlicedDesign design_from(Points pts, std::vector<int> labels, int K) {
    SlicedDesign D;
    D.points = std::move(pts);
    D.slice_of = std::move(labels);
    D.num_slices = K;
    return D;
}

}  // namespace

TEST_CASE("analytic moments") {
    MomentSpec m3 = analytic_moments(Region::simplex(3));
    CHECK((m3.mu - Vec::Constant(3, 1.0 / 3)).norm() < 1e-15);
    CHECK(m3.sigma[0] == doctest::Approx(0.23570226).epsilon(1e-7));

    MomentSpec m2 = analytic_moments(Region::simplex(2));
    CHECK(m2.sigma[0] == doctest::Approx(std::sqrt(1.0 / 12)).epsilon(1e-12));

    Vec lo(3), hi(3);
    lo << 0.1, 0.05, 0.15;
    hi << 0.8, 0.6, 0.7;
    Region B = Region::bounded(lo, hi);
    CHECK_THROWS_AS(analytic_moments(B), std::invalid_argument);
}

TEST_CASE("monte carlo moments cross-check analytic values") {
    Region T3 = Region::simplex(3);
    Rng rng(1);
    MomentSpec mc = monte_carlo_moments(T3, 200000, rng);
    MomentSpec exact = analytic_moments(T3);
    CHECK((mc.mu - exact.mu).lpNorm<Eigen::Infinity>() < 0.01);
    CHECK((mc.sigma - exact.sigma).lpNorm<Eigen::Infinity>() < 0.01);
    CHECK_THROWS_AS(monte_carlo_moments(T3, 100, rng), std::invalid_argument);
}

TEST_CASE("monte carlo moments of a bounded region respect the bounds") {
    Vec lo(3), hi(3);
    lo << 0.1, 0.05, 0.15;
    hi << 0.8, 0.6, 0.7;
    Region B = Region::bounded(lo, hi);
    Rng rng(2);
    MomentSpec m = monte_carlo_moments(B, 100000, rng);
    for (int j = 0; j < 3; ++j) {
        CHECK(m.mu[j] >= lo[j]);
        CHECK(m.mu[j] <= hi[j]);
    }
}

TEST_CASE("evaluate edge cases") {
    Region T3 = Region::simplex(3);
    MomentSpec m = analytic_moments(T3);
    Rng rng(3);
    Points eval_sample = T3.sample_uniform(500, rng);

    SUBCASE("single point at the mean") {
        SlicedDesign D = design_from({m.mu}, {1}, 1);
        MetricsReport rep = evaluate(D, eval_sample, m);
        CHECK(rep.delta_mu < 1e-14);
        CHECK_FALSE(rep.mid_complete);
        CHECK_FALSE(rep.full_mid.has_value());
    }
    SUBCASE("design equal to the eval sample zeroes rmsd and mad") {
        SlicedDesign D = design_from(eval_sample, std::vector<int>(eval_sample.size(), 1), 1);
        MetricsReport rep = evaluate(D, eval_sample, m);
        CHECK(rep.rmsd == 0.0);
        CHECK(rep.mad == 0.0);
    }
    SUBCASE("two-point MiD counts full and slice terms") {
        SlicedDesign D = design_from({v3(1, 0, 0), v3(0, 1, 0)}, {1, 1}, 1);
        MetricsReport rep = evaluate(D, eval_sample, m);
        CHECK(rep.mid == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
        CHECK(rep.mid_complete);
    }
    SUBCASE("duplicated point zeroes the slice MiD term") {
        SlicedDesign D =
            design_from({v3(0.5, 0.25, 0.25), v3(0.5, 0.25, 0.25), v3(0.2, 0.3, 0.5)},
                        {1, 1, 2}, 2);
        MetricsReport rep = evaluate(D, eval_sample, m);
        REQUIRE(rep.slice_mid[0].has_value());
        CHECK(*rep.slice_mid[0] == 0.0);
        CHECK_FALSE(rep.slice_mid[1].has_value());
        CHECK_FALSE(rep.mid_complete);
    }
}

TEST_CASE("aggregates decompose into full plus slice terms") {
    Region T3 = Region::simplex(3);
    Rng rng(4);
    SlicedDesign D;
    D.points = T3.sample_uniform(12, rng);
    D.num_slices = 3;
    for (int i = 0; i < 12; ++i) D.slice_of.push_back(i % 3 + 1);
    Points eval_sample = T3.sample_uniform(300, rng);
    MetricsReport rep = evaluate(D, eval_sample, analytic_moments(T3));

    auto total = [&](double full, const std::vector<double>& parts) {
        double t = full;
        for (double v : parts) t += v;
        return t;
    };
    CHECK(std::abs(rep.delta_mu - total(rep.full_delta_mu, rep.slice_delta_mu)) < 1e-12);
    CHECK(std::abs(rep.delta_sigma - total(rep.full_delta_sigma, rep.slice_delta_sigma)) <
          1e-12);
    CHECK(std::abs(rep.rmsd - total(rep.full_rmsd, rep.slice_rmsd)) < 1e-12);
    CHECK(std::abs(rep.mad - total(rep.full_mad, rep.slice_mad)) < 1e-12);
}

TEST_CASE("rmsd and mad shrink when every slice gains a point") {
    Region T3 = Region::simplex(3);
    Rng rng(5);
    SlicedDesign D;
    D.points = T3.sample_uniform(8, rng);
    D.num_slices = 2;
    for (int i = 0; i < 8; ++i) D.slice_of.push_back(i % 2 + 1);
    Points eval_sample = T3.sample_uniform(400, rng);
    MomentSpec m = analytic_moments(T3);
    MetricsReport before = evaluate(D, eval_sample, m);

    SlicedDesign bigger = D;
    for (int k = 1; k <= 2; ++k) {
        bigger.points.push_back(T3.sample_uniform(1, rng).front());
        bigger.slice_of.push_back(k);
    }
    MetricsReport after = evaluate(bigger, eval_sample, m);
    CHECK(after.rmsd <= before.rmsd + 1e-12);
    CHECK(after.mad <= before.mad + 1e-12);
}

TEST_CASE("order invariance") {
    Region T3 = Region::simplex(3);
    Rng rng(6);
    SlicedDesign D;
    D.points = T3.sample_uniform(10, rng);
    D.num_slices = 2;
    for (int i = 0; i < 10; ++i) D.slice_of.push_back(i % 2 + 1);
    Points eval_sample = T3.sample_uniform(200, rng);
    MomentSpec m = analytic_moments(T3);
    MetricsReport a = evaluate(D, eval_sample, m);

    // shuffle points (with labels) and the eval sample
    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    SlicedDesign E;
    E.num_slices = 2;
    for (int i : perm) {
        E.points.push_back(D.points[i]);
        E.slice_of.push_back(D.slice_of[i]);
    }
    std::shuffle(eval_sample.begin(), eval_sample.end(), rng);
    MetricsReport b = evaluate(E, eval_sample, m);
    CHECK(std::abs(a.rmsd - b.rmsd) < 1e-12);
    CHECK(std::abs(a.mad - b.mad) < 1e-12);
    CHECK(std::abs(a.mid - b.mid) < 1e-12);
}

TEST_CASE("compare summaries") {
    Region T3 = Region::simplex(3);
    Rng rng(7);
    SlicedDesign D;
    D.points = T3.sample_uniform(9, rng);
    D.num_slices = 3;
    for (int i = 0; i < 9; ++i) D.slice_of.push_back(i % 3 + 1);

    SUBCASE("single design, one replicate, equals evaluate") {
        Rng rng_cmp(11);
        auto rows = compare({{"d", D}}, T3, 1, 500, rng_cmp);
        REQUIRE(rows.size() == 5);
        Rng rng_chk(11);
        Rng moment_rng(rng_chk());
        MomentSpec m = true_moments(T3, moment_rng);
        Points eval_sample = T3.sample_uniform(500, rng_chk);
        MetricsReport rep = evaluate(D, eval_sample, m);
        for (const CompareRow& row : rows) {
            CHECK(row.median == doctest::Approx(rep.metric(row.metric)).epsilon(1e-12));
            CHECK(row.q1 == doctest::Approx(row.q3).epsilon(1e-12));
        }
    }
    SUBCASE("identical designs get identical rows") {
        Rng rng_cmp(12);
        auto rows = compare({{"a", D}, {"b", D}}, T3, 3, 300, rng_cmp);
        REQUIRE(rows.size() == 10);
        for (int i = 0; i < 5; ++i) {
            CHECK(rows[i].median == rows[i + 5].median);
            CHECK(rows[i].q1 == rows[i + 5].q1);
            CHECK(rows[i].q3 == rows[i + 5].q3);
        }
    }
    SUBCASE("replicates must be positive") {
        Rng rng_cmp(13);
        CHECK_THROWS_AS(compare({{"d", D}}, T3, 0, 100, rng_cmp), std::invalid_argument);
    }
}
