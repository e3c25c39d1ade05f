#include "smd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smd {

namespace {

Vec sample_mean(const Points& pts) {
    Vec m = Vec::Zero(pts.front().size());
    for (const Vec& x : pts) m += x;
    return m / static_cast<double>(pts.size());
}

Vec sample_sd(const Points& pts, const Vec& mean) {
    Vec v = Vec::Zero(mean.size());
    for (const Vec& x : pts) v += (x - mean).cwiseAbs2();
    return (v / static_cast<double>(pts.size())).cwiseSqrt();
}

double nearest_dist(const Vec& u, const Points& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& x : pts) best = std::min(best, dist(u, x));
    return best;
}

struct SetTerms {
    double delta_mu, delta_sigma, rmsd, mad;
    std::optional<double> mid;
};

SetTerms set_terms(const Points& pts, const Points& eval_sample, const MomentSpec& m) {
    SetTerms t{};
    Vec mean = sample_mean(pts);
    t.delta_mu = (mean - m.mu).norm();
    t.delta_sigma = (sample_sd(pts, mean) - m.sigma).norm();
    KahanSum sq;
    double worst = 0.0;
    for (const Vec& u : eval_sample) {
        double d = nearest_dist(u, pts);
        sq.add(d * d);
        worst = std::max(worst, d);
    }
    t.rmsd = std::sqrt(sq.value() / static_cast<double>(eval_sample.size()));
    t.mad = worst;
    if (pts.size() >= 2) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                best = std::min(best, dist(pts[i], pts[j]));
        t.mid = best;
    }
    return t;
}

}  // namespace

MomentSpec analytic_moments(const Region& region) {
    if (region.kind() != RegionKind::StandardSimplex)
        throw std::invalid_argument("metrics: analytic moments exist only for the simplex");
    const int p = region.dim();
    MomentSpec m;
    m.mu = Vec::Constant(p, 1.0 / p);
    m.sigma = Vec::Constant(p, std::sqrt((p - 1.0) / (double(p) * p * (p + 1.0))));
    return m;
}

MomentSpec monte_carlo_moments(const Region& region, std::size_t n_eval, Rng& rng) {
    if (n_eval < 10000)
        throw std::invalid_argument("metrics: Monte Carlo moments need n_eval >= 1e4");
    Points sample = region.sample_uniform(n_eval, rng);
    MomentSpec m;
    m.mu = sample_mean(sample);
    m.sigma = sample_sd(sample, m.mu);
    return m;
}

MomentSpec true_moments(const Region& region, Rng& rng) {
    if (region.kind() == RegionKind::StandardSimplex) return analytic_moments(region);
    return monte_carlo_moments(region, 100000, rng);
}

double MetricsReport::metric(const std::string& name) const {
    if (name == "delta_mu") return delta_mu;
    if (name == "delta_sigma") return delta_sigma;
    if (name == "rmsd") return rmsd;
    if (name == "mad") return mad;
    if (name == "mid") return mid;
    throw std::invalid_argument("metrics: unknown metric " + name);
}

MetricsReport evaluate(const SlicedDesign& D, const Points& eval_sample,
                       const MomentSpec& moments) {
    if (eval_sample.empty()) throw std::invalid_argument("metrics: empty eval sample");
    if (D.n() == 0) throw std::invalid_argument("metrics: empty design");

    MetricsReport rep;
    rep.n = D.n();
    rep.num_slices = D.num_slices;
    rep.eval_size = eval_sample.size();

    SetTerms full = set_terms(D.points, eval_sample, moments);
    rep.full_delta_mu = full.delta_mu;
    rep.full_delta_sigma = full.delta_sigma;
    rep.full_rmsd = full.rmsd;
    rep.full_mad = full.mad;
    rep.full_mid = full.mid;

    rep.delta_mu = full.delta_mu;
    rep.delta_sigma = full.delta_sigma;
    rep.rmsd = full.rmsd;
    rep.mad = full.mad;
    rep.mid = full.mid.value_or(0.0);
    if (!full.mid) rep.mid_complete = false;

    for (int k = 1; k <= D.num_slices; ++k) {
        Points slice = D.slice_points(k);
        if (slice.empty()) throw std::invalid_argument("metrics: empty slice");
        SetTerms t = set_terms(slice, eval_sample, moments);
        rep.slice_delta_mu.push_back(t.delta_mu);
        rep.slice_delta_sigma.push_back(t.delta_sigma);
        rep.slice_rmsd.push_back(t.rmsd);
        rep.slice_mad.push_back(t.mad);
        rep.slice_mid.push_back(t.mid);
        rep.delta_mu += t.delta_mu;
        rep.delta_sigma += t.delta_sigma;
        rep.rmsd += t.rmsd;
        rep.mad += t.mad;
        if (t.mid)
            rep.mid += *t.mid;
        else
            rep.mid_complete = false;
    }
    return rep;
}

double quantile_of(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("metrics: quantile of empty set");
    std::sort(values.begin(), values.end());
    double pos = q * (values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double median_of(std::vector<double> values) { return quantile_of(std::move(values), 0.5); }

std::vector<CompareRow> compare(const std::vector<std::pair<std::string, SlicedDesign>>& designs,
                                const Region& region, int replicates, std::size_t eval_size,
                                Rng& rng) {
    if (replicates < 1) throw std::invalid_argument("metrics: replicates must be >= 1");
    Rng moment_rng(rng());
    MomentSpec moments = true_moments(region, moment_rng);
    std::vector<std::vector<MetricsReport>> results(designs.size());
    for (int r = 0; r < replicates; ++r) {
        Points eval_sample = region.sample_uniform(eval_size, rng);
        for (std::size_t d = 0; d < designs.size(); ++d)
            results[d].push_back(evaluate(designs[d].second, eval_sample, moments));
    }
    std::vector<CompareRow> rows;
    for (std::size_t d = 0; d < designs.size(); ++d) {
        for (const std::string& name : metric_names()) {
            std::vector<double> vals;
            for (const MetricsReport& rep : results[d]) vals.push_back(rep.metric(name));
            CompareRow row;
            row.label = designs[d].first;
            row.metric = name;
            row.median = median_of(vals);
            row.q1 = quantile_of(vals, 0.25);
            row.q3 = quantile_of(vals, 0.75);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace smd
