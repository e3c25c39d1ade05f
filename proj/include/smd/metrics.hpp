#pragma once

#include <optional>
#include <string>

#include "smd/design.hpp"

namespace smd {

struct MomentSpec {
    Vec mu;     // target mean
    Vec sigma;  // target per-component standard deviation
};

/// Exact uniform-distribution moments; standard simplex only.
MomentSpec analytic_moments(const Region& region);
/// Sample moments of a fresh uniform draw from the region.
MomentSpec monte_carlo_moments(const Region& region, std::size_t n_eval, Rng& rng);
/// Analytic on the standard simplex, Monte Carlo (1e5 points) elsewhere.
MomentSpec true_moments(const Region& region, Rng& rng);

/// Uniformity criteria: each aggregate is the full-design term plus the sum
/// over slices. MiD terms of slices with fewer than two points are absent
/// and excluded from the sum, with `mid_complete` cleared.
struct MetricsReport {
    int n = 0;
    int num_slices = 0;
    std::size_t eval_size = 0;

    double delta_mu = 0.0;
    double delta_sigma = 0.0;
    double rmsd = 0.0;
    double mad = 0.0;
    double mid = 0.0;
    bool mid_complete = true;

    double full_delta_mu = 0.0, full_delta_sigma = 0.0, full_rmsd = 0.0, full_mad = 0.0;
    std::optional<double> full_mid;
    std::vector<double> slice_delta_mu, slice_delta_sigma, slice_rmsd, slice_mad;
    std::vector<std::optional<double>> slice_mid;

    double metric(const std::string& name) const;
};

MetricsReport evaluate(const SlicedDesign& D, const Points& eval_sample,
                       const MomentSpec& moments);

struct CompareRow {
    std::string label;
    std::string metric;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"delta_mu", "delta_sigma", "rmsd", "mad",
                                                   "mid"};
    return names;
}

/// Evaluates each design against a fresh eval sample per replicate and
/// summarizes each metric by median and interquartile range.
std::vector<CompareRow> compare(const std::vector<std::pair<std::string, SlicedDesign>>& designs,
                                const Region& region, int replicates, std::size_t eval_size,
                                Rng& rng);

double median_of(std::vector<double> values);
double quantile_of(std::vector<double> values, double q);

}  // namespace smd
