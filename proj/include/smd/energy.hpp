#pragma once

#include <cstddef>

#include "smd/common.hpp"
#include "smd/design.hpp"

namespace smd {

/// Monte-Carlo stand-in for the target distribution: a large uniform
/// sample with its mean pairwise distance cached on first use (it costs
/// O(N^2) and the solver iterations never need it).
struct ReferenceSample {
    Points points;

    static ReferenceSample from_points(Points pts);
    static ReferenceSample draw(const Region& region, std::size_t count, Rng& rng);
    std::size_t size() const { return points.size(); }
    double self_energy() const;  // (1/N^2) sum_ij ||y_i - y_j||

   private:
    mutable double self_energy_ = -1.0;  // negative = not yet computed
};

/// Terms of the slice decomposition of the full-design energy distance.
struct DecompositionReport {
    double full_energy = 0.0;
    std::vector<double> per_slice_energies;  // E(F, F_{P_k})
    Mat cross_energies;                      // E(F_{P_k1}, F_{P_k2}), zero diagonal
    double reconstructed_full = 0.0;
    double residual = 0.0;
};

/// (1/(|P||Q|)) sum_ij ||p_i - q_j||, diagonal included.
double mean_cross_distance(const Points& P, const Points& Q);

/// Empirical energy distance between two point sets.
double energy_distance(const Points& P, const Points& ref);
double energy_distance(const Points& P, const ReferenceSample& ref);

DecompositionReport decompose(const SlicedDesign& D, const ReferenceSample& ref);

/// lambda * E(F, F_{P_n}) + (1-lambda) * sum_k (n_k/n) E(F, F_{P_{n_k}}).
double hybrid_energy(const SlicedDesign& D, const ReferenceSample& ref, double lambda);

/// Monte-Carlo objective the one-shot solver minimizes; equals
/// hybrid_energy plus the reference self-energy constant.
double objective_h(const SlicedDesign& D, const ReferenceSample& ref, double lambda);

/// Stage objective of the sequential solver: attraction to ref, damped
/// within-subset repulsion, repulsion from the accumulated set P_c.
double objective_h_seq(const Points& P_k, const Points& P_c, const ReferenceSample& ref,
                       double lambda_k);

}  // namespace smd
