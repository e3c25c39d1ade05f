#pragma once

#include "smd/energy.hpp"

namespace smd {

struct PartitionPlan {
    std::vector<int> sizes;  // n_1..n_K, must sum to |D|
};

/// Uniformly random disjoint assignment with the exact requested sizes.
SlicedDesign random_partition(const Points& D, const PartitionPlan& plan, Rng& rng);

/// Splits a full representative point set into representative subsets:
/// for each subset in ascending-size order, MM prototypes are fitted to the
/// remaining pool's empirical distribution and matched greedily to nearest
/// unassigned pool points (ties by lowest index); the final subset takes
/// the remainder. Input points are reused exactly, never moved.
SlicedDesign energy_partition(const Points& D, const PartitionPlan& plan, Rng& rng);

/// Size-weighted sum of energy distances between each slice and the full
/// design, treating the full design as the reference distribution.
double partition_objective(const SlicedDesign& D);

}  // namespace smd
