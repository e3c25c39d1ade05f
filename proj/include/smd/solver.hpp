#pragma once

#include <cstdint>
#include <stdexcept>

#include "smd/energy.hpp"

namespace smd {

enum class Method { MHED, SeqHED, SeqM, ComM };
enum class LambdaSchedule { Fixed, Remark1 };

struct SolverConfig {
    std::vector<int> sizes;                                // n_1..n_K
    double lambda = 0.5;                                   // hybrid weight
    LambdaSchedule lambda_schedule = LambdaSchedule::Remark1;
    std::size_t ref_size = 10000;                          // N
    std::size_t batch_size = 0;                            // N_s, 0 = full sample
    double jitter = 1e-3;                                  // tau
    double tol = 1e-6;                                     // max point movement
    int max_iter = 500;
    std::uint64_t seed = 0;
    Method method = Method::MHED;

    int total_points() const;
    void validate() const;
};

struct SolveTrace {
    std::vector<double> objective;          // h (or h^s) after each iteration
    std::vector<bool> projection_active;    // projection moved a point that iteration
    std::vector<bool> repaired;             // collision repair ran that iteration
    int iterations = 0;
    bool converged = false;
    double final_movement = 0.0;
};

struct SolveResult {
    SlicedDesign design;
    std::vector<SolveTrace> traces;  // one entry per stage; one-shot has one
    ReferenceSample ref;
};

/// Raised when an update hits a (near-)zero pairwise distance; the caller
/// must jitter-repair and retry.
struct ZeroDistanceError : std::runtime_error {
    ZeroDistanceError() : std::runtime_error("solver: zero distance in update") {}
};

/// Jittered draw without replacement from the reference sample, projected
/// onto the region.
Points init_points(const ReferenceSample& ref, int n, double tau, const Region& region,
                   Rng& rng);

/// Perturbs members of near-coincident pairs (among `points` and against
/// `others`) until all distances exceed 1e-12.
Points jitter_repair(Points points, double tau_repair, const Region& region, Rng& rng,
                     const Points* others = nullptr);

/// Closed-form surrogate minimizer for the one-shot objective, before
/// projection. Reads only the state passed in (Jacobi-style).
Points mm_update_oneshot_raw(const SlicedDesign& D, const Points& ref_batch, double lambda);
SlicedDesign mm_update_oneshot(const SlicedDesign& D, const Points& ref_batch, double lambda,
                               const Region& region, bool* projection_moved = nullptr);

/// Closed-form surrogate minimizer for one sequential stage.
Points mm_update_sequential_raw(const Points& P_k, const Points& P_c, const Points& ref_batch,
                                double lambda_k);
Points mm_update_sequential(const Points& P_k, const Points& P_c, const Points& ref_batch,
                            double lambda_k, const Region& region,
                            bool* projection_moved = nullptr);

/// Stage weight balancing full-set vs subset representativeness; 1 for the
/// first stage, otherwise (n_c + n_k) / (2 n_c) clamped to [0,1].
double default_lambda_k(int n_c, int n_k);

SolveResult run_oneshot(const Region& region, const SolverConfig& cfg);
SolveResult run_sequential(const Region& region, const SolverConfig& cfg,
                           const std::vector<int>* stage_order = nullptr);

/// Dispatch on cfg.method.
SolveResult run(const Region& region, const SolverConfig& cfg);

}  // namespace smd
