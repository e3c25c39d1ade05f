#pragma once

#include <optional>
#include <string>

#include "smd/metrics.hpp"
#include "smd/partition.hpp"
#include "smd/solver.hpp"

namespace smd::cli {

/// Config or usage problem; maps to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<Region> region;
    std::vector<int> sizes;
    SolverConfig solver;
    std::string design_path;
    std::string report_path;
    std::string trace_path;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Method method_from_string(const std::string& name);

/// Design CSV: header `slice,x1,...,xp`, 17-significant-digit coordinates,
/// LF line endings.
void write_design_csv(const std::string& path, const SlicedDesign& D);
SlicedDesign read_design_csv(const std::string& path, int p);

int cmd_generate(const RunConfig& cfg);
int cmd_evaluate(const std::string& design_path, const RunConfig& cfg);
int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& methods, int replicates,
                const std::string& out_path);

/// Deterministic stream splitting for replicate/method sub-generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace smd::cli
