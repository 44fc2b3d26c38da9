#pragma once

#include "asyncavg/switched_model.hpp"
#include "asyncavg/topology.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string_view>
#include <vector>

namespace asyncavg {

/// Human-readable record of the generator and sub-stream derivation, written
/// into summary artifacts.
inline constexpr std::string_view kRngDescription =
    "mt19937_64 per run, seeded with splitmix64(seed ^ splitmix64(run)); "
    "uniforms = (draw >> 11) * 2^-53; delays drawn link-major within each step";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent, reproducible random stream for one ensemble replica.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t run);

    std::uint64_t next() { return engine_(); }
    /// Uniform double in [0, 1) with 53 random bits; platform independent.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct SimulationConfig {
    WeightMatrix a;
    DelayDistribution delays;
    Eigen::VectorXd x0;
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::size_t max_iters = 1'000'000;
    /// Record x(k) every stride steps (k = 0 included); 0 records nothing.
    std::size_t trajectory_stride = 0;
    /// Optional per-step laws, cycled by step index (independent but not
    /// identically distributed delays). Empty means `delays` every step.
    std::vector<DelayDistribution> step_laws{};
    /// Worker threads for run_ensemble; 0 picks hardware concurrency.
    std::size_t threads = 0;
};

struct RunResult {
    double consensus_value = 0.0;
    std::size_t iters = 0;
    bool converged = false;
    Eigen::VectorXd final_x;
    /// Steps at which states were recorded, and the states themselves.
    std::vector<std::size_t> recorded_steps;
    std::vector<Eigen::VectorXd> recorded_states;
};

struct EnsembleResult {
    std::vector<RunResult> results;
    double empirical_mean = 0.0;
    /// Sample standard deviation; 0 with std_defined = false when runs == 1.
    double empirical_std = 0.0;
    bool std_defined = false;
    std::size_t not_converged = 0;
    /// Per recorded step, mean of x across runs (finished runs hold their
    /// final state). Empty when trajectory_stride == 0.
    std::vector<std::size_t> mean_trajectory_steps;
    std::vector<Eigen::VectorXd> mean_trajectory;
};

/// Draws one delay index per link, independently, with P(l) = pi_l.
ModeAssignment sample_mode(const DelayDistribution& delays,
                           const std::shared_ptr<const std::vector<Edge>>& links, SubstreamRng& rng);

/// Iterates y(k+1) = W_sigma(k) y(k) through its block action on a rolling
/// history of q states, starting from q copies of x0, until the spread of all
/// nq components is <= tol or max_iters steps were taken.
RunResult run_single(const SimulationConfig& config, SubstreamRng& rng);

/// Replica r uses SubstreamRng(seed, r). Aggregation is in run order, so the
/// result does not depend on thread scheduling.
EnsembleResult run_ensemble(const SimulationConfig& config);

void write_ensemble_csv(std::ostream& out, const EnsembleResult& ensemble);
/// Rows (run, k, node, value), node 1-indexed.
void write_trajectory_csv(std::ostream& out, const EnsembleResult& ensemble);

} // namespace asyncavg
