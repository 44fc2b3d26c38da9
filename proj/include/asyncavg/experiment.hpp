#pragma once

#include "asyncavg/error.hpp"
#include "asyncavg/switched_model.hpp"
#include "asyncavg/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace asyncavg {

/// Process exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitDomain = 2,
    kExitVerification = 3,
};

/// Parsed and validated experiment document. Exactly one of "matrix" or
/// "graph" defines A; rationals are accepted as "p/q" strings anywhere a real
/// is expected.
struct ExperimentConfig {
    WeightMatrix a;
    DelayDistribution delays;
    Eigen::VectorXd x0;
    std::size_t runs = 1000;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::size_t max_iters = 1'000'000;
    std::size_t trajectory_stride = 0;
    std::filesystem::path output_dir = ".";
};

/// Throws Error{ConfigParse} with line/column or field-path diagnostics, and
/// the owning module's validation errors for bad matrices or laws.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

struct CommandOptions {
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    bool quiet = false;
};

/// Maps an error kind onto the exit-code table.
int exit_code_for(ErrorKind kind) noexcept;

int cmd_analyze(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);
int cmd_simulate(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_verify(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
               std::ostream& err);
int cmd_report(const std::filesystem::path& analysis_csv, const std::filesystem::path& ensemble_csv,
               const CommandOptions& opts, std::ostream& out, std::ostream& err);

} // namespace asyncavg
