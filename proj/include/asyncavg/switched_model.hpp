#pragma once

#include "asyncavg/topology.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace asyncavg {

/// Upper limit on the number of delay assignments materialized by
/// enumerate_modes / mean_matrix_enumerated.
inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 20;

/// I.i.d. per-link delay law over {0, ..., q-1} steps. pi()[l-1] is the
/// probability of delay index l, i.e. of an (l-1)-step-old value.
class DelayDistribution {
public:
    explicit DelayDistribution(std::vector<double> pi);

    static DelayDistribution synchronous() { return DelayDistribution({1.0}); }

    [[nodiscard]] std::size_t q() const noexcept { return pi_.size(); }
    [[nodiscard]] const std::vector<double>& pi() const noexcept { return pi_; }
    /// Probability of delay index l in 1..q.
    [[nodiscard]] double prob(std::size_t l) const { return pi_.at(l - 1); }
    /// Expected delay in steps, sum_{l>=2} (l-1) pi_l.
    [[nodiscard]] double c() const noexcept { return c_; }

private:
    std::vector<double> pi_;
    double c_ = 0.0;
};

/// One realization of per-link delays. delays[k] is the delay index
/// (1 = current value) used on links()[k].
struct ModeAssignment {
    std::shared_ptr<const std::vector<Edge>> links;
    std::vector<std::uint8_t> delays;

    /// Delay index of link (i, j); nullopt when (i, j) is not a link.
    [[nodiscard]] std::optional<std::size_t> delay(std::size_t i, std::size_t j) const;
};

/// nq x nq matrix with a free top block row [W_11 ... W_1q] and identity
/// blocks one block-row below the diagonal (the history shift).
class BlockCompanion {
public:
    explicit BlockCompanion(std::vector<Eigen::MatrixXd> top);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t q() const noexcept { return top_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return n_ * top_.size(); }
    /// Top-row block W_1l, l in 1..q.
    [[nodiscard]] const Eigen::MatrixXd& top_block(std::size_t l) const { return top_.at(l - 1); }
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& top_blocks() const noexcept { return top_; }
    [[nodiscard]] Eigen::MatrixXd dense() const;

private:
    std::size_t n_;
    std::vector<Eigen::MatrixXd> top_;
};

using ModalMatrix = BlockCompanion;

enum class MeanMethod { Enumerated, Reduced };

struct MeanMatrix {
    BlockCompanion matrix;
    MeanMethod method;
};

/// Throws AssignmentPatternMismatch when the assignment's links differ from
/// the nonzero off-diagonal pattern of a, DelayOutOfRange for an index
/// outside 1..q.
ModalMatrix build_modal_matrix(const WeightMatrix& a, const ModeAssignment& assignment, std::size_t q);

/// q^m where m is the number of links; nullopt on 64-bit overflow.
std::optional<std::uint64_t> effective_mode_count(const WeightMatrix& a, std::size_t q);

/// Visits all q^m assignments in lexicographic order (first link most
/// significant). Throws EnumerationTooLarge beyond kEnumerationCap.
void for_each_mode(const WeightMatrix& a, std::size_t q,
                   const std::function<void(const ModeAssignment&)>& visit);

std::vector<ModeAssignment> enumerate_modes(const WeightMatrix& a, std::size_t q);

/// Product over links of pi_{delay}.
double mode_probability(const ModeAssignment& assignment, const DelayDistribution& delays);

/// Probability-weighted sum of every modal matrix (compensated summation).
MeanMatrix mean_matrix_enumerated(const WeightMatrix& a, const DelayDistribution& delays);

/// Closed form: W_11 = A_diag + pi_1 A_off, W_1l = pi_l A_off for l >= 2.
MeanMatrix mean_matrix_reduced(const WeightMatrix& a, const DelayDistribution& delays);

/// Row-major dense CSV, one matrix row per line.
void write_dense_csv(std::ostream& out, const Eigen::MatrixXd& m);

} // namespace asyncavg
