#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace asyncavg {

/// Tolerance on each row and column sum of a doubly stochastic matrix.
inline constexpr double kStochasticTol = 1e-12;

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph on nodes 0..n-1. Edges are stored normalized
/// (first < second) and sorted.
class Graph {
public:
    Graph(std::size_t n, std::vector<Edge> edges);

    static Graph ring(std::size_t n);
    static Graph path(std::size_t n);
    static Graph complete(std::size_t n);
    static Graph star(std::size_t n);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_.at(i); }
    [[nodiscard]] std::size_t degree(std::size_t i) const { return adj_.at(i).size(); }
    [[nodiscard]] bool has_edge(std::size_t i, std::size_t j) const;
    [[nodiscard]] bool is_connected() const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adj_;
};

/// Validated doubly stochastic interaction matrix with a symmetric
/// off-diagonal zero pattern. Only obtainable through
/// validate_weight_matrix or metropolis_weights.
class WeightMatrix {
public:
    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& entries() const noexcept { return a_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    /// Graph induced by the nonzero off-diagonal entries.
    [[nodiscard]] Graph graph() const;
    /// Ordered pairs (i, j), i != j, with a_ij != 0, in row-major order.
    [[nodiscard]] std::vector<Edge> links() const;

private:
    explicit WeightMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {}
    friend WeightMatrix validate_weight_matrix(const Eigen::MatrixXd&, const std::optional<Graph>&);

    Eigen::MatrixXd a_;
};

struct DiagStats {
    Eigen::VectorXd diag;
    double mean_diag = 0.0;
    /// Euclidean norm of diag - mean_diag.
    double centered_norm = 0.0;
};

/// Throws Error{NotSquare, NegativeEntry, RowSumViolation, ColSumViolation,
/// PatternMismatch}. With a graph, the off-diagonal support must equal its
/// edge set exactly.
WeightMatrix validate_weight_matrix(const Eigen::MatrixXd& entries,
                                    const std::optional<Graph>& graph = std::nullopt);

/// a_ij = 1 / (1 + max(deg i, deg j)) on edges, remainder on the diagonal.
WeightMatrix metropolis_weights(const Graph& graph);

DiagStats diag_stats(const WeightMatrix& a);

} // namespace asyncavg
