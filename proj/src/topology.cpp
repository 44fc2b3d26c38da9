#include "asyncavg/topology.hpp"

#include "asyncavg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace asyncavg {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), adj_(n) {
    if (n == 0) throw Error(ErrorKind::InvalidGraph, "graph needs at least one node");
    for (auto& [i, j] : edges) {
        if (i >= n || j >= n) {
            throw Error(ErrorKind::InvalidGraph,
                        "edge {" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            "} has an endpoint outside 1.." + std::to_string(n),
                        i, j);
        }
        if (i == j) {
            throw Error(ErrorKind::InvalidGraph, "self-loop at node " + std::to_string(i + 1), i, j);
        }
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    if (const auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
        throw Error(ErrorKind::InvalidGraph,
                    "duplicate edge {" + std::to_string(dup->first + 1) + "," +
                        std::to_string(dup->second + 1) + "}",
                    dup->first, dup->second);
    }
    edges_ = std::move(edges);
    for (const auto& [i, j] : edges_) {
        adj_[i].push_back(j);
        adj_[j].push_back(i);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

Graph Graph::ring(std::size_t n) {
    if (n < 3) throw Error(ErrorKind::InvalidGraph, "ring needs n >= 3");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return Graph(n, std::move(edges));
}

Graph Graph::path(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Graph(n, std::move(edges));
}

Graph Graph::complete(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph(n, std::move(edges));
}

Graph Graph::star(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
    return Graph(n, std::move(edges));
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

bool Graph::is_connected() const {
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto w : adj_[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++visited;
                stack.push_back(w);
            }
        }
    }
    return visited == n_;
}

Graph WeightMatrix::graph() const {
    std::vector<Edge> edges;
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a_.cols(); ++j)
            if (a_(i, j) != 0.0)
                edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return Graph(n(), std::move(edges));
}

std::vector<Edge> WeightMatrix::links() const {
    std::vector<Edge> out;
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
        for (Eigen::Index j = 0; j < a_.cols(); ++j)
            if (i != j && a_(i, j) != 0.0)
                out.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return out;
}

WeightMatrix validate_weight_matrix(const Eigen::MatrixXd& entries, const std::optional<Graph>& graph) {
    const auto rows = entries.rows();
    if (rows == 0 || rows != entries.cols()) {
        throw Error(ErrorKind::NotSquare, "matrix is " + std::to_string(rows) + "x" +
                                              std::to_string(entries.cols()));
    }
    const auto n = static_cast<std::size_t>(rows);

    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < rows; ++j) {
            const double v = entries(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw Error(ErrorKind::NegativeEntry,
                            "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") is not a finite nonnegative number",
                            static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
            }
        }
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double sum = entries.row(i).sum();
        if (std::abs(sum - 1.0) > kStochasticTol) {
            throw Error(ErrorKind::RowSumViolation,
                        "row " + std::to_string(i + 1) + " sums to " + std::to_string(sum),
                        static_cast<std::size_t>(i), Error::npos, sum);
        }
    }
    for (Eigen::Index j = 0; j < rows; ++j) {
        const double sum = entries.col(j).sum();
        if (std::abs(sum - 1.0) > kStochasticTol) {
            throw Error(ErrorKind::ColSumViolation,
                        "column " + std::to_string(j + 1) + " sums to " + std::to_string(sum),
                        Error::npos, static_cast<std::size_t>(j), sum);
        }
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = i + 1; j < rows; ++j) {
            const bool forward = entries(i, j) != 0.0;
            const bool backward = entries(j, i) != 0.0;
            bool mismatch = forward != backward;
            if (!mismatch && graph) {
                mismatch = forward != graph->has_edge(static_cast<std::size_t>(i),
                                                      static_cast<std::size_t>(j));
            }
            if (mismatch) {
                throw Error(ErrorKind::PatternMismatch,
                            "zero pattern differs from the graph at (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + ")",
                            static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        }
    }
    if (graph && graph->n() != n) {
        throw Error(ErrorKind::PatternMismatch, "graph has " + std::to_string(graph->n()) +
                                                    " nodes, matrix has " + std::to_string(n));
    }
    return WeightMatrix(entries);
}

WeightMatrix metropolis_weights(const Graph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.n());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j] : graph.edges()) {
        const double w = 1.0 / (1.0 + static_cast<double>(std::max(graph.degree(i), graph.degree(j))));
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
        a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
    }
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = 1.0 - a.row(i).sum();
    return validate_weight_matrix(a, graph);
}

DiagStats diag_stats(const WeightMatrix& a) {
    DiagStats s;
    s.diag = a.entries().diagonal();
    s.mean_diag = s.diag.mean();
    // diagonals equal to within the stochastic tolerance count as identical
    const bool identical = s.diag.maxCoeff() - s.diag.minCoeff() <= kStochasticTol;
    s.centered_norm = identical ? 0.0 : (s.diag.array() - s.mean_diag).matrix().norm();
    return s;
}

} // namespace asyncavg
