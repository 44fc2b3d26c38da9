#pragma once

#include "asyncavg/switched_model.hpp"
#include "asyncavg/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace asyncavg::testing {

/// 6-node ring with non-identical diagonal, node 5 heavier.
inline Eigen::MatrixXd ring6_nonidentical() {
    Eigen::MatrixXd a(6, 6);
    a << 1. / 3, 1. / 3, 0, 0, 0, 1. / 3,
         1. / 3, 1. / 3, 1. / 3, 0, 0, 0,
         0, 1. / 3, 1. / 3, 1. / 3, 0, 0,
         0, 0, 1. / 3, 5. / 12, 1. / 4, 0,
         0, 0, 0, 1. / 4, 1. / 2, 1. / 4,
         1. / 3, 0, 0, 0, 1. / 4, 5. / 12;
    return a;
}

/// 6-node ring, every nonzero entry 1/3.
inline Eigen::MatrixXd ring6_identical() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i) {
        a(i, i) = 1. / 3;
        a(i, (i + 1) % 6) = 1. / 3;
        a(i, (i + 5) % 6) = 1. / 3;
    }
    return a;
}

inline Eigen::MatrixXd path3() {
    Eigen::MatrixXd a(3, 3);
    a << 0.6, 0.4, 0, 0.4, 0.2, 0.4, 0, 0.4, 0.6;
    return a;
}

inline Eigen::VectorXd ring6_x0() {
    Eigen::VectorXd x(6);
    x << 1, 1, 1, 0, 0, 0;
    return x;
}

/// Random connected graph: a random spanning tree plus extra edges.
inline Graph random_connected_graph(std::size_t n, std::mt19937_64& rng) {
    std::vector<Edge> edges;
    std::vector<bool> present(n * n, false);
    for (std::size_t v = 1; v < n; ++v) {
        const auto u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
        edges.emplace_back(u, v);
        present[u * n + v] = true;
    }
    std::bernoulli_distribution extra(0.3);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!present[i * n + j] && extra(rng)) edges.emplace_back(i, j);
    return Graph(n, edges);
}

/// Random probability vector of length q (normalized exponentials).
inline std::vector<double> random_pi(std::size_t q, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> pi(q);
    double sum = 0.0;
    for (auto& p : pi) sum += (p = e(rng));
    for (auto& p : pi) p /= sum;
    double head = 1.0;
    for (std::size_t l = 1; l < q; ++l) head -= pi[l];
    pi[0] = head;
    return pi;
}

/// Limit of W^k by repeated squaring, stopping once squaring no longer
/// changes the matrix; rows are renormalised after every step so rounding
/// drift in the row sums cannot compound.
inline Eigen::MatrixXd matrix_limit(const Eigen::MatrixXd& w, int max_squarings = 40) {
    Eigen::MatrixXd p = w;
    for (int s = 0; s < max_squarings; ++s) {
        Eigen::MatrixXd next = p * p;
        next = next.array().colwise() / next.rowwise().sum().array();
        const double change = (next - p).cwiseAbs().maxCoeff();
        p = std::move(next);
        if (change < 1e-15) break;
    }
    return p;
}

} // namespace asyncavg::testing
