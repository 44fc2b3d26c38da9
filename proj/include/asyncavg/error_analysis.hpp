#pragma once

#include "asyncavg/switched_model.hpp"
#include "asyncavg/topology.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace asyncavg {

/// Minimum gap between 1 and the second-largest eigenvalue modulus of the
/// mean matrix for the stationary analysis to be defined.
inline constexpr double kErgodicGapTol = 1e-9;
/// centered_norm at or below this counts as identical diagonals.
inline constexpr double kZeroErrorTol = 1e-12;

struct StationaryWeights {
    /// Component sum of the stationary left eigenvector over the q history
    /// blocks: w_prime[i] = 1 + c (1 - a_ii).
    Eigen::VectorXd w_prime;
    /// Normaliser n ((1 + c) - c * a_bar); equals w_prime.sum().
    double d = 0.0;
    Eigen::VectorXd w_prime_normal;
};

struct AnalysisReport {
    std::size_t n = 0;
    std::size_t q = 0;
    double c = 0.0;
    double d = 0.0;
    double a_bar = 0.0;
    double exact_average = 0.0;
    double expected_async_average = 0.0;
    double exact_expected_error = 0.0;
    double bound = 0.0;
    bool zero_error_case = false;
    double spectral_gap = 0.0;
};

/// 1 - |lambda_2| of the assembled mean matrix, with eigenvalues sorted by
/// modulus. A 1x1 matrix has gap 1.
double spectral_gap(const MeanMatrix& mean);

/// Full nq-dimensional left eigenvector for eigenvalue one, assembled block by
/// block: w_1 = 1^T, w_j = 1^T (I - W_11 - ... - W_1(j-1)). Not normalised.
Eigen::RowVectorXd stationary_row_vector(const MeanMatrix& mean);

/// Closed-form weights. Throws NotConnected or NotErgodic.
StationaryWeights stationary_weights(const WeightMatrix& a, const DelayDistribution& delays);

/// w_prime_normal . x0. Throws DimensionMismatch.
double expected_async_average(const StationaryWeights& weights, const Eigen::VectorXd& x0);

/// Upper bound on the expected average error. Needs only the largest
/// absolute initial value, never the initial state itself.
double error_bound(const WeightMatrix& a, const DelayDistribution& delays, double x0_inf_norm);

/// Throws NotConnected, NotErgodic, DimensionMismatch.
AnalysisReport analyze(const WeightMatrix& a, const DelayDistribution& delays, const Eigen::VectorXd& x0);

/// "key=value" lines in the CSV column order.
void write_report_text(std::ostream& out, const AnalysisReport& report);
std::string report_csv_header();
std::string report_csv_row(const AnalysisReport& report);

} // namespace asyncavg
