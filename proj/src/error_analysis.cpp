#include "asyncavg/error_analysis.hpp"

#include "asyncavg/error.hpp"
#include "asyncavg/numeric_text.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

namespace asyncavg {

namespace {

void require_connected(const WeightMatrix& a) {
    if (!a.graph().is_connected()) {
        throw Error(ErrorKind::NotConnected, "interaction graph of A is not connected");
    }
}

std::vector<std::pair<std::string, std::string>> report_fields(const AnalysisReport& r) {
    return {
        {"n", std::to_string(r.n)},
        {"q", std::to_string(r.q)},
        {"c", format_real(r.c)},
        {"d", format_real(r.d)},
        {"a_bar", format_real(r.a_bar)},
        {"exact_average", format_real(r.exact_average)},
        {"expected_async_average", format_real(r.expected_async_average)},
        {"exact_expected_error", format_real(r.exact_expected_error)},
        {"bound", format_real(r.bound)},
        {"zero_error_case", r.zero_error_case ? "true" : "false"},
        {"spectral_gap", format_real(r.spectral_gap)},
    };
}

} // namespace

double spectral_gap(const MeanMatrix& mean) {
    const Eigen::MatrixXd w = mean.matrix.dense();
    if (w.rows() == 1) return 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(w, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) return 0.0;
    std::vector<double> moduli;
    moduli.reserve(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index k = 0; k < w.rows(); ++k) moduli.push_back(std::abs(solver.eigenvalues()(k)));
    std::partial_sort(moduli.begin(), moduli.begin() + 2, moduli.end(), std::greater<>());
    return 1.0 - moduli[1];
}

Eigen::RowVectorXd stationary_row_vector(const MeanMatrix& mean) {
    const auto n = static_cast<Eigen::Index>(mean.matrix.n());
    const auto q = mean.matrix.q();
    Eigen::RowVectorXd w(n * static_cast<Eigen::Index>(q));
    const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(n);
    Eigen::MatrixXd remainder = Eigen::MatrixXd::Identity(n, n);
    w.segment(0, n) = ones;
    for (std::size_t j = 2; j <= q; ++j) {
        remainder -= mean.matrix.top_block(j - 1);
        w.segment(static_cast<Eigen::Index>(j - 1) * n, n) = ones * remainder;
    }
    return w;
}

StationaryWeights stationary_weights(const WeightMatrix& a, const DelayDistribution& delays) {
    require_connected(a);
    if (const double gap = spectral_gap(mean_matrix_reduced(a, delays)); gap < kErgodicGapTol) {
        throw Error(ErrorKind::NotErgodic,
                    "eigenvalue one of the mean matrix is not simple and dominant (gap " +
                        format_real(gap) + ")",
                    Error::npos, Error::npos, gap);
    }
    const double c = delays.c();
    const auto n = static_cast<double>(a.n());
    const Eigen::VectorXd diag = a.entries().diagonal();

    StationaryWeights w;
    w.w_prime = (1.0 + c * (1.0 - diag.array())).matrix();
    w.d = n * ((1.0 + c) - c * diag.mean());
    w.w_prime_normal = w.w_prime / w.d;
    return w;
}

double expected_async_average(const StationaryWeights& weights, const Eigen::VectorXd& x0) {
    if (x0.size() != weights.w_prime_normal.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "x0 has " + std::to_string(x0.size()) + " entries, expected " +
                        std::to_string(weights.w_prime_normal.size()));
    }
    return weights.w_prime_normal.dot(x0);
}

double error_bound(const WeightMatrix& a, const DelayDistribution& delays, double x0_inf_norm) {
    if (!(x0_inf_norm >= 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "infinity norm of x0 must be nonnegative");
    }
    const auto stats = diag_stats(a);
    const double c = delays.c();
    const double n = static_cast<double>(a.n());
    const double d = n * ((1.0 + c) - c * stats.mean_diag);
    return c * std::sqrt(n) / d * stats.centered_norm * x0_inf_norm;
}

AnalysisReport analyze(const WeightMatrix& a, const DelayDistribution& delays, const Eigen::VectorXd& x0) {
    if (static_cast<std::size_t>(x0.size()) != a.n()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "x0 has " + std::to_string(x0.size()) + " entries, A is " +
                        std::to_string(a.n()) + "x" + std::to_string(a.n()));
    }
    require_connected(a);
    const auto stats = diag_stats(a);
    const auto weights = stationary_weights(a, delays);
    const double n = static_cast<double>(a.n());

    AnalysisReport r;
    r.n = a.n();
    r.q = delays.q();
    r.c = delays.c();
    r.d = weights.d;
    r.a_bar = stats.mean_diag;
    r.exact_average = x0.mean();
    r.expected_async_average = expected_async_average(weights, x0);
    r.exact_expected_error = std::abs(((1.0 / n) - weights.w_prime_normal.array()).matrix().dot(x0));
    r.bound = error_bound(a, delays, x0.lpNorm<Eigen::Infinity>());
    r.zero_error_case = stats.centered_norm <= kZeroErrorTol;
    r.spectral_gap = spectral_gap(mean_matrix_reduced(a, delays));
    return r;
}

void write_report_text(std::ostream& out, const AnalysisReport& report) {
    for (const auto& [key, value] : report_fields(report)) out << key << '=' << value << '\n';
}

std::string report_csv_header() {
    std::string line;
    for (const auto& [key, value] : report_fields(AnalysisReport{})) {
        if (!line.empty()) line += ',';
        line += key;
    }
    return line;
}

std::string report_csv_row(const AnalysisReport& report) {
    std::string line;
    bool first = true;
    for (const auto& [key, value] : report_fields(report)) {
        if (!first) line += ',';
        first = false;
        line += value;
    }
    return line;
}

} // namespace asyncavg
