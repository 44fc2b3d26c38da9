#include "asyncavg/switched_model.hpp"

#include "asyncavg/error.hpp"
#include "asyncavg/numeric_text.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace asyncavg {

namespace {

/// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + comp; }
};

constexpr std::size_t kMaxDepth = 255;

} // namespace

DelayDistribution::DelayDistribution(std::vector<double> pi) : pi_(std::move(pi)) {
    if (pi_.empty() || pi_.size() > kMaxDepth) {
        throw Error(ErrorKind::InvalidDistribution,
                    "memory depth q must be in 1.." + std::to_string(kMaxDepth));
    }
    double total = 0.0;
    for (std::size_t l = 0; l < pi_.size(); ++l) {
        if (!(pi_[l] >= 0.0) || !std::isfinite(pi_[l])) {
            throw Error(ErrorKind::InvalidDistribution,
                        "pi_" + std::to_string(l + 1) + " = " + format_real(pi_[l]) + " is not a probability",
                        l, Error::npos, pi_[l]);
        }
        total += pi_[l];
        c_ += static_cast<double>(l) * pi_[l];
    }
    if (std::abs(total - 1.0) > kStochasticTol) {
        throw Error(ErrorKind::InvalidDistribution, "probabilities sum to " + format_real(total),
                    Error::npos, Error::npos, total);
    }
}

std::optional<std::size_t> ModeAssignment::delay(std::size_t i, std::size_t j) const {
    const auto it = std::lower_bound(links->begin(), links->end(), Edge{i, j});
    if (it == links->end() || *it != Edge{i, j}) return std::nullopt;
    return delays[static_cast<std::size_t>(it - links->begin())];
}

BlockCompanion::BlockCompanion(std::vector<Eigen::MatrixXd> top) : n_(0), top_(std::move(top)) {
    if (top_.empty()) throw Error(ErrorKind::DimensionMismatch, "block row needs at least one block");
    n_ = static_cast<std::size_t>(top_.front().rows());
    for (const auto& b : top_) {
        if (static_cast<std::size_t>(b.rows()) != n_ || b.rows() != b.cols()) {
            throw Error(ErrorKind::DimensionMismatch, "top blocks must all be n x n");
        }
    }
}

Eigen::MatrixXd BlockCompanion::dense() const {
    const auto n = static_cast<Eigen::Index>(n_);
    const auto q = static_cast<Eigen::Index>(top_.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n * q, n * q);
    for (Eigen::Index l = 0; l < q; ++l) w.block(0, l * n, n, n) = top_[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 1; r < q; ++r) w.block(r * n, (r - 1) * n, n, n).setIdentity();
    return w;
}

ModalMatrix build_modal_matrix(const WeightMatrix& a, const ModeAssignment& assignment, std::size_t q) {
    if (q == 0) throw Error(ErrorKind::DelayOutOfRange, "q must be positive");
    const auto expected = a.links();
    if (!assignment.links || *assignment.links != expected ||
        assignment.delays.size() != expected.size()) {
        throw Error(ErrorKind::AssignmentPatternMismatch,
                    "assignment links do not match the nonzero off-diagonal pattern of A");
    }
    const auto n = static_cast<Eigen::Index>(a.n());
    std::vector<Eigen::MatrixXd> top(q, Eigen::MatrixXd::Zero(n, n));
    top[0].diagonal() = a.entries().diagonal();
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const std::size_t l = assignment.delays[k];
        if (l < 1 || l > q) {
            throw Error(ErrorKind::DelayOutOfRange,
                        "delay index " + std::to_string(l) + " outside 1.." + std::to_string(q), l, q);
        }
        const auto [i, j] = expected[k];
        top[l - 1](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    }
    return ModalMatrix(std::move(top));
}

std::optional<std::uint64_t> effective_mode_count(const WeightMatrix& a, std::size_t q) {
    const auto m = a.links().size();
    std::uint64_t count = 1;
    for (std::size_t k = 0; k < m; ++k) {
        if (q != 0 && count > UINT64_MAX / q) return std::nullopt;
        count *= q;
    }
    return count;
}

void for_each_mode(const WeightMatrix& a, std::size_t q,
                   const std::function<void(const ModeAssignment&)>& visit) {
    if (q == 0 || q > kMaxDepth) throw Error(ErrorKind::DelayOutOfRange, "q must be in 1..255");
    auto links = std::make_shared<const std::vector<Edge>>(a.links());
    const auto count = effective_mode_count(a, q);
    if (!count || *count > kEnumerationCap) {
        throw Error(ErrorKind::EnumerationTooLarge,
                    "q^m = " + std::to_string(q) + "^" + std::to_string(links->size()) +
                        " exceeds the enumeration cap of 2^20 modes; reduce n or q",
                    q, links->size());
    }

    ModeAssignment mode{links, std::vector<std::uint8_t>(links->size(), 1)};
    const auto top = static_cast<std::uint8_t>(q);
    for (std::uint64_t idx = 0; idx < *count; ++idx) {
        visit(mode);
        // odometer increment, last link least significant
        for (std::size_t k = mode.delays.size(); k-- > 0;) {
            if (mode.delays[k] < top) {
                ++mode.delays[k];
                break;
            }
            mode.delays[k] = 1;
        }
    }
}

std::vector<ModeAssignment> enumerate_modes(const WeightMatrix& a, std::size_t q) {
    std::vector<ModeAssignment> out;
    if (const auto count = effective_mode_count(a, q); count && *count <= kEnumerationCap) {
        out.reserve(static_cast<std::size_t>(*count));
    }
    for_each_mode(a, q, [&](const ModeAssignment& m) { out.push_back(m); });
    return out;
}

double mode_probability(const ModeAssignment& assignment, const DelayDistribution& delays) {
    double p = 1.0;
    for (const auto l : assignment.delays) {
        if (l < 1 || l > delays.q()) {
            throw Error(ErrorKind::DelayOutOfRange,
                        "delay index " + std::to_string(l) + " outside 1.." + std::to_string(delays.q()),
                        l, delays.q());
        }
        p *= delays.prob(l);
    }
    return p;
}

MeanMatrix mean_matrix_enumerated(const WeightMatrix& a, const DelayDistribution& delays) {
    const auto n = a.n();
    const auto q = delays.q();
    std::vector<CompensatedSum> acc(q * n * n);

    for_each_mode(a, q, [&](const ModeAssignment& mode) {
        const double p = mode_probability(mode, delays);
        if (p == 0.0) return;
        const auto w = build_modal_matrix(a, mode, q);
        for (std::size_t l = 0; l < q; ++l) {
            const auto& block = w.top_blocks()[l];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double v = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    if (v != 0.0) acc[(l * n + i) * n + j].add(p * v);
                }
        }
    });

    const auto ni = static_cast<Eigen::Index>(n);
    std::vector<Eigen::MatrixXd> top(q, Eigen::MatrixXd::Zero(ni, ni));
    for (std::size_t l = 0; l < q; ++l)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                top[l](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    acc[(l * n + i) * n + j].value();
    return {BlockCompanion(std::move(top)), MeanMethod::Enumerated};
}

MeanMatrix mean_matrix_reduced(const WeightMatrix& a, const DelayDistribution& delays) {
    const Eigen::MatrixXd& full = a.entries();
    Eigen::MatrixXd off = full;
    off.diagonal().setZero();

    std::vector<Eigen::MatrixXd> top;
    top.reserve(delays.q());
    top.emplace_back(delays.prob(1) * off);
    top.front().diagonal() = full.diagonal();
    for (std::size_t l = 2; l <= delays.q(); ++l) top.emplace_back(delays.prob(l) * off);
    return {BlockCompanion(std::move(top)), MeanMethod::Reduced};
}

void write_dense_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_real(m(i, j));
        }
        out << '\n';
    }
}

} // namespace asyncavg
