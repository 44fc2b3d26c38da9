#include "asyncavg/simulator.hpp"

#include "asyncavg/error.hpp"
#include "asyncavg/numeric_text.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace asyncavg {

namespace {

#ifdef NDEBUG
constexpr std::size_t kBoundsCheckEvery = 64;
#else
constexpr std::size_t kBoundsCheckEvery = 1;
#endif

void validate(const SimulationConfig& cfg) {
    if (cfg.runs < 1) throw Error(ErrorKind::InvalidConfig, "runs must be >= 1");
    if (!(cfg.tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "tol must be > 0");
    if (cfg.max_iters < 1) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 1");
    if (static_cast<std::size_t>(cfg.x0.size()) != cfg.a.n()) {
        throw Error(ErrorKind::DimensionMismatch, "x0 has " + std::to_string(cfg.x0.size()) +
                                                      " entries, A is " + std::to_string(cfg.a.n()) +
                                                      "x" + std::to_string(cfg.a.n()));
    }
    for (const auto& law : cfg.step_laws) {
        if (law.q() != cfg.delays.q()) {
            throw Error(ErrorKind::DimensionMismatch, "every per-step law must share q = " +
                                                          std::to_string(cfg.delays.q()));
        }
    }
    if (!cfg.a.graph().is_connected()) {
        throw Error(ErrorKind::NotConnected, "interaction graph of A is not connected");
    }
}

/// Cumulative table for inverse-CDF sampling of a delay index.
struct DelaySampler {
    std::vector<double> cumulative;
    std::uint8_t last_possible = 1;

    explicit DelaySampler(const DelayDistribution& law) {
        double acc = 0.0;
        for (std::size_t l = 1; l <= law.q(); ++l) {
            acc += law.prob(l);
            cumulative.push_back(acc);
            if (law.prob(l) > 0.0) last_possible = static_cast<std::uint8_t>(l);
        }
    }

    std::uint8_t draw(SubstreamRng& rng) const {
        const double u = rng.uniform();
        for (std::size_t l = 0; l < cumulative.size(); ++l) {
            if (u < cumulative[l]) return static_cast<std::uint8_t>(l + 1);
        }
        return last_possible;
    }
};

struct LinkTerm {
    Eigen::Index i;
    Eigen::Index j;
    double weight;
};

RunResult run_unchecked(const SimulationConfig& cfg, const std::vector<DelaySampler>& samplers,
                        const std::vector<LinkTerm>& terms, SubstreamRng& rng) {
    const auto n = cfg.x0.size();
    const std::size_t q = cfg.delays.q();
    const Eigen::VectorXd diag = cfg.a.entries().diagonal();
    const double lo = cfg.x0.minCoeff();
    const double hi = cfg.x0.maxCoeff();
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));

    // history[(head + s) % q] holds x(k - s)
    std::vector<Eigen::VectorXd> history(q, cfg.x0);
    std::size_t head = 0;
    Eigen::VectorXd next(n);

    RunResult result;
    const auto record = [&](std::size_t k) {
        if (cfg.trajectory_stride != 0 && k % cfg.trajectory_stride == 0) {
            result.recorded_steps.push_back(k);
            result.recorded_states.push_back(history[head]);
        }
    };
    const auto spread = [&] {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        for (const auto& block : history) {
            mn = std::min(mn, block.minCoeff());
            mx = std::max(mx, block.maxCoeff());
        }
        return mx - mn;
    };

    record(0);
    std::size_t k = 0;
    bool converged = spread() <= cfg.tol;
    while (!converged && k < cfg.max_iters) {
        const auto& sampler = samplers[k % samplers.size()];
        const Eigen::VectorXd& current = history[head];
        next = diag.cwiseProduct(current);
        for (const auto& t : terms) {
            const std::size_t l = sampler.draw(rng);
            next(t.i) += t.weight * history[(head + l - 1) % q](t.j);
        }
        head = (head + q - 1) % q;
        history[head] = next;
        ++k;

        if (k % kBoundsCheckEvery == 0 &&
            (next.minCoeff() < lo - slack || next.maxCoeff() > hi + slack)) {
            throw std::logic_error("state left the convex hull of x0 at step " + std::to_string(k));
        }
        record(k);
        converged = spread() <= cfg.tol;
    }

    result.iters = k;
    result.converged = converged;
    result.final_x = history[head];
    result.consensus_value = result.final_x.mean();
    return result;
}

std::vector<DelaySampler> make_samplers(const SimulationConfig& cfg) {
    std::vector<DelaySampler> samplers;
    if (cfg.step_laws.empty()) {
        samplers.emplace_back(cfg.delays);
    } else {
        for (const auto& law : cfg.step_laws) samplers.emplace_back(law);
    }
    return samplers;
}

std::vector<LinkTerm> make_terms(const WeightMatrix& a) {
    std::vector<LinkTerm> terms;
    for (const auto& [i, j] : a.links()) {
        terms.push_back({static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), a(i, j)});
    }
    return terms;
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t run)
    : engine_(splitmix64(seed ^ splitmix64(run))) {}

ModeAssignment sample_mode(const DelayDistribution& delays,
                           const std::shared_ptr<const std::vector<Edge>>& links, SubstreamRng& rng) {
    const DelaySampler sampler(delays);
    ModeAssignment mode{links, std::vector<std::uint8_t>(links->size())};
    for (auto& l : mode.delays) l = sampler.draw(rng);
    return mode;
}

RunResult run_single(const SimulationConfig& config, SubstreamRng& rng) {
    validate(config);
    return run_unchecked(config, make_samplers(config), make_terms(config.a), rng);
}

EnsembleResult run_ensemble(const SimulationConfig& config) {
    validate(config);
    const auto samplers = make_samplers(config);
    const auto terms = make_terms(config.a);

    EnsembleResult out;
    out.results.resize(config.runs);

    std::size_t workers = config.threads ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, config.runs);
    std::atomic<std::size_t> next_run{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const auto work = [&] {
        for (std::size_t r = next_run++; r < config.runs && !failed; r = next_run++) {
            try {
                SubstreamRng rng(config.seed, r);
                out.results[r] = run_unchecked(config, samplers, terms, rng);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    double sum = 0.0;
    for (const auto& r : out.results) {
        sum += r.consensus_value;
        if (!r.converged) ++out.not_converged;
    }
    const auto runs = static_cast<double>(config.runs);
    out.empirical_mean = sum / runs;
    if (config.runs > 1) {
        double ss = 0.0;
        for (const auto& r : out.results) {
            const double dev = r.consensus_value - out.empirical_mean;
            ss += dev * dev;
        }
        out.empirical_std = std::sqrt(ss / (runs - 1.0));
        out.std_defined = true;
    }

    if (config.trajectory_stride != 0) {
        std::size_t longest = 0;
        for (const auto& r : out.results) longest = std::max(longest, r.recorded_steps.size());
        for (std::size_t s = 0; s < longest; ++s) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(config.x0.size());
            for (const auto& r : out.results) {
                acc += s < r.recorded_states.size() ? r.recorded_states[s] : r.final_x;
            }
            out.mean_trajectory_steps.push_back(s * config.trajectory_stride);
            out.mean_trajectory.push_back(acc / runs);
        }
    }
    return out;
}

void write_ensemble_csv(std::ostream& out, const EnsembleResult& ensemble) {
    out << "run,consensus_value,iters,converged\n";
    for (std::size_t r = 0; r < ensemble.results.size(); ++r) {
        const auto& res = ensemble.results[r];
        out << r << ',' << format_real(res.consensus_value) << ',' << res.iters << ','
            << (res.converged ? 1 : 0) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const EnsembleResult& ensemble) {
    out << "run,k,node,value\n";
    for (std::size_t r = 0; r < ensemble.results.size(); ++r) {
        const auto& res = ensemble.results[r];
        for (std::size_t s = 0; s < res.recorded_steps.size(); ++s) {
            const auto& x = res.recorded_states[s];
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                out << r << ',' << res.recorded_steps[s] << ',' << (i + 1) << ','
                    << format_real(x(i)) << '\n';
            }
        }
    }
}

} // namespace asyncavg
