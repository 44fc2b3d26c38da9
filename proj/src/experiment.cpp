#include "asyncavg/experiment.hpp"

#include "asyncavg/error_analysis.hpp"
#include "asyncavg/numeric_text.hpp"
#include "asyncavg/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <vector>

namespace asyncavg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::ConfigParse, "field '" + field + "': " + what);
}

double real_at(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        if (const auto r = parse_real(v.get<std::string>())) return *r;
        field_error(field, "cannot parse \"" + v.get<std::string>() + "\" as a decimal or p/q rational");
    }
    field_error(field, "expected a number or a \"p/q\" string");
}

std::vector<double> reals_at(const json& v, const std::string& field) {
    if (!v.is_array()) field_error(field, "expected a list");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(real_at(v[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

template <typename T>
T unsigned_at(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        if (!v.is_number_unsigned()) field_error(field, "expected a nonnegative integer");
    }
    return v.get<T>();
}

Graph named_graph(const std::string& spec) {
    static const std::regex pattern(R"(^\s*(ring|path|complete|star)\s*\(\s*(\d+)\s*\)\s*$)");
    std::smatch m;
    if (!std::regex_match(spec, m, pattern)) {
        field_error("graph", "expected ring(n), path(n), complete(n) or star(n), got \"" + spec + "\"");
    }
    const auto n = static_cast<std::size_t>(std::stoul(m[2].str()));
    const auto kind = m[1].str();
    if (kind == "ring") return Graph::ring(n);
    if (kind == "path") return Graph::path(n);
    if (kind == "complete") return Graph::complete(n);
    return Graph::star(n);
}

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    f << content;
}

fs::path resolve_output(const ExperimentConfig& cfg, const CommandOptions& opts) {
    auto dir = opts.output_dir.value_or(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig load_with_overrides(const fs::path& path, const CommandOptions& opts) {
    auto cfg = load_config(path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.runs) cfg.runs = *opts.runs;
    return cfg;
}

std::string formal_mode_count(std::size_t n, std::size_t q) {
    const std::size_t exponent = n * (n - 1);
    const std::string symbolic = std::to_string(q) + "^" + std::to_string(exponent);
    std::uint64_t count = 1;
    for (std::size_t k = 0; k < exponent; ++k) {
        if (q != 0 && count > UINT64_MAX / q) return symbolic;
        count *= q;
    }
    return symbolic + " = " + std::to_string(count);
}

/// Header and first data row of a one-record CSV, keyed by column name.
std::map<std::string, std::string> read_record_csv(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot read " + path.string());
    std::string header;
    std::string row;
    std::getline(f, header);
    std::getline(f, row);
    const auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        return cells;
    };
    const auto keys = split(header);
    const auto values = split(row);
    if (keys.empty() || keys.size() != values.size()) {
        throw Error(ErrorKind::HeaderMismatch, path.string() + " is not a single-record CSV");
    }
    std::map<std::string, std::string> record;
    for (std::size_t k = 0; k < keys.size(); ++k) record[keys[k]] = values[k];
    return record;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ConfigParse,
                    std::string(source) + ": " + line_column(text, e.byte) + ": malformed document");
    }
    if (!doc.is_object()) throw Error(ErrorKind::ConfigParse, std::string(source) + ": top level must be an object");

    static const std::set<std::string> known{"matrix", "graph", "weights", "q", "pi", "x0", "runs", "seed",
                                             "tol", "max_iters", "trajectory_stride", "output_dir"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) field_error(key, "unknown key");
    }

    const bool has_matrix = doc.contains("matrix");
    const bool has_graph = doc.contains("graph");
    if (has_matrix == has_graph) field_error("matrix/graph", "exactly one of the two must be present");

    std::optional<WeightMatrix> a;
    if (has_matrix) {
        const auto& rows = doc["matrix"];
        if (!rows.is_array() || rows.empty()) field_error("matrix", "expected a nonempty list of rows");
        const auto n = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto field = "matrix[" + std::to_string(i) + "]";
            const auto row = reals_at(rows[static_cast<std::size_t>(i)], field);
            if (static_cast<Eigen::Index>(row.size()) != n) {
                throw Error(ErrorKind::NotSquare, field + " has " + std::to_string(row.size()) +
                                                      " entries, expected " + std::to_string(n));
            }
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
        }
        if (doc.contains("weights")) field_error("weights", "only valid together with 'graph'");
        a = validate_weight_matrix(m);
    } else {
        if (!doc["graph"].is_string()) field_error("graph", "expected a string such as \"ring(6)\"");
        const auto rule = doc.value("weights", std::string("metropolis"));
        if (rule != "metropolis") field_error("weights", "only \"metropolis\" is supported");
        a = metropolis_weights(named_graph(doc["graph"].get<std::string>()));
    }

    if (!doc.contains("pi")) field_error("pi", "missing");
    auto pi = reals_at(doc["pi"], "pi");
    if (doc.contains("q")) {
        const auto q = unsigned_at<std::size_t>(doc["q"], "q");
        if (q != pi.size()) field_error("q", "q = " + std::to_string(q) + " but pi has " + std::to_string(pi.size()) + " entries");
    }
    DelayDistribution delays(std::move(pi));

    if (!doc.contains("x0")) field_error("x0", "missing");
    const auto x0v = reals_at(doc["x0"], "x0");
    if (x0v.size() != a->n()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "x0 has " + std::to_string(x0v.size()) + " entries, A is " + std::to_string(a->n()) + "x" +
                        std::to_string(a->n()));
    }
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(x0v.data(), static_cast<Eigen::Index>(x0v.size()));

    ExperimentConfig cfg{*a, delays, x0};
    if (doc.contains("runs")) cfg.runs = unsigned_at<std::size_t>(doc["runs"], "runs");
    if (doc.contains("seed")) cfg.seed = unsigned_at<std::uint64_t>(doc["seed"], "seed");
    if (doc.contains("tol")) cfg.tol = real_at(doc["tol"], "tol");
    if (doc.contains("max_iters")) cfg.max_iters = unsigned_at<std::size_t>(doc["max_iters"], "max_iters");
    if (doc.contains("trajectory_stride"))
        cfg.trajectory_stride = unsigned_at<std::size_t>(doc["trajectory_stride"], "trajectory_stride");
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) field_error("output_dir", "expected a path string");
        cfg.output_dir = doc["output_dir"].get<std::string>();
    }
    if (cfg.runs < 1) field_error("runs", "must be >= 1");
    if (!(cfg.tol > 0.0)) field_error("tol", "must be > 0");
    if (cfg.max_iters < 1) field_error("max_iters", "must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigParse, "cannot open config " + path.string());
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), path.string());
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::ConfigParse:
    case ErrorKind::InvalidConfig: return kExitUsage;
    default: return kExitDomain;
    }
}

int cmd_analyze(const fs::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_with_overrides(config, opts);
        const auto report = analyze(cfg.a, cfg.delays, cfg.x0);
        const auto dir = resolve_output(cfg, opts);

        std::ostringstream text;
        write_report_text(text, report);
        write_file(dir / "report.txt", text.str());
        write_file(dir / "report.csv", report_csv_header() + "\n" + report_csv_row(report) + "\n");
        if (!opts.quiet) {
            out << "exact_expected_error=" << format_real(report.exact_expected_error) << '\n'
                << "bound=" << format_real(report.bound) << '\n'
                << "zero_error_case=" << (report.zero_error_case ? "true" : "false") << '\n';
        }
        return kExitOk;
    });
}

int cmd_simulate(const fs::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_with_overrides(config, opts);
        const auto report = analyze(cfg.a, cfg.delays, cfg.x0);
        SimulationConfig sim{cfg.a, cfg.delays, cfg.x0};
        sim.runs = cfg.runs;
        sim.seed = cfg.seed;
        sim.tol = cfg.tol;
        sim.max_iters = cfg.max_iters;
        sim.trajectory_stride = cfg.trajectory_stride;
        const auto ensemble = run_ensemble(sim);
        const auto dir = resolve_output(cfg, opts);

        std::ostringstream runs_csv;
        write_ensemble_csv(runs_csv, ensemble);
        write_file(dir / "ensemble.csv", runs_csv.str());
        if (cfg.trajectory_stride != 0) {
            std::ostringstream traj;
            write_trajectory_csv(traj, ensemble);
            write_file(dir / "trajectories.csv", traj.str());
        }

        const std::string extra_header = ",runs,seed,empirical_mean,empirical_std,std_defined,not_converged";
        std::ostringstream extra;
        extra << ',' << cfg.runs << ',' << cfg.seed << ',' << format_real(ensemble.empirical_mean) << ','
              << format_real(ensemble.empirical_std) << ',' << (ensemble.std_defined ? "true" : "false") << ','
              << ensemble.not_converged;
        write_file(dir / "ensemble_summary.csv",
                   report_csv_header() + extra_header + "\n" + report_csv_row(report) + extra.str() + "\n");

        std::ostringstream summary;
        summary << "rng=" << kRngDescription << '\n';
        write_report_text(summary, report);
        summary << "runs=" << cfg.runs << "\nseed=" << cfg.seed
                << "\nempirical_mean=" << format_real(ensemble.empirical_mean)
                << "\nempirical_std=" << format_real(ensemble.empirical_std)
                << "\nstd_defined=" << (ensemble.std_defined ? "true" : "false")
                << "\nnot_converged=" << ensemble.not_converged << '\n';
        write_file(dir / "summary.txt", summary.str());

        if (!opts.quiet) {
            const double gap = std::abs(ensemble.empirical_mean - report.expected_async_average);
            out << "empirical_mean=" << format_real(ensemble.empirical_mean) << '\n'
                << "expected_async_average=" << format_real(report.expected_async_average) << '\n'
                << "exact_average=" << format_real(report.exact_average) << '\n'
                << "empirical_vs_analytic_gap=" << format_real(gap) << '\n'
                << "standard_error=" << format_real(ensemble.empirical_std / std::sqrt(static_cast<double>(cfg.runs)))
                << '\n'
                << "not_converged=" << ensemble.not_converged << '\n';
        }
        return kExitOk;
    });
}

int cmd_verify(const fs::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    constexpr double kMeanTol = 1e-12;
    constexpr double kResidualTol = 1e-10;
    constexpr double kProbabilityTol = 1e-10;
    return guarded(err, [&] {
        const auto cfg = load_with_overrides(config, opts);
        const auto enumerated = mean_matrix_enumerated(cfg.a, cfg.delays);
        const auto reduced = mean_matrix_reduced(cfg.a, cfg.delays);
        const double mean_gap = (enumerated.matrix.dense() - reduced.matrix.dense()).cwiseAbs().maxCoeff();

        double residual = 0.0;
        for (const auto* mean : {&enumerated, &reduced}) {
            const Eigen::RowVectorXd w = stationary_row_vector(*mean);
            residual = std::max(residual, (w * mean->matrix.dense() - w).lpNorm<Eigen::Infinity>());
        }

        double prob_sum = 0.0;
        double prob_comp = 0.0;
        std::uint64_t modes = 0;
        for_each_mode(cfg.a, cfg.delays.q(), [&](const ModeAssignment& m) {
            const double p = mode_probability(m, cfg.delays) - prob_comp;
            const double t = prob_sum + p;
            prob_comp = (t - prob_sum) - p;
            prob_sum = t;
            ++modes;
        });
        const double prob_gap = std::abs(prob_sum - 1.0);

        const bool ok = mean_gap <= kMeanTol && residual <= kResidualTol && prob_gap <= kProbabilityTol;
        std::ostringstream text;
        text << "formal_mode_count=" << formal_mode_count(cfg.a.n(), cfg.delays.q()) << '\n'
             << "effective_mode_count=" << modes << '\n'
             << "max_mean_discrepancy=" << format_real(mean_gap) << '\n'
             << "eigenvector_residual=" << format_real(residual) << '\n'
             << "probability_sum_error=" << format_real(prob_gap) << '\n'
             << "status=" << (ok ? "pass" : "fail") << '\n';
        write_file(resolve_output(cfg, opts) / "verify.txt", text.str());
        if (!opts.quiet) out << text.str();
        return ok ? kExitOk : kExitVerification;
    });
}

int cmd_report(const fs::path& analysis_csv, const fs::path& ensemble_csv, const CommandOptions& opts,
               std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto analysis = read_record_csv(analysis_csv);
        const auto ensemble = read_record_csv(ensemble_csv);
        const auto need = [](const std::map<std::string, std::string>& rec, const std::string& key,
                             const fs::path& from) -> const std::string& {
            const auto it = rec.find(key);
            if (it == rec.end()) throw Error(ErrorKind::HeaderMismatch, from.string() + " lacks column '" + key + "'");
            return it->second;
        };
        for (const std::string key : {"n", "q"}) {
            if (need(analysis, key, analysis_csv) != need(ensemble, key, ensemble_csv)) {
                throw Error(ErrorKind::HeaderMismatch, key + " differs: " + analysis.at(key) + " vs " + ensemble.at(key));
            }
        }
        const auto& exact = need(analysis, "exact_average", analysis_csv);
        const auto& expected = need(analysis, "expected_async_average", analysis_csv);
        const auto& error = need(analysis, "exact_expected_error", analysis_csv);
        const auto& bound = need(analysis, "bound", analysis_csv);
        const auto& empirical = need(ensemble, "empirical_mean", ensemble_csv);

        const auto number = [](const std::string& s) {
            const auto v = parse_real(s);
            if (!v) throw Error(ErrorKind::HeaderMismatch, "non-numeric cell \"" + s + "\"");
            return *v;
        };
        const std::string gap = format_real(std::abs(number(empirical) - number(exact)));
        const bool satisfied = number(error) <= number(bound) + 1e-12;

        const std::vector<std::pair<std::string, std::string>> cols{
            {"n", analysis.at("n")},
            {"q", analysis.at("q")},
            {"exact_average", exact},
            {"expected_async_average", expected},
            {"empirical_mean", empirical},
            {"gap", gap},
            {"bound", bound},
            {"bound_satisfied", satisfied ? "yes" : "no"},
        };
        std::string header;
        std::string row;
        std::ostringstream table;
        for (const auto& [k, v] : cols) {
            header += (header.empty() ? "" : ",") + k;
            row += (row.empty() ? "" : ",") + v;
            table << std::left << std::setw(24) << k << v << '\n';
        }
        const auto dir = opts.output_dir.value_or(fs::path("."));
        fs::create_directories(dir);
        write_file(dir / "combined.csv", header + "\n" + row + "\n");
        write_file(dir / "combined.txt", table.str());
        if (!opts.quiet) out << table.str();
        return kExitOk;
    });
}

} // namespace asyncavg
