#pragma once

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fastgrad/drivers.hpp"
#include "fastgrad/error.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/ogmg.hpp"
#include "fastgrad/problems.hpp"
#include "fastgrad/random.hpp"
#include "fastgrad/trace.hpp"
#include "fastgrad/vector.hpp"

namespace fastgrad::bench {

// Exit codes shared by every CLI subcommand.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitInvalidSpec = 1;
inline constexpr int kExitBudgetExhausted = 2;
inline constexpr int kExitOracleAbort = 3;

/// Malformed or inconsistent experiment description.
class spec_error : public std::invalid_argument {
public:
    explicit spec_error(const std::string& what) : std::invalid_argument(what) {}
};

// ---------------------------------------------------------------------------
// Experiment description

struct QuadraticSpec {
    std::vector<double> diag;
};
struct LogRegSpec {
    std::size_t n_samples = 110;
    std::size_t n_features = 100;
    double reg = 1.0;
    std::uint64_t seed = 42;
};
struct LogRegCsvSpec {
    std::string path;
    double reg = 1.0;
};
using ProblemSpec = std::variant<QuadraticSpec, LogRegSpec, LogRegCsvSpec>;

struct OgmgMethod {
    std::size_t N = 1;
    double L = 0.0;
};
struct OgmgRepeatedMethod {
    double L = 0.0;
    double mu = 0.0;
};
struct AcgmMethod {};
struct AlgmMethod {};
struct UgmMethod {};
using MethodSpec = std::variant<OgmgMethod, OgmgRepeatedMethod, AcgmMethod, AlgmMethod, UgmMethod>;

enum class StartKind { zeros, ones, gaussian, scaled_gaussian };

/// x0 choice. scaled_gaussian divides each standard-normal component by the
/// square root of the matching curvature of a quadratic problem, so every
/// eigen-direction starts with the same share of f(x0) - f*.
struct StartSpec {
    StartKind kind = StartKind::gaussian;
    std::uint64_t seed = 42;
};

struct ExperimentSpec {
    ProblemSpec problem = QuadraticSpec{{1000.0, 0.1}};
    MethodSpec method = AcgmMethod{};
    std::optional<double> epsilon;  // absolute target
    std::optional<double> eps_rel;  // target as a fraction of |grad f(x0)|
    std::optional<double> mu0;      // default: L0
    std::optional<double> L0;       // default: problem's reference L
    double beta = 4.0;
    std::uint64_t max_grad_calls = 10'000'000;
    std::size_t max_retries_per_step = 60;
    bool trace_values = false;
    StartSpec x0;
    std::string output_dir;  // empty: write nothing
};

enum class SweepAxis { L, mu, mu0, L0 };

struct SweepSpec {
    ExperimentSpec base;
    SweepAxis axis = SweepAxis::L;
    std::vector<double> values;
    std::size_t repetitions = 1;
};

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::string_view what) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw spec_error("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
    }
    return v;
}

inline std::uint64_t parse_uint(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw spec_error("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
    }
    return v;
}

inline std::pair<std::string, std::string> head_args(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) return {std::string(s), ""};
    return {std::string(s.substr(0, colon)), std::string(s.substr(colon + 1))};
}

// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace detail

inline std::vector<double> parse_values(std::string_view s) {
    std::vector<double> out;
    for (const auto& tok : detail::split(s, ',')) out.push_back(detail::parse_double(tok, "value"));
    return out;
}

/// quadratic:d1,d2,... | logreg:n,m,C,seed | logreg_csv:path[,C]
inline ProblemSpec parse_problem(std::string_view s) {
    const auto [head, args] = detail::head_args(s);
    if (head == "quadratic") {
        if (args.empty()) throw spec_error("quadratic needs curvatures, e.g. quadratic:1000,0.1");
        return QuadraticSpec{parse_values(args)};
    }
    if (head == "logreg") {
        LogRegSpec p;
        if (!args.empty()) {
            const auto parts = detail::split(args, ',');
            if (parts.size() != 4) throw spec_error("logreg expects n,m,C,seed");
            p.n_samples = detail::parse_uint(parts[0], "n_samples");
            p.n_features = detail::parse_uint(parts[1], "n_features");
            p.reg = detail::parse_double(parts[2], "C");
            p.seed = detail::parse_uint(parts[3], "seed");
        }
        return p;
    }
    if (head == "logreg_csv") {
        if (args.empty()) throw spec_error("logreg_csv needs a path");
        LogRegCsvSpec p;
        const auto comma = args.rfind(',');
        if (comma != std::string::npos) {
            p.path = args.substr(0, comma);
            p.reg = detail::parse_double(args.substr(comma + 1), "C");
        } else {
            p.path = args;
        }
        return p;
    }
    throw spec_error("unknown problem '" + head + "'");
}

/// acgm | algm | ugm | ogmg:N,L | ogmg_repeated:L,mu
inline MethodSpec parse_method(std::string_view s) {
    const auto [head, args] = detail::head_args(s);
    auto no_args = [&](MethodSpec m) {
        if (!args.empty()) throw spec_error(head + " takes no arguments");
        return m;
    };
    if (head == "acgm") return no_args(AcgmMethod{});
    if (head == "algm") return no_args(AlgmMethod{});
    if (head == "ugm") return no_args(UgmMethod{});
    if (head == "ogmg") {
        const auto parts = detail::split(args, ',');
        if (args.empty() || parts.size() != 2) throw spec_error("ogmg requires explicit N and L: ogmg:N,L");
        return OgmgMethod{detail::parse_uint(parts[0], "N"), detail::parse_double(parts[1], "L")};
    }
    if (head == "ogmg_repeated") {
        const auto parts = detail::split(args, ',');
        if (args.empty() || parts.size() != 2) {
            throw spec_error("ogmg_repeated requires explicit L and mu: ogmg_repeated:L,mu");
        }
        return OgmgRepeatedMethod{detail::parse_double(parts[0], "L"), detail::parse_double(parts[1], "mu")};
    }
    throw spec_error("unknown method '" + head + "'");
}

inline StartKind parse_start_kind(std::string_view s) {
    if (s == "zeros") return StartKind::zeros;
    if (s == "ones") return StartKind::ones;
    if (s == "gaussian") return StartKind::gaussian;
    if (s == "scaled_gaussian") return StartKind::scaled_gaussian;
    throw spec_error("unknown x0 kind '" + std::string(s) + "'");
}

inline SweepAxis parse_axis(std::string_view s) {
    if (s == "L") return SweepAxis::L;
    if (s == "mu") return SweepAxis::mu;
    if (s == "mu0") return SweepAxis::mu0;
    if (s == "L0") return SweepAxis::L0;
    throw spec_error("unknown sweep axis '" + std::string(s) + "' (expected L, mu, mu0 or L0)");
}

inline std::string to_string(const ProblemSpec& p) {
    struct V {
        std::string operator()(const QuadraticSpec& q) const {
            std::string s = "quadratic:";
            for (std::size_t i = 0; i < q.diag.size(); ++i) s += (i ? "," : "") + detail::fmt(q.diag[i]);
            return s;
        }
        std::string operator()(const LogRegSpec& l) const {
            return "logreg:" + std::to_string(l.n_samples) + "," + std::to_string(l.n_features) + "," +
                   detail::fmt(l.reg) + "," + std::to_string(l.seed);
        }
        std::string operator()(const LogRegCsvSpec& c) const {
            return "logreg_csv:" + c.path + "," + detail::fmt(c.reg);
        }
    };
    return std::visit(V{}, p);
}

inline std::string to_string(const MethodSpec& m) {
    struct V {
        std::string operator()(const OgmgMethod& o) const {
            return "ogmg:" + std::to_string(o.N) + "," + detail::fmt(o.L);
        }
        std::string operator()(const OgmgRepeatedMethod& o) const {
            return "ogmg_repeated:" + detail::fmt(o.L) + "," + detail::fmt(o.mu);
        }
        std::string operator()(const AcgmMethod&) const { return "acgm"; }
        std::string operator()(const AlgmMethod&) const { return "algm"; }
        std::string operator()(const UgmMethod&) const { return "ugm"; }
    };
    return std::visit(V{}, m);
}

inline std::string method_name(const MethodSpec& m) {
    const auto s = to_string(m);
    return s.substr(0, s.find(':'));
}

inline std::string to_string(const StartSpec& s) {
    switch (s.kind) {
    case StartKind::zeros: return "zeros";
    case StartKind::ones: return "ones";
    case StartKind::gaussian: return "gaussian:" + std::to_string(s.seed);
    case StartKind::scaled_gaussian: return "scaled_gaussian:" + std::to_string(s.seed);
    }
    return "?";
}

inline std::string_view to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::L: return "L";
    case SweepAxis::mu: return "mu";
    case SweepAxis::mu0: return "mu0";
    case SweepAxis::L0: return "L0";
    }
    return "?";
}

/// Value of FASTGRAD_MAX_GRAD_CALLS, if set.
inline std::optional<std::uint64_t> max_grad_calls_from_env() {
    const char* raw = std::getenv("FASTGRAD_MAX_GRAD_CALLS");
    if (!raw || !*raw) return std::nullopt;
    const auto v = detail::parse_uint(raw, "FASTGRAD_MAX_GRAD_CALLS");
    if (v == 0) throw spec_error("FASTGRAD_MAX_GRAD_CALLS must be positive");
    return v;
}

// ---------------------------------------------------------------------------
// Problem materialization

/// A constructed objective plus the reference constants used for defaults
/// and for the sqrt(L/mu) column of sweeps.
struct Instance {
    std::unique_ptr<Objective> objective;
    double reference_L = 0.0;   // exact L, or the power-iteration upper bound
    double reference_mu = 0.0;  // exact mu, or the regularization lower bound
};

inline Instance build_problem(const ProblemSpec& spec) {
    struct V {
        Instance operator()(const QuadraticSpec& q) const {
            auto p = std::make_unique<QuadraticProblem>(Vector(q.diag));
            const double L = *p->known_L();
            const double mu = *p->known_mu();
            return {std::move(p), L, mu};
        }
        Instance operator()(const LogRegSpec& l) const {
            auto p = std::make_unique<LogRegProblem>(gen_logreg(l.n_samples, l.n_features, l.reg, l.seed));
            const double L = lipschitz_upper_bound(*p);
            const double mu = p->mu_lower_bound();
            return {std::move(p), L, mu};
        }
        Instance operator()(const LogRegCsvSpec& c) const {
            auto p = std::make_unique<LogRegProblem>(load_logreg_csv(c.path, c.reg));
            const double L = lipschitz_upper_bound(*p);
            const double mu = p->mu_lower_bound();
            return {std::move(p), L, mu};
        }
    };
    try {
        return std::visit(V{}, spec);
    } catch (const spec_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw spec_error(e.what());
    }
}

inline Vector make_start(const StartSpec& s, const Objective& obj) {
    const std::size_t d = obj.dim();
    std::vector<double> x(d, s.kind == StartKind::ones ? 1.0 : 0.0);
    if (s.kind == StartKind::gaussian || s.kind == StartKind::scaled_gaussian) {
        SplitMix64 rng(s.seed);
        for (double& c : x) c = rng.normal();
    }
    if (s.kind == StartKind::scaled_gaussian) {
        if (const auto* q = dynamic_cast<const QuadraticProblem*>(&obj)) {
            for (std::size_t i = 0; i < d; ++i) x[i] /= std::sqrt(q->diag()[i]);
        }
    }
    return Vector(std::move(x));
}

// ---------------------------------------------------------------------------
// Trace and summary files

inline void write_trace_csv(std::ostream& os, const RunTrace& trace) {
    os << "event_index,event_kind,value_calls,grad_calls,grad_norm,f_value,mu_estimate,L_estimate\n";
    auto opt = [](const std::optional<double>& v) { return v ? detail::fmt(*v) : std::string(); };
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        os << i << ',' << to_string(e.kind) << ',' << e.value_calls << ',' << e.grad_calls << ','
           << detail::fmt(e.grad_norm) << ',' << opt(e.f_value) << ',' << opt(e.mu_estimate) << ','
           << opt(e.L_estimate) << '\n';
    }
}

inline RunTrace read_trace_csv(std::istream& is) {
    RunTrace trace;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trace csv: empty input");
    if (line.rfind("event_index,event_kind", 0) != 0) throw std::runtime_error("trace csv: bad header");
    auto opt = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return detail::parse_double(s, "trace field");
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 8) throw std::runtime_error("trace csv: expected 8 fields: " + line);
        if (detail::parse_uint(f[0], "event_index") != trace.events.size()) {
            throw std::runtime_error("trace csv: event_index out of order");
        }
        TraceEvent e;
        e.kind = parse_event_kind(f[1]);
        e.value_calls = detail::parse_uint(f[2], "value_calls");
        e.grad_calls = detail::parse_uint(f[3], "grad_calls");
        e.grad_norm = detail::parse_double(f[4], "grad_norm");
        e.f_value = opt(f[5]);
        e.mu_estimate = opt(f[6]);
        e.L_estimate = opt(f[7]);
        trace.push(e);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Running

struct ExperimentOutcome {
    DriverResult result;
    std::uint64_t grad_calls = 0;
    std::uint64_t value_calls = 0;
    double epsilon = 0.0;
    double initial_grad_norm = 0.0;
    double L_used = 0.0;
    double reference_L = 0.0;
    double reference_mu = 0.0;
    double wall_seconds = 0.0;
    int exit_code = kExitConverged;
    std::string error;  // set when exit_code is 1 or 3
};

inline nlohmann::json summary_json(const ExperimentSpec& spec, const ExperimentOutcome& out) {
    nlohmann::json j;
    j["problem"] = to_string(spec.problem);
    j["method"] = to_string(spec.method);
    j["x0"] = to_string(spec.x0);
    j["epsilon"] = out.epsilon;
    j["initial_grad_norm"] = out.initial_grad_norm;
    j["L_used"] = out.L_used;
    j["converged"] = out.result.converged;
    j["exit_code"] = out.exit_code;
    j["total_grad_calls"] = out.grad_calls;
    j["total_value_calls"] = out.value_calls;
    j["instrumentation_value_calls"] = out.result.trace.instrumentation_value_calls;
    j["final_grad_norm"] = out.result.trace.empty() ? 0.0 : out.result.trace.back().grad_norm;
    j["best_grad_norm"] = out.result.best_grad_norm;
    j["outer_steps"] = out.result.trajectory.empty() ? 0 : out.result.trajectory.size() - 1;
    j["trace_events"] = out.result.trace.events.size();
    j["wall_time_seconds"] = out.wall_seconds;
    j["diagnostics"] = out.result.diagnostics;
    if (!out.error.empty()) j["error"] = out.error;
    return j;
}

/// One-line human summary printed by the CLI.
inline std::string summary_line(const ExperimentOutcome& out) {
    std::ostringstream os;
    os << "converged=" << (out.result.converged ? "true" : "false")
       << " grad_calls=" << out.grad_calls << " value_calls=" << out.value_calls
       << " final_grad_norm=" << (out.result.trace.empty() ? 0.0 : out.result.trace.back().grad_norm)
       << " epsilon=" << out.epsilon << " wall_time=" << std::fixed << std::setprecision(3)
       << out.wall_seconds << "s";
    return os.str();
}

namespace detail {

// Throws spec_error on inconsistent fields; otherwise returns the solver
// configuration with defaults filled from the instance.
inline SolverConfig resolve_config(const ExperimentSpec& spec, const Instance& inst,
                                   double epsilon) {
    auto positive = [](std::optional<double> v, const char* name) {
        if (v && !(*v > 0.0)) throw spec_error(std::string(name) + " must be positive");
    };
    positive(spec.mu0, "mu0");
    positive(spec.L0, "L0");
    if (!(spec.beta > 1.0)) throw spec_error("beta must be > 1");
    if (spec.max_grad_calls == 0) throw spec_error("max_grad_calls must be positive");
    SolverConfig cfg;
    cfg.epsilon = epsilon;
    cfg.L0 = spec.L0.value_or(inst.reference_L);
    cfg.mu0 = spec.mu0.value_or(cfg.L0);
    cfg.beta = spec.beta;
    cfg.max_grad_calls = spec.max_grad_calls;
    cfg.max_retries_per_step = spec.max_retries_per_step;
    cfg.trace_values = spec.trace_values;
    return cfg;
}

inline void validate_method(const MethodSpec& m) {
    if (const auto* o = std::get_if<OgmgMethod>(&m)) {
        if (o->N == 0) throw spec_error("ogmg: N must be >= 1");
        if (!(o->L > 0.0)) throw spec_error("ogmg: L must be positive");
    }
    if (const auto* o = std::get_if<OgmgRepeatedMethod>(&m)) {
        if (!(o->L > 0.0) || !(o->mu > 0.0)) throw spec_error("ogmg_repeated: L and mu must be positive");
        if (o->mu > o->L) throw spec_error("ogmg_repeated: mu must not exceed L");
    }
}

inline void validate_spec(const ExperimentSpec& spec) {
    validate_method(spec.method);
    if (spec.epsilon && spec.eps_rel) throw spec_error("give either --eps or --eps-rel, not both");
    if (spec.epsilon && !(*spec.epsilon > 0.0)) throw spec_error("eps must be positive");
    if (spec.eps_rel && !(*spec.eps_rel > 0.0)) throw spec_error("eps-rel must be positive");
    if (const auto* q = std::get_if<QuadraticSpec>(&spec.problem)) {
        if (q->diag.empty()) throw spec_error("quadratic: no curvatures");
        for (double d : q->diag) {
            if (!(d > 0.0)) throw spec_error("quadratic: curvatures must be positive");
        }
    }
    if (const auto* l = std::get_if<LogRegSpec>(&spec.problem)) {
        if (l->n_samples == 0 || l->n_features == 0) throw spec_error("logreg: sizes must be >= 1");
        if (!(l->reg >= 0.0)) throw spec_error("logreg: C must be >= 0");
    }
}

inline DriverResult single_ogmg(CountingOracle& oracle, const Vector& x0, const OgmgMethod& m,
                                const SolverConfig& cfg) {
    DriverResult r;
    const double g0 = norm2(oracle.gradient(x0));
    r.trajectory.push_back(x0);
    if (g0 <= cfg.epsilon) {
        r.trace.push({oracle.value_calls(), oracle.grad_calls(), g0, std::nullopt, std::nullopt, m.L,
                      EventKind::terminated});
        r.best_point = x0;
        r.best_grad_norm = g0;
        r.converged = true;
        r.stop = StopReason::converged;
        return r;
    }
    r.trace.push({oracle.value_calls(), oracle.grad_calls(), g0, std::nullopt, std::nullopt, m.L,
                  EventKind::outer_step});
    Vector x = ogmg_run(oracle, x0, m.L, m.N);
    const double gn = norm2(oracle.gradient(x));
    r.trajectory.push_back(x);
    r.trace.push({oracle.value_calls(), oracle.grad_calls(), gn, std::nullopt, std::nullopt, m.L,
                  EventKind::terminated});
    r.best_point = gn < g0 ? x : x0;
    r.best_grad_norm = std::min(gn, g0);
    r.converged = gn <= cfg.epsilon;
    r.stop = r.converged ? StopReason::converged : StopReason::budget_exhausted;
    if (!r.converged) r.diagnostics.push_back("single OGM-G run ended above epsilon");
    return r;
}

inline void write_outputs(const ExperimentSpec& spec, const ExperimentOutcome& out) {
    if (spec.output_dir.empty()) return;
    std::filesystem::create_directories(spec.output_dir);
    const std::filesystem::path dir(spec.output_dir);
    {
        std::ofstream f(dir / "trace.csv");
        if (!f) throw std::runtime_error("cannot write " + (dir / "trace.csv").string());
        write_trace_csv(f, out.result.trace);
    }
    std::ofstream j(dir / "summary.json");
    if (!j) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    j << summary_json(spec, out).dump(2) << '\n';
}

} // namespace detail

/// Runs one experiment and, if spec.output_dir is set, writes trace.csv and
/// summary.json there. Never throws for spec or oracle problems; those are
/// reported through exit_code and error.
inline ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
    ExperimentOutcome out;
    Instance inst;
    SolverConfig cfg;
    Vector x0;
    try {
        detail::validate_spec(spec);
        inst = build_problem(spec.problem);
        x0 = make_start(spec.x0, *inst.objective);
        // Setup evaluation, deliberately outside the counted oracle.
        out.initial_grad_norm = norm2(inst.objective->gradient(x0));
        out.epsilon = spec.epsilon ? *spec.epsilon
                                   : spec.eps_rel.value_or(1e-6) * out.initial_grad_norm;
        if (!(out.epsilon > 0.0)) throw spec_error("resolved epsilon is not positive (x0 is stationary?)");
        cfg = detail::resolve_config(spec, inst, out.epsilon);
        out.reference_L = inst.reference_L;
        out.reference_mu = inst.reference_mu;
    } catch (const std::exception& e) {
        out.exit_code = kExitInvalidSpec;
        out.error = e.what();
        return out;
    }

    CountingOracle oracle(*inst.objective);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        struct V {
            CountingOracle& o;
            const Vector& x0;
            const SolverConfig& cfg;
            double& L_used;
            DriverResult operator()(const OgmgMethod& m) const {
                L_used = m.L;
                return detail::single_ogmg(o, x0, m, cfg);
            }
            DriverResult operator()(const OgmgRepeatedMethod& m) const {
                L_used = m.L;
                return ogmg_repeated(o, x0, m.L, m.mu, cfg.epsilon, cfg.max_grad_calls);
            }
            DriverResult operator()(const AcgmMethod&) const {
                L_used = cfg.L0;
                return acgm(o, x0, cfg.L0, cfg);
            }
            DriverResult operator()(const AlgmMethod&) const {
                L_used = cfg.L0;
                return algm(o, x0, cfg);
            }
            DriverResult operator()(const UgmMethod&) const {
                L_used = cfg.L0;
                return ugm(o, x0, cfg);
            }
        };
        out.result = std::visit(V{oracle, x0, cfg, out.L_used}, spec.method);
        out.exit_code = out.result.converged ? kExitConverged : kExitBudgetExhausted;
    } catch (const abort_error& e) {
        out.exit_code = kExitOracleAbort;
        out.error = e.what();
    } catch (const std::invalid_argument& e) {
        out.exit_code = kExitInvalidSpec;
        out.error = e.what();
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.grad_calls = oracle.grad_calls();
    out.value_calls = oracle.value_calls();

    try {
        detail::write_outputs(spec, out);
    } catch (const std::exception& e) {
        out.exit_code = kExitInvalidSpec;
        out.error = e.what();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    double axis_value = 0.0;
    double sqrt_L_over_mu = 0.0;
    std::uint64_t total_grad_calls = 0;
    std::uint64_t total_value_calls = 0;
    bool converged = false;
};

struct SweepOutcome {
    std::vector<SweepRow> rows;  // grid order, repetitions innermost
    int exit_code = kExitConverged;
    std::string error;
};

/// Experiment at one grid point, for repetition `rep`. Start seeds advance
/// with the repetition index.
inline ExperimentSpec sweep_point(const SweepSpec& sweep, double value, std::size_t rep) {
    ExperimentSpec s = sweep.base;
    s.output_dir.clear();
    s.x0.seed = sweep.base.x0.seed + rep;
    switch (sweep.axis) {
    case SweepAxis::L:
    case SweepAxis::mu: {
        auto* q = std::get_if<QuadraticSpec>(&s.problem);
        if (!q || q->diag.size() != 2) {
            throw spec_error("L and mu sweeps need a two-variable quadratic base problem");
        }
        q->diag[sweep.axis == SweepAxis::L ? 0 : 1] = value;
        if (q->diag[1] > q->diag[0]) throw spec_error("sweep point has mu > L");
        break;
    }
    case SweepAxis::mu0: s.mu0 = value; break;
    case SweepAxis::L0: s.L0 = value; break;
    }
    return s;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "axis_value,sqrt_L_over_mu,total_grad_calls,total_value_calls,converged\n";
    for (const auto& r : rows) {
        os << detail::fmt(r.axis_value) << ',' << detail::fmt(r.sqrt_L_over_mu) << ','
           << r.total_grad_calls << ',' << r.total_value_calls << ','
           << (r.converged ? "true" : "false") << '\n';
    }
}

/// Runs every grid point and repetition in grid order. All points are
/// validated before any is executed. Writes sweep.csv to base.output_dir.
inline SweepOutcome run_sweep(const SweepSpec& sweep) {
    SweepOutcome out;
    std::vector<ExperimentSpec> points;
    try {
        if (sweep.values.empty()) throw spec_error("sweep needs at least one value");
        if (sweep.repetitions == 0) throw spec_error("sweep needs at least one repetition");
        for (std::size_t i = 0; i < sweep.values.size(); ++i) {
            if (!(sweep.values[i] > 0.0)) throw spec_error("sweep values must be positive");
            if (i > 0 && !(sweep.values[i] > sweep.values[i - 1])) {
                throw spec_error("sweep values must be strictly ascending");
            }
        }
        for (double v : sweep.values) {
            for (std::size_t r = 0; r < sweep.repetitions; ++r) {
                points.push_back(sweep_point(sweep, v, r));
                detail::validate_spec(points.back());
            }
        }
    } catch (const std::exception& e) {
        out.exit_code = kExitInvalidSpec;
        out.error = e.what();
        return out;
    }

    for (std::size_t k = 0; k < points.size(); ++k) {
        const ExperimentOutcome e = run_experiment(points[k]);
        if (e.exit_code == kExitInvalidSpec || e.exit_code == kExitOracleAbort) {
            out.exit_code = e.exit_code;
            out.error = e.error;
            return out;
        }
        SweepRow row;
        row.axis_value = sweep.values[k / sweep.repetitions];
        row.sqrt_L_over_mu = std::sqrt(e.reference_L / e.reference_mu);
        row.total_grad_calls = e.grad_calls;
        row.total_value_calls = e.value_calls;
        row.converged = e.result.converged;
        if (!row.converged) out.exit_code = kExitBudgetExhausted;
        out.rows.push_back(row);
    }

    if (!sweep.base.output_dir.empty()) {
        std::filesystem::create_directories(sweep.base.output_dir);
        std::ofstream f(std::filesystem::path(sweep.base.output_dir) / "sweep.csv");
        if (!f) {
            out.exit_code = kExitInvalidSpec;
            out.error = "cannot write sweep.csv";
            return out;
        }
        write_sweep_csv(f, out.rows);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparisons

struct CompareOutcome {
    std::vector<std::string> labels;  // m<i>_<method>
    std::vector<ExperimentOutcome> runs;
    int exit_code = kExitConverged;
    std::string error;
};

/// Wide CSV: for each method a pair of columns <label>_grad_calls and
/// <label>_grad_norm, one trace event per row, shorter columns left blank.
inline void write_comparison_csv(std::ostream& os, const CompareOutcome& c) {
    for (std::size_t m = 0; m < c.labels.size(); ++m) {
        os << (m ? "," : "") << c.labels[m] << "_grad_calls," << c.labels[m] << "_grad_norm";
    }
    os << '\n';
    std::size_t rows = 0;
    for (const auto& r : c.runs) rows = std::max(rows, r.result.trace.events.size());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t m = 0; m < c.runs.size(); ++m) {
            if (m) os << ',';
            const auto& ev = c.runs[m].result.trace.events;
            if (i < ev.size()) os << ev[i].grad_calls << ',' << detail::fmt(ev[i].grad_norm);
            else os << ',';
        }
        os << '\n';
    }
}

inline void write_comparison_summary_csv(std::ostream& os, const CompareOutcome& c) {
    os << "label,method,total_grad_calls,total_value_calls,total_oracle_calls,converged\n";
    for (std::size_t m = 0; m < c.runs.size(); ++m) {
        const auto& r = c.runs[m];
        os << c.labels[m] << ',' << c.labels[m].substr(c.labels[m].find('_') + 1) << ','
           << r.grad_calls << ',' << r.value_calls << ',' << r.grad_calls + r.value_calls << ','
           << (r.result.converged ? "true" : "false") << '\n';
    }
}

/// Runs several methods on one problem and start point. Writes
/// comparison.csv and comparison_summary.csv to the first spec's output_dir.
inline CompareOutcome compare(const std::vector<ExperimentSpec>& specs) {
    CompareOutcome out;
    if (specs.empty()) {
        out.exit_code = kExitInvalidSpec;
        out.error = "compare needs at least one spec";
        return out;
    }
    const std::string problem = to_string(specs.front().problem);
    const std::string start = to_string(specs.front().x0);
    for (const auto& s : specs) {
        if (to_string(s.problem) != problem || to_string(s.x0) != start) {
            out.exit_code = kExitInvalidSpec;
            out.error = "compare: all specs must share the problem and x0";
            return out;
        }
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        ExperimentSpec s = specs[i];
        s.output_dir.clear();
        out.labels.push_back("m" + std::to_string(i) + "_" + method_name(s.method));
        out.runs.push_back(run_experiment(s));
        const int code = out.runs.back().exit_code;
        if (code == kExitInvalidSpec || code == kExitOracleAbort) {
            out.exit_code = code;
            out.error = out.labels.back() + ": " + out.runs.back().error;
            return out;
        }
        if (code == kExitBudgetExhausted) out.exit_code = kExitBudgetExhausted;
    }
    const std::string& dir = specs.front().output_dir;
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        std::ofstream f(std::filesystem::path(dir) / "comparison.csv");
        std::ofstream g(std::filesystem::path(dir) / "comparison_summary.csv");
        if (!f || !g) {
            out.exit_code = kExitInvalidSpec;
            out.error = "cannot write comparison files";
            return out;
        }
        write_comparison_csv(f, out);
        write_comparison_summary_csv(g, out);
    }
    return out;
}

} // namespace fastgrad::bench
