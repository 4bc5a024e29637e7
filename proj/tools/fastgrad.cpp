// fastgrad: run, sweep and compare adaptive OGM-G solvers on benchmark
// problems, writing CSV traces and JSON summaries.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fastgrad/bench.hpp"

namespace {

using namespace fastgrad::bench;

// Raw flag values shared by all subcommands. Parsed into an ExperimentSpec
// after CLI11 is done so that errors map to exit code 1.
struct RunFlags {
    std::string problem = "quadratic:1000,0.1";
    std::string method = "acgm";
    std::optional<double> eps;
    std::optional<double> eps_rel;
    std::optional<double> mu0;
    std::optional<double> l0;
    double beta = 4.0;
    std::uint64_t seed = 42;
    std::string x0 = "gaussian";
    std::optional<std::uint64_t> max_grad_calls;
    bool trace_values = false;
    std::string out;
};

void add_run_flags(CLI::App& app, RunFlags& f, bool with_out = true) {
    app.add_option("--problem", f.problem,
                   "quadratic:d1,d2,... | logreg:n,m,C,seed | logreg_csv:path[,C]")
        ->capture_default_str();
    app.add_option("--method", f.method, "acgm | algm | ugm | ogmg:N,L | ogmg_repeated:L,mu")
        ->capture_default_str();
    auto* eps = app.add_option("--eps", f.eps, "absolute target gradient norm");
    app.add_option("--eps-rel", f.eps_rel, "target as a fraction of |grad f(x0)| (default 1e-6)")
        ->excludes(eps);
    app.add_option("--mu0", f.mu0, "initial strong-convexity estimate (default: L0)");
    app.add_option("--l0", f.l0, "Lipschitz constant / initial estimate (default: problem reference L)");
    app.add_option("--beta", f.beta, "mu update factor")->capture_default_str();
    app.add_option("--seed", f.seed, "seed for the starting point")->capture_default_str();
    app.add_option("--x0", f.x0, "zeros | ones | gaussian | scaled_gaussian")->capture_default_str();
    app.add_option("--max-grad-calls", f.max_grad_calls,
                   "gradient-call safety budget (FASTGRAD_MAX_GRAD_CALLS overrides)");
    app.add_flag("--trace-values", f.trace_values, "record f at every trace event (extra value calls)");
    if (with_out) app.add_option("--out", f.out, "output directory")->capture_default_str();
}

ExperimentSpec to_spec(const RunFlags& f) {
    ExperimentSpec s;
    s.problem = parse_problem(f.problem);
    s.method = parse_method(f.method);
    s.epsilon = f.eps;
    s.eps_rel = f.eps_rel;
    s.mu0 = f.mu0;
    s.L0 = f.l0;
    s.beta = f.beta;
    s.x0 = {parse_start_kind(f.x0), f.seed};
    s.trace_values = f.trace_values;
    s.output_dir = f.out;
    if (f.max_grad_calls) s.max_grad_calls = *f.max_grad_calls;
    if (auto env = max_grad_calls_from_env()) s.max_grad_calls = *env;
    return s;
}

int report_failure(const std::string& what, int code) {
    std::cerr << "fastgrad: " << what << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive optimal gradient methods: experiment harness"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run one experiment");
    add_run_flags(*run, run_flags);

    RunFlags sweep_flags;
    std::string axis = "L";
    std::string values;
    std::size_t reps = 1;
    auto* sweep = app.add_subcommand("sweep", "run a one-axis parameter grid");
    add_run_flags(*sweep, sweep_flags);
    sweep->add_option("--axis", axis, "L | mu | mu0 | L0")->capture_default_str();
    sweep->add_option("--values", values, "comma-separated ascending grid values")->required();
    sweep->add_option("--reps", reps, "repetitions per grid point (start seed advances)")
        ->capture_default_str();

    std::vector<std::string> compare_specs;
    std::string compare_out;
    auto* cmp = app.add_subcommand("compare", "run several methods on one problem");
    cmp->add_option("--spec", compare_specs, "quoted run flags, e.g. \"--method algm\"; repeatable")
        ->required();
    cmp->add_option("--out", compare_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInvalidSpec;
    }

    try {
        if (*run) {
            const ExperimentSpec spec = to_spec(run_flags);
            const ExperimentOutcome out = run_experiment(spec);
            if (!out.error.empty()) return report_failure(out.error, out.exit_code);
            std::cout << summary_line(out) << '\n';
            return out.exit_code;
        }
        if (*sweep) {
            SweepSpec s;
            s.base = to_spec(sweep_flags);
            s.axis = parse_axis(axis);
            s.values = parse_values(values);
            s.repetitions = reps;
            const SweepOutcome out = run_sweep(s);
            if (!out.error.empty()) return report_failure(out.error, out.exit_code);
            write_sweep_csv(std::cout, out.rows);
            return out.exit_code;
        }
        if (*cmp) {
            std::vector<ExperimentSpec> specs;
            for (const auto& text : compare_specs) {
                RunFlags f;
                CLI::App sub{"compare spec"};
                add_run_flags(sub, f, false);
                sub.parse(text, false);
                specs.push_back(to_spec(f));
            }
            specs.front().output_dir = compare_out;
            const CompareOutcome out = compare(specs);
            if (!out.error.empty()) return report_failure(out.error, out.exit_code);
            write_comparison_summary_csv(std::cout, out);
            return out.exit_code;
        }
    } catch (const CLI::ParseError& e) {
        return report_failure(std::string("bad --spec: ") + e.what(), kExitInvalidSpec);
    } catch (const spec_error& e) {
        return report_failure(e.what(), kExitInvalidSpec);
    } catch (const std::exception& e) {
        return report_failure(e.what(), kExitInvalidSpec);
    }
    return kExitInvalidSpec;
}
