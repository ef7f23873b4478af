// coopeq: command-line front end for the cooperative-optimization solvers.
//
// Subcommands: solve-soft, solve-hard, sweep, validate, oracle. Summaries go
// to stdout, per-iteration traces to files. Exit codes: 0 success or
// convergence, 2 finished without converging, 1 any error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coopeq/errors.hpp"
#include "coopeq/game_io.hpp"
#include "coopeq/hard_engine.hpp"
#include "coopeq/model.hpp"
#include "coopeq/oracle.hpp"
#include "coopeq/propagation.hpp"
#include "coopeq/soft_engine.hpp"
#include "coopeq/trace.hpp"

namespace {

using namespace coopeq;

constexpr double kResidualCertTol = 1e-8;

struct SoftFlags {
    std::string game_path;
    double alpha = 1.0;
    double hbar = 1.0;
    double tol = 1e-10;
    int max_iters = 10000;
    std::string init = "uniform";
    std::uint64_t seed = 0;
    std::string trace_path;
};

struct HardFlags {
    std::string game_path;
    double lambda = 0.5;
    std::string w = "";  // "", "uniform", "offdiag", "file"
    std::string w_file;
    double tol = 1e-9;
    int max_iters = 10000;
    std::string init = "zero";
    std::uint64_t seed = 0;
    double range = 1.0;
    std::string trace_path;
    bool strict_w = false;
};

std::string label_assignment(const Game& g, const std::vector<int>& x) {
    if (g.action_labels.empty()) return "";
    std::string s = " (";
    for (int i = 0; i < g.num_agents(); ++i) {
        if (i > 0) s += ',';
        s += g.action_labels[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
    }
    s += ")";
    return s;
}

std::string describe_game(const Game& g) {
    std::string s = (g.flavor == GameFlavor::NormalForm) ? "normal_form" : "factored";
    s += ", n=" + std::to_string(g.num_agents()) + ", actions=";
    for (int i = 0; i < g.num_agents(); ++i) {
        if (i > 0) s += '|';
        s += std::to_string(g.num_actions(i));
    }
    return s;
}

PropagationMatrix resolve_w(const ParsedGameFile& pf, const std::string& w_flag,
                            const std::string& w_file, int n) {
    if (!w_file.empty()) return load_w_file(w_file);
    if (w_flag == "uniform") return make_uniform_w(n);
    if (w_flag == "offdiag") return make_offdiagonal_w(n);
    if (w_flag == "file") {
        if (pf.w_dense) return *pf.w_dense;
        if (pf.w_name == "uniform") return make_uniform_w(n);
        if (pf.w_name == "offdiag") return make_offdiagonal_w(n);
        throw ConfigError("--w file requested but the game file carries no w");
    }
    // No explicit request: embedded w if present, uniform otherwise.
    if (pf.w_dense) return *pf.w_dense;
    if (pf.w_name == "uniform") return make_uniform_w(n);
    if (pf.w_name == "offdiag") return make_offdiagonal_w(n);
    return make_uniform_w(n);
}

// Hard checks always gate the run; aperiodicity warns unless strict.
void enforce_w_checks(const PropagationMatrix& W, bool strict) {
    const ValidationReport rep = validate_w(W);
    if (!rep.hard_ok()) {
        std::string msg = "propagation matrix failed validation:";
        for (const auto& f : rep.failures) msg += " " + f + ";";
        throw ConfigError(msg);
    }
    if (!rep.aperiodic) {
        if (strict) {
            throw ConfigError("propagation matrix is periodic (strict mode)");
        }
        std::cerr << "warning: propagation matrix is periodic; convergence still follows "
                     "from contraction when the modulus is below 1\n";
    }
}

SoftConfig to_config(const SoftFlags& f) {
    SoftConfig cfg;
    cfg.alpha = f.alpha;
    cfg.hbar = f.hbar;
    cfg.tol = f.tol;
    cfg.max_iters = f.max_iters;
    cfg.init = (f.init == "random") ? SoftInit::RandomSeeded : SoftInit::Uniform;
    cfg.seed = f.seed;
    return cfg;
}

void write_soft_trace(const std::string& path, const SoftResult& res) {
    if (path.empty()) return;
    TraceWriter tw(path);
    for (const SoftTraceRow& r : res.trace) {
        TraceRow row;
        row.iter = r.iter;
        row.engine = "soft";
        row.max_delta = r.max_delta;
        row.max_nash_gap = r.max_gap;
        row.bound_max = r.bound_max;
        row.best_value = r.best_value;
        row.best_assignment = r.x_tilde;
        tw.write(row);
    }
    tw.close();
}

void write_hard_trace(const std::string& path, const HardResult& res) {
    if (path.empty()) return;
    TraceWriter tw(path);
    for (const HardTraceRow& r : res.trace) {
        TraceRow row;
        row.iter = r.iter;
        row.engine = "hard";
        row.max_delta = r.delta;
        row.consensus = r.consensus;
        row.best_value = r.best_value;
        row.best_assignment = r.x_tilde;
        tw.write(row);
    }
    tw.close();
}

int run_solve_soft(const SoftFlags& flags) {
    const ParsedGameFile pf = load_game_file(flags.game_path);
    const Game& g = pf.game;
    const SoftConfig cfg = to_config(flags);
    cfg.validate();

    const SoftResult res = run_soft(g, cfg);
    write_soft_trace(flags.trace_path, res);
    const FixedPointCheck fp = verify_fixed_point(g, res.final_state, cfg, kResidualCertTol);

    std::cout << "game: " << flags.game_path << " (" << describe_game(g) << ")\n";
    std::cout << "engine: soft alpha=" << format_g17(cfg.alpha) << " hbar=" << format_g17(cfg.hbar)
              << " tol=" << format_g17(cfg.tol) << " max_iters=" << cfg.max_iters
              << " init=" << flags.init << " seed=" << flags.seed << "\n";
    std::cout << "converged: " << (res.converged ? "yes" : "no")
              << " (iterations=" << res.iterations << ")\n";
    const SoftTraceRow& last = res.trace.back();
    std::cout << "final max nash gap: " << format_g17(last.max_gap) << "\n";
    if (last.bound_max) {
        std::cout << "gap bound (max over agents): " << format_g17(*last.bound_max)
                  << (last.bound_ok.value_or(false) ? " (satisfied)" : " (violated)") << "\n";
    }
    std::cout << "fixed-point residual: " << format_g17(fp.residual) << " (tol "
              << format_g17(kResidualCertTol) << ": " << (fp.within_tol ? "ok" : "exceeded")
              << ")\n";
    std::cout << "best assignment: " << join_assignment(last.x_tilde)
              << label_assignment(g, last.x_tilde) << " value=" << format_g17(last.best_value)
              << "\n";
    return res.converged ? 0 : 2;
}

int run_solve_hard(const HardFlags& flags) {
    const ParsedGameFile pf = load_game_file(flags.game_path);
    const Game& g = pf.game;

    HardConfig cfg;
    cfg.lambda = LambdaSchedule::constant(flags.lambda);
    cfg.w = resolve_w(pf, flags.w, flags.w_file, g.num_agents());
    cfg.tol = flags.tol;
    cfg.max_iters = flags.max_iters;
    cfg.init = (flags.init == "random") ? HardInit::RandomSeeded : HardInit::Zero;
    cfg.seed = flags.seed;
    cfg.init_range = flags.range;
    cfg.validate(g.num_agents());
    enforce_w_checks(cfg.w, flags.strict_w);

    const HardResult res = run_hard(g, cfg);
    write_hard_trace(flags.trace_path, res);

    std::cout << "game: " << flags.game_path << " (" << describe_game(g) << ")\n";
    std::cout << "engine: hard lambda=" << format_g17(flags.lambda) << " tol="
              << format_g17(cfg.tol) << " max_iters=" << cfg.max_iters << " init=" << flags.init
              << " seed=" << flags.seed << "\n";
    std::cout << "converged: " << (res.converged ? "yes" : "no")
              << " (iterations=" << res.iterations << ")\n";
    std::cout << "best assignment: " << join_assignment(res.best.x)
              << label_assignment(g, res.best.x)
              << " value=" << format_g17(global_utility(g, res.best.x))
              << (res.best.any_tie ? " (ties broken to lowest index)" : "") << "\n";
    std::cout << "consensus: " << (res.final_consensus ? "yes" : "no") << "\n";
    if (res.converged && res.final_consensus) {
        try {
            const GlobalAuditReport audit = consensus_is_global_check(g, res);
            std::cout << "oracle: pure nash " << (audit.pure_nash.value_or(false) ? "yes" : "no")
                      << "; global optimum "
                      << (audit.global_optimum.value_or(false) ? "yes" : "no");
            if (audit.global_value) {
                std::cout << " (best " << format_g17(audit.value_at_best) << " vs global "
                          << format_g17(*audit.global_value) << ")";
            }
            std::cout << "\n";
        } catch (const CapacityError&) {
            std::cout << "oracle: skipped (game above oracle capacity)\n";
        }
    }
    if (!res.contraction_ratios.empty()) {
        std::cout << "empirical contraction ratio (final): "
                  << format_g17(res.contraction_ratios.back()) << "\n";
    }
    std::cout << "contraction modulus bound: " << format_g17(res.contraction_bound) << "\n";
    return res.converged ? 0 : 2;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse sweep value \"" + item + "\"");
        }
    }
    if (out.empty()) throw ConfigError("sweep needs at least one value");
    return out;
}

std::string trace_path_for(const std::string& dir, std::size_t index) {
    if (dir.empty()) return "";
    char name[32];
    std::snprintf(name, sizeof(name), "trace_%03zu.csv", index);
    return (std::filesystem::path(dir) / name).string();
}

int run_sweep(const std::string& param, const std::string& values_csv, const SoftFlags& soft,
              const HardFlags& hard, const std::string& trace_dir) {
    const std::vector<double> values = parse_values(values_csv);
    if (!trace_dir.empty()) std::filesystem::create_directories(trace_dir);

    if (param == "alpha") {
        const ParsedGameFile pf = load_game_file(soft.game_path);
        const Game& g = pf.game;
        std::cout << "alpha,converged,iterations,max_gap,gap_bound,residual\n";
        for (std::size_t k = 0; k < values.size(); ++k) {
            SoftFlags f = soft;
            f.alpha = values[k];
            SoftConfig cfg = to_config(f);
            cfg.validate();
            const SoftResult res = run_soft(g, cfg);
            write_soft_trace(trace_path_for(trace_dir, k), res);
            const FixedPointCheck fp =
                verify_fixed_point(g, res.final_state, cfg, kResidualCertTol);
            const SoftTraceRow& last = res.trace.back();
            std::cout << format_g17(values[k]) << ',' << (res.converged ? 1 : 0) << ','
                      << res.iterations << ',' << format_g17(last.max_gap) << ',';
            if (last.bound_max) std::cout << format_g17(*last.bound_max);
            std::cout << ',' << format_g17(fp.residual) << "\n";
        }
        return 0;
    }

    if (param == "lambda") {
        const ParsedGameFile pf = load_game_file(hard.game_path);
        const Game& g = pf.game;
        const PropagationMatrix W = resolve_w(pf, hard.w, hard.w_file, g.num_agents());
        enforce_w_checks(W, hard.strict_w);
        std::cout
            << "lambda,converged,iterations,consensus,contraction_modulus,final_ratio,best_assignment\n";
        for (std::size_t k = 0; k < values.size(); ++k) {
            HardConfig cfg;
            cfg.lambda = LambdaSchedule::constant(values[k]);
            cfg.w = W;
            cfg.tol = hard.tol;
            cfg.max_iters = hard.max_iters;
            cfg.init = (hard.init == "random") ? HardInit::RandomSeeded : HardInit::Zero;
            cfg.seed = hard.seed;
            cfg.init_range = hard.range;
            cfg.validate(g.num_agents());
            const HardResult res = run_hard(g, cfg);
            write_hard_trace(trace_path_for(trace_dir, k), res);
            std::cout << format_g17(values[k]) << ',' << (res.converged ? 1 : 0) << ','
                      << res.iterations << ',' << (res.final_consensus ? 1 : 0) << ','
                      << format_g17(res.contraction_bound) << ',';
            if (!res.contraction_ratios.empty()) {
                std::cout << format_g17(res.contraction_ratios.back());
            }
            std::cout << ',' << join_assignment(res.best.x) << "\n";
        }
        return 0;
    }

    throw ConfigError("--sweep must be alpha or lambda");
}

int run_validate(const std::string& game_path, const std::string& w_file,
                 const std::string& w_flag, bool strict) {
    if (game_path.empty() && w_file.empty()) {
        throw ConfigError("validate needs --game or --w-file");
    }
    std::optional<PropagationMatrix> W;
    int n = 0;
    if (!game_path.empty()) {
        const ParsedGameFile pf = load_game_file(game_path);
        n = pf.game.num_agents();
        std::cout << "game: " << game_path << " (" << describe_game(pf.game)
                  << ", joint profiles=" << pf.game.joint_count() << ")\n";
        W = resolve_w(pf, w_flag, w_file, n);
    } else {
        W = load_w_file(w_file);
        n = W->n;
    }

    const ValidationReport rep = validate_w(*W);
    std::cout << "w: n=" << n << " nonnegative=" << (rep.nonnegative ? "yes" : "no")
              << " column_stochastic=" << (rep.column_stochastic ? "yes" : "no")
              << " irreducible=" << (rep.irreducible ? "yes" : "no")
              << " aperiodic=" << (rep.aperiodic ? "yes" : "no") << "\n";
    for (const auto& f : rep.failures) std::cout << "  check failed: " << f << "\n";
    if (!rep.aperiodic && !strict && rep.hard_ok()) {
        std::cerr << "warning: propagation matrix is periodic\n";
    }
    const bool ok = strict ? rep.all_ok() : rep.hard_ok();
    std::cout << "verdict: " << (ok ? "valid" : "invalid") << "\n";
    return ok ? 0 : 1;
}

int run_oracle(const std::string& game_path) {
    const ParsedGameFile pf = load_game_file(game_path);
    const Game& g = pf.game;
    std::cout << "game: " << game_path << " (" << describe_game(g)
              << ", joint profiles=" << g.joint_count() << ")\n";

    const oracle::NashReport nash = oracle::enumerate_pure_nash(g);
    std::cout << "pure nash equilibria: " << nash.equilibria.size() << "\n";
    for (const auto& e : nash.equilibria) {
        std::cout << "  " << join_assignment(e.profile) << label_assignment(g, e.profile)
                  << " margin=" << format_g17(e.margin) << "\n";
    }

    const oracle::GlobalOptimum opt = oracle::global_optimum(g);
    std::cout << "global optimum value: " << format_g17(opt.value) << "\n";
    for (const auto& x : opt.argmax) {
        std::cout << "  " << join_assignment(x) << label_assignment(g, x) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cooperative-optimization equilibrium solver"};
    app.require_subcommand(1);

    SoftFlags soft;
    HardFlags hard;
    std::string sweep_param;
    std::string sweep_values;
    std::string sweep_trace_dir;
    std::string validate_game_path;
    std::string validate_w_file;
    std::string validate_w_flag;
    bool validate_strict = false;
    std::string oracle_game_path;

    CLI::App* cmd_soft = app.add_subcommand("solve-soft", "run the soft-decision engine");
    cmd_soft->add_option("--game", soft.game_path, "game file (JSON)")->required();
    cmd_soft->add_option("--alpha", soft.alpha, "selfishness exponent (> 0)")->required();
    cmd_soft->add_option("--hbar", soft.hbar, "temperature (> 0)");
    cmd_soft->add_option("--tol", soft.tol, "stopping threshold on strategy change");
    cmd_soft->add_option("--max-iters", soft.max_iters, "iteration cap");
    cmd_soft->add_option("--init", soft.init, "uniform|random")
        ->check(CLI::IsMember({"uniform", "random"}));
    cmd_soft->add_option("--seed", soft.seed, "seed for random init");
    cmd_soft->add_option("--trace", soft.trace_path, "per-iteration CSV trace file");

    CLI::App* cmd_hard = app.add_subcommand("solve-hard", "run the max-sum engine");
    cmd_hard->add_option("--game", hard.game_path, "game file (JSON)")->required();
    cmd_hard->add_option("--lambda", hard.lambda, "cooperation strength in [0, 1)")->required();
    cmd_hard->add_option("--w", hard.w, "uniform|offdiag|file")
        ->check(CLI::IsMember({"uniform", "offdiag", "file"}));
    cmd_hard->add_option("--w-file", hard.w_file, "dense propagation matrix (JSON rows)");
    cmd_hard->add_option("--tol", hard.tol, "stopping threshold on psi change");
    cmd_hard->add_option("--max-iters", hard.max_iters, "iteration cap");
    cmd_hard->add_option("--init", hard.init, "zero|random")
        ->check(CLI::IsMember({"zero", "random"}));
    cmd_hard->add_option("--seed", hard.seed, "seed for random init");
    cmd_hard->add_option("--range", hard.range, "random init range [-range, range]");
    cmd_hard->add_option("--trace", hard.trace_path, "per-iteration CSV trace file");
    cmd_hard->add_flag("--strict-w", hard.strict_w, "treat aperiodicity warnings as errors");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "run one solve per parameter value");
    cmd_sweep->add_option("--sweep", sweep_param, "alpha|lambda")
        ->required()
        ->check(CLI::IsMember({"alpha", "lambda"}));
    cmd_sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    cmd_sweep->add_option("--game", soft.game_path, "game file (JSON)")->required();
    cmd_sweep->add_option("--alpha", soft.alpha, "alpha for lambda sweeps");
    cmd_sweep->add_option("--hbar", soft.hbar, "temperature (> 0)");
    cmd_sweep->add_option("--tol", soft.tol, "stopping threshold");
    cmd_sweep->add_option("--max-iters", soft.max_iters, "iteration cap");
    cmd_sweep->add_option("--init", soft.init, "uniform|random (soft) / zero|random (hard)");
    cmd_sweep->add_option("--seed", soft.seed, "seed for random init");
    cmd_sweep->add_option("--range", hard.range, "random init range for lambda sweeps");
    cmd_sweep->add_option("--w", hard.w, "uniform|offdiag|file")
        ->check(CLI::IsMember({"uniform", "offdiag", "file"}));
    cmd_sweep->add_option("--w-file", hard.w_file, "dense propagation matrix (JSON rows)");
    cmd_sweep->add_flag("--strict-w", hard.strict_w, "treat aperiodicity warnings as errors");
    cmd_sweep->add_option("--trace-dir", sweep_trace_dir, "directory for per-value traces");

    CLI::App* cmd_validate = app.add_subcommand("validate", "check a game file and its w");
    cmd_validate->add_option("--game", validate_game_path, "game file (JSON)");
    cmd_validate->add_option("--w-file", validate_w_file, "dense propagation matrix (JSON rows)");
    cmd_validate->add_option("--w", validate_w_flag, "uniform|offdiag|file")
        ->check(CLI::IsMember({"uniform", "offdiag", "file"}));
    cmd_validate->add_flag("--strict-w", validate_strict, "require aperiodicity too");

    CLI::App* cmd_oracle = app.add_subcommand("oracle", "brute-force nash and optimum report");
    cmd_oracle->add_option("--game", oracle_game_path, "game file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (cmd_soft->parsed()) return run_solve_soft(soft);
        if (cmd_hard->parsed()) return run_solve_hard(hard);
        if (cmd_sweep->parsed()) {
            // The sweep shares --game/--tol/--max-iters/--init/--seed between
            // engines; copy them over for the hard side. An untouched --tol
            // keeps each engine's own default.
            hard.game_path = soft.game_path;
            hard.tol = (cmd_sweep->count("--tol") > 0) ? soft.tol : 1e-9;
            hard.max_iters = soft.max_iters;
            hard.init = (soft.init == "uniform") ? "zero" : soft.init;
            hard.seed = soft.seed;
            return run_sweep(sweep_param, sweep_values, soft, hard, sweep_trace_dir);
        }
        if (cmd_validate->parsed()) {
            return run_validate(validate_game_path, validate_w_file, validate_w_flag,
                                validate_strict);
        }
        if (cmd_oracle->parsed()) return run_oracle(oracle_game_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
