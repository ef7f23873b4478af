#include "coopeq/hard_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopeq/errors.hpp"
#include "coopeq/oracle.hpp"
#include "coopeq/parallel.hpp"

namespace coopeq {

double LambdaSchedule::at(int iter) const {
    const std::size_t idx = std::min(static_cast<std::size_t>(iter - 1), values.size() - 1);
    return values[idx];
}

void LambdaSchedule::validate() const {
    if (values.empty()) throw ConfigError("lambda schedule must not be empty");
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ConfigError("lambda values must be finite and nonnegative");
        }
    }
    if (is_constant() && !(values[0] < 1.0)) {
        throw ConfigError("constant lambda must lie in [0, 1)");
    }
}

void HardConfig::validate(int num_agents) const {
    lambda.validate();
    require_stochastic(w);
    if (w.n != num_agents) {
        throw ConfigError("propagation matrix size does not match the agent count");
    }
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (init == HardInit::RandomSeeded && (!(init_range >= 0.0) || !std::isfinite(init_range))) {
        throw ConfigError("init range must be finite and nonnegative");
    }
}

AssignmentState hard_step(const Game& g, const AssignmentState& prev, double lambda,
                          const PropagationMatrix& W) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("lambda must be finite and nonnegative");
    }
    validate_state(g, prev, StateDomain::Linear);
    if (W.n != g.num_agents()) {
        throw InputError("propagation matrix size does not match the agent count");
    }
    const int n = g.num_agents();

    std::vector<double> max_psi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto& row = prev.values[static_cast<std::size_t>(j)];
        max_psi[static_cast<std::size_t>(j)] = *std::max_element(row.begin(), row.end());
    }

    AssignmentState out;
    out.domain = StateDomain::Linear;
    out.values.assign(static_cast<std::size_t>(n), {});

    parallel_for(n, [&](int i) {
        const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
        const int k = static_cast<int>(sub.scope.size());
        int pos_i = 0;
        std::vector<int> dims(static_cast<std::size_t>(k));
        std::vector<char> in_scope(static_cast<std::size_t>(n), 0);
        for (int p = 0; p < k; ++p) {
            const int v = sub.scope[static_cast<std::size_t>(p)];
            dims[static_cast<std::size_t>(p)] = g.action_counts[static_cast<std::size_t>(v)];
            in_scope[static_cast<std::size_t>(v)] = 1;
            if (v == i) pos_i = p;
        }

        const int mi = g.num_actions(i);
        std::vector<double> row(static_cast<std::size_t>(mi));
        std::vector<int> xs(static_cast<std::size_t>(k));
        for (int a = 0; a < mi; ++a) {
            std::fill(xs.begin(), xs.end(), 0);
            xs[static_cast<std::size_t>(pos_i)] = a;
            double best = -std::numeric_limits<double>::infinity();
            do {
                double v = sub.table[static_cast<std::size_t>(flat_index(dims, xs))];
                for (int p = 0; p < k; ++p) {
                    if (p == pos_i) continue;
                    const int j = sub.scope[static_cast<std::size_t>(p)];
                    v += (lambda * W.at(i, j)) *
                         prev.values[static_cast<std::size_t>(j)]
                                    [static_cast<std::size_t>(xs[static_cast<std::size_t>(p)])];
                }
                best = std::max(best, v);
            } while (next_assignment_skip(xs, dims, pos_i));
            // Variables outside the scope decouple: the inner max separates to
            // the constant lambda * w_ij * max_a psi_j(a) per variable.
            for (int j = 0; j < n; ++j) {
                if (j == i || in_scope[static_cast<std::size_t>(j)]) continue;
                best += (lambda * W.at(i, j)) * max_psi[static_cast<std::size_t>(j)];
            }
            row[static_cast<std::size_t>(a)] = best;
        }
        out.values[static_cast<std::size_t>(i)] = std::move(row);
    });

    return out;
}

BestAssignment best_assignment(const AssignmentState& state) {
    if (state.domain != StateDomain::Linear) {
        throw InputError("best_assignment expects a linear-domain state");
    }
    BestAssignment out;
    out.x.reserve(state.values.size());
    out.tie.reserve(state.values.size());
    for (const auto& row : state.values) {
        int best = 0;
        for (std::size_t a = 1; a < row.size(); ++a) {
            if (row[a] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
        }
        bool tie = false;
        for (std::size_t a = 0; a < row.size(); ++a) {
            if (static_cast<int>(a) != best && row[a] == row[static_cast<std::size_t>(best)]) {
                tie = true;
                break;
            }
        }
        out.x.push_back(best);
        out.tie.push_back(tie);
        out.any_tie = out.any_tie || tie;
    }
    return out;
}

ConsensusReport check_consensus(const Game& g, const AssignmentState& state_prev,
                                const std::vector<int>& x_tilde, double lambda,
                                const PropagationMatrix& W) {
    validate_state(g, state_prev, StateDomain::Linear);
    if (static_cast<int>(x_tilde.size()) != g.num_agents()) {
        throw InputError("best assignment length does not match the agent count");
    }
    const int n = g.num_agents();

    ConsensusReport rep;
    rep.per_agent.assign(static_cast<std::size_t>(n), false);
    rep.overall = true;

    for (int i = 0; i < n; ++i) {
        const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
        const int k = static_cast<int>(sub.scope.size());
        int pos_i = 0;
        std::vector<int> dims(static_cast<std::size_t>(k));
        std::vector<int> target(static_cast<std::size_t>(k));
        for (int p = 0; p < k; ++p) {
            const int v = sub.scope[static_cast<std::size_t>(p)];
            dims[static_cast<std::size_t>(p)] = g.action_counts[static_cast<std::size_t>(v)];
            target[static_cast<std::size_t>(p)] = x_tilde[static_cast<std::size_t>(v)];
            if (v == i) pos_i = p;
        }
        (void)pos_i;

        double best = -std::numeric_limits<double>::infinity();
        double at_target = 0.0;
        std::vector<int> xs(static_cast<std::size_t>(k), 0);
        do {
            double v = sub.table[static_cast<std::size_t>(flat_index(dims, xs))];
            for (int p = 0; p < k; ++p) {
                const int j = sub.scope[static_cast<std::size_t>(p)];
                if (j == i) continue;
                v += (lambda * W.at(i, j)) *
                     state_prev.values[static_cast<std::size_t>(j)]
                                      [static_cast<std::size_t>(xs[static_cast<std::size_t>(p)])];
            }
            best = std::max(best, v);
            if (xs == target) at_target = v;
        } while (next_assignment(xs, dims));

        const bool ok = at_target >= best - kConsensusTieTol;
        rep.per_agent[static_cast<std::size_t>(i)] = ok;
        rep.overall = rep.overall && ok;
    }
    return rep;
}

namespace {

void check_state_finite(const Game& g, const AssignmentState& s, int iter) {
    for (int i = 0; i < g.num_agents(); ++i) {
        for (double v : s.values[static_cast<std::size_t>(i)]) {
            if (!std::isfinite(v)) {
                throw NumericalError("non-finite assignment value for agent " +
                                     std::to_string(i + 1) + " at iteration " +
                                     std::to_string(iter));
            }
        }
    }
}

}  // namespace

HardResult run_hard(const Game& g, const HardConfig& cfg) {
    validate_game(g);
    cfg.validate(g.num_agents());

    AssignmentState state = (cfg.init == HardInit::Zero)
                                ? zero_state(g)
                                : random_state(g, cfg.seed, cfg.init_range);

    HardResult res;
    double lambda_max = 0.0;
    for (double v : cfg.lambda.values) lambda_max = std::max(lambda_max, v);
    res.contraction_bound = contraction_modulus(cfg.w, lambda_max);
    if (cfg.lambda.is_constant()) res.constant_lambda = cfg.lambda.values[0];

    for (int t = 1; t <= cfg.max_iters; ++t) {
        const double lam = cfg.lambda.at(t);
        AssignmentState next = hard_step(g, state, lam, cfg.w);
        check_state_finite(g, next, t);
        const double delta = sup_diff(next, state);
        const BestAssignment ba = best_assignment(next);
        const ConsensusReport cons = check_consensus(g, state, ba.x, lam, cfg.w);

        HardTraceRow row;
        row.iter = t;
        row.delta = delta;
        row.x_tilde = ba.x;
        row.consensus = cons.overall;
        row.best_value = global_utility(g, ba.x);
        res.trace.push_back(std::move(row));

        res.best = ba;
        res.final_consensus = cons.overall;
        state = std::move(next);
        res.iterations = t;
        if (delta < cfg.tol) {
            res.converged = true;
            break;
        }
    }

    for (std::size_t t = 1; t < res.trace.size(); ++t) {
        if (res.trace[t - 1].delta > 0.0) {
            res.contraction_ratios.push_back(res.trace[t].delta / res.trace[t - 1].delta);
        }
    }

    res.final_state = std::move(state);
    return res;
}

GlobalAuditReport consensus_is_global_check(const Game& g, const HardResult& result) {
    if (!result.converged) {
        throw StateError("consensus_is_global_check requires a converged result");
    }
    if (!result.constant_lambda.has_value() || !(*result.constant_lambda < 1.0)) {
        throw StateError("consensus_is_global_check requires a constant lambda below 1");
    }

    GlobalAuditReport rep;
    rep.consensus = result.final_consensus;
    rep.best = result.best.x;
    rep.value_at_best = global_utility(g, result.best.x);
    if (!rep.consensus) return rep;

    rep.pure_nash = oracle::is_pure_nash(g, result.best.x);
    const oracle::GlobalOptimum opt = oracle::global_optimum(g);
    rep.global_value = opt.value;
    bool attains = false;
    for (const auto& x : opt.argmax) {
        if (x == result.best.x) {
            attains = true;
            break;
        }
    }
    rep.global_optimum = attains;
    return rep;
}

}  // namespace coopeq
