#include "coopeq/soft_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coopeq/errors.hpp"
#include "coopeq/parallel.hpp"

namespace coopeq {

void SoftConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("alpha must be a positive real");
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw ConfigError("hbar must be a positive real");
    }
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
}

AssignmentState soft_step(const Game& g, const StrategyProfile& prev, double hbar) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw ConfigError("hbar must be a positive real");
    }
    validate_profile(g, prev);
    const int n = g.num_agents();

    std::vector<std::vector<double>> logp(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto& pv = prev.probs[static_cast<std::size_t>(j)];
        auto& lv = logp[static_cast<std::size_t>(j)];
        lv.reserve(pv.size());
        for (double q : pv) lv.push_back(std::log(q));
    }

    AssignmentState out;
    out.domain = StateDomain::Log;
    out.values.assign(static_cast<std::size_t>(n), {});

    parallel_for(n, [&](int i) {
        const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
        const int k = static_cast<int>(sub.scope.size());
        int pos_i = 0;
        std::vector<int> dims(static_cast<std::size_t>(k));
        for (int p = 0; p < k; ++p) {
            const int v = sub.scope[static_cast<std::size_t>(p)];
            dims[static_cast<std::size_t>(p)] = g.action_counts[static_cast<std::size_t>(v)];
            if (v == i) pos_i = p;
        }

        const int mi = g.num_actions(i);
        std::vector<double> row(static_cast<std::size_t>(mi));
        std::vector<int> xs(static_cast<std::size_t>(k));
        for (int a = 0; a < mi; ++a) {
            std::fill(xs.begin(), xs.end(), 0);
            xs[static_cast<std::size_t>(pos_i)] = a;
            LogSumExp acc;
            do {
                double term = sub.table[static_cast<std::size_t>(flat_index(dims, xs))] / hbar;
                for (int p = 0; p < k; ++p) {
                    if (p == pos_i) continue;
                    term += logp[static_cast<std::size_t>(sub.scope[static_cast<std::size_t>(p)])]
                                [static_cast<std::size_t>(xs[static_cast<std::size_t>(p)])];
                }
                acc.add(term);
            } while (next_assignment_skip(xs, dims, pos_i));
            row[static_cast<std::size_t>(a)] = acc.value();
        }
        out.values[static_cast<std::size_t>(i)] = std::move(row);
    });

    return out;
}

StrategyProfile to_strategy(const AssignmentState& state, double alpha) {
    if (state.domain != StateDomain::Log) {
        throw InputError("to_strategy expects a log-domain state");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw InputError("alpha must be finite and nonnegative");
    }
    StrategyProfile out;
    out.probs.reserve(state.values.size());
    for (const auto& row : state.values) {
        LogSumExp acc;
        for (double v : row) acc.add(alpha * v);
        const double lse = acc.value();
        std::vector<double> p(row.size());
        for (std::size_t a = 0; a < row.size(); ++a) {
            p[a] = std::exp(alpha * row[a] - lse);
        }
        out.probs.push_back(std::move(p));
    }
    return out;
}

NashGap nash_gap(const AssignmentState& state, const StrategyProfile& profile) {
    if (state.domain != StateDomain::Log) {
        throw InputError("nash_gap expects a log-domain state");
    }
    if (state.values.size() != profile.probs.size()) {
        throw InputError("nash_gap: state and profile disagree on agent count");
    }
    NashGap out;
    out.per_agent.reserve(state.values.size());
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        const auto& row = state.values[i];
        const auto& p = profile.probs[i];
        if (row.size() != p.size()) {
            throw InputError("nash_gap: state and profile disagree on action count");
        }
        const double m = *std::max_element(row.begin(), row.end());
        double ratio = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) {
            ratio += std::exp(row[a] - m) * p[a];
        }
        const double gap = std::clamp(1.0 - ratio, 0.0, 1.0);
        out.per_agent.push_back(gap);
        out.max_gap = std::max(out.max_gap, gap);
    }
    return out;
}

double gap_bound(int num_actions, double alpha) {
    if (num_actions < 1) throw InputError("action count must be positive");
    if (!(alpha >= 1.0)) {
        throw ConfigError("the payoff-gap bound is only claimed for alpha >= 1");
    }
    return static_cast<double>(num_actions - 1) / (std::numbers::e * alpha);
}

bool gaps_within_bound(const Game& g, const std::vector<double>& gaps, double alpha) {
    for (int i = 0; i < g.num_agents(); ++i) {
        const double gap = gaps[static_cast<std::size_t>(i)];
        const int m = g.num_actions(i);
        if (m == 1) {
            if (gap > kProfileSumTol) return false;
        } else if (!(gap < gap_bound(m, alpha))) {
            return false;
        }
    }
    return true;
}

namespace {

std::vector<int> argmax_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<int> x(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        int best = 0;
        for (std::size_t a = 1; a < row.size(); ++a) {
            if (row[a] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
        }
        x[i] = best;
    }
    return x;
}

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

SoftResult run_soft(const Game& g, const SoftConfig& cfg) {
    cfg.validate();
    validate_game(g);

    StrategyProfile profile = (cfg.init == SoftInit::Uniform)
                                  ? uniform_profile(g)
                                  : random_profile(g, cfg.seed);

    SoftResult res;
    AssignmentState state;
    for (int t = 1; t <= cfg.max_iters; ++t) {
        state = soft_step(g, profile, cfg.hbar);
        check_state_finite(g, state, t);
        StrategyProfile next = to_strategy(state, cfg.alpha);
        const double delta = sup_diff(next, profile);
        const NashGap gaps = nash_gap(state, next);

        SoftTraceRow row;
        row.iter = t;
        row.max_delta = delta;
        row.gaps = gaps.per_agent;
        row.max_gap = gaps.max_gap;
        if (cfg.alpha >= 1.0) {
            double bmax = 0.0;
            for (int m : g.action_counts) bmax = std::max(bmax, gap_bound(m, cfg.alpha));
            row.bound_max = bmax;
            row.bound_ok = gaps_within_bound(g, gaps.per_agent, cfg.alpha);
        }
        row.x_tilde = argmax_rows(state.values);
        row.best_value = global_utility(g, row.x_tilde);
        res.trace.push_back(std::move(row));

        profile = std::move(next);
        res.iterations = t;
        if (delta < cfg.tol) {
            res.converged = true;
            break;
        }
    }

    res.final_state = std::move(state);
    res.final_profile = std::move(profile);
    return res;
}

FixedPointCheck verify_fixed_point(const Game& g, const AssignmentState& state,
                                   const SoftConfig& cfg, double tol) {
    validate_state(g, state, StateDomain::Log);
    const StrategyProfile p = to_strategy(state, cfg.alpha);
    const StrategyProfile p2 = to_strategy(soft_step(g, p, cfg.hbar), cfg.alpha);
    FixedPointCheck out;
    out.residual = sup_diff(p2, p);
    out.within_tol = out.residual <= tol;
    return out;
}

}  // namespace coopeq
