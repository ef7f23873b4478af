#include "coopeq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopeq/errors.hpp"

namespace coopeq::oracle {

namespace {

void check_enumeration_cap(const Game& g) {
    if (g.joint_count() > kMaxOracleProfiles) {
        throw CapacityError("game has " + std::to_string(g.joint_count()) +
                            " joint profiles, oracle cap is " +
                            std::to_string(kMaxOracleProfiles));
    }
}

void check_scale(const Game& g, double hbar) {
    for (const SubObjective& sub : g.subs) {
        for (double v : sub.table) {
            if (std::abs(v) / hbar > kMaxLogScale) {
                throw CapacityError("payoff scale |E|/hbar exceeds " +
                                    std::to_string(kMaxLogScale) +
                                    "; the linear-domain oracle would lose accuracy");
            }
        }
    }
}

}  // namespace

bool is_pure_nash(const Game& g, const std::vector<int>& x) {
    std::vector<int> dev = x;
    for (int i = 0; i < g.num_agents(); ++i) {
        const double base = agent_payoff(g, i, x);
        for (int a = 0; a < g.num_actions(i); ++a) {
            if (a == x[static_cast<std::size_t>(i)]) continue;
            dev[static_cast<std::size_t>(i)] = a;
            if (agent_payoff(g, i, dev) > base) return false;
        }
        dev[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    }
    return true;
}

NashReport enumerate_pure_nash(const Game& g) {
    validate_game(g);
    check_enumeration_cap(g);

    NashReport rep;
    std::vector<int> x(static_cast<std::size_t>(g.num_agents()), 0);
    std::vector<int> dev;
    do {
        bool nash = true;
        double margin = std::numeric_limits<double>::infinity();
        dev = x;
        for (int i = 0; i < g.num_agents() && nash; ++i) {
            const double base = agent_payoff(g, i, x);
            for (int a = 0; a < g.num_actions(i); ++a) {
                if (a == x[static_cast<std::size_t>(i)]) continue;
                dev[static_cast<std::size_t>(i)] = a;
                const double loss = base - agent_payoff(g, i, dev);
                if (loss < 0.0) {
                    nash = false;
                    break;
                }
                margin = std::min(margin, loss);
            }
            dev[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        }
        if (nash) rep.equilibria.push_back(NashEntry{x, margin});
    } while (next_assignment(x, g.action_counts));
    return rep;
}

GlobalOptimum global_optimum(const Game& g) {
    validate_game(g);
    check_enumeration_cap(g);

    GlobalOptimum out;
    out.value = -std::numeric_limits<double>::infinity();
    std::vector<int> x(static_cast<std::size_t>(g.num_agents()), 0);
    do {
        double s = 0.0;
        for (int i = 0; i < g.num_agents(); ++i) s += agent_payoff(g, i, x);
        if (s > out.value) {
            out.value = s;
            out.argmax.clear();
            out.argmax.push_back(x);
        } else if (s == out.value) {
            out.argmax.push_back(x);
        }
    } while (next_assignment(x, g.action_counts));
    return out;
}

AssignmentState brute_psi(const Game& g, const StrategyProfile& p, double hbar) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw ConfigError("hbar must be a positive real");
    }
    validate_game(g);
    validate_profile(g, p);
    check_enumeration_cap(g);
    check_scale(g, hbar);
    const int n = g.num_agents();

    AssignmentState out;
    out.domain = StateDomain::Linear;
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(g.num_actions(i)), 0.0);
        for (int a = 0; a < g.num_actions(i); ++a) {
            double acc = 0.0;
            std::vector<int> x(static_cast<std::size_t>(n), 0);
            x[static_cast<std::size_t>(i)] = a;
            do {
                double term = std::exp(agent_payoff(g, i, x) / hbar);
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    term *= p.probs[static_cast<std::size_t>(j)]
                                   [static_cast<std::size_t>(x[static_cast<std::size_t>(j)])];
                }
                acc += term;
            } while (next_assignment_skip(x, g.action_counts, i));
            row[static_cast<std::size_t>(a)] = acc;
        }
        out.values.push_back(std::move(row));
    }
    return out;
}

AssignmentState brute_hard_step(const Game& g, const AssignmentState& state, double lambda,
                                const PropagationMatrix& W) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("lambda must be finite and nonnegative");
    }
    validate_game(g);
    validate_state(g, state, StateDomain::Linear);
    if (W.n != g.num_agents()) {
        throw InputError("propagation matrix size does not match the agent count");
    }
    check_enumeration_cap(g);
    const int n = g.num_agents();

    AssignmentState out;
    out.domain = StateDomain::Linear;
    for (int i = 0; i < n; ++i) {
        const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
        std::vector<char> in_scope(static_cast<std::size_t>(n), 0);
        for (int v : sub.scope) in_scope[static_cast<std::size_t>(v)] = 1;

        std::vector<double> row(static_cast<std::size_t>(g.num_actions(i)), 0.0);
        for (int a = 0; a < g.num_actions(i); ++a) {
            double best = -std::numeric_limits<double>::infinity();
            std::vector<int> x(static_cast<std::size_t>(n), 0);
            x[static_cast<std::size_t>(i)] = a;
            do {
                double v = agent_payoff(g, i, x);
                for (int j = 0; j < n; ++j) {
                    if (j == i || !in_scope[static_cast<std::size_t>(j)]) continue;
                    v += (lambda * W.at(i, j)) *
                         state.values[static_cast<std::size_t>(j)]
                                     [static_cast<std::size_t>(x[static_cast<std::size_t>(j)])];
                }
                for (int j = 0; j < n; ++j) {
                    if (j == i || in_scope[static_cast<std::size_t>(j)]) continue;
                    v += (lambda * W.at(i, j)) *
                         state.values[static_cast<std::size_t>(j)]
                                     [static_cast<std::size_t>(x[static_cast<std::size_t>(j)])];
                }
                best = std::max(best, v);
            } while (next_assignment_skip(x, g.action_counts, i));
            row[static_cast<std::size_t>(a)] = best;
        }
        out.values.push_back(std::move(row));
    }
    return out;
}

EpsilonNashReport epsilon_nash_check(const Game& g, const StrategyProfile& p, double hbar,
                                     double epsilon) {
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
    const AssignmentState psi = brute_psi(g, p, hbar);

    EpsilonNashReport rep;
    rep.all_ok = true;
    for (int i = 0; i < g.num_agents(); ++i) {
        const auto& row = psi.values[static_cast<std::size_t>(i)];
        const auto& pi = p.probs[static_cast<std::size_t>(i)];
        const double best = *std::max_element(row.begin(), row.end());
        double expected = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) expected += row[a] * pi[a];
        const double regret = (best - expected) / best;
        const bool ok = regret <= epsilon;
        rep.relative_regret.push_back(regret);
        rep.ok.push_back(ok);
        rep.all_ok = rep.all_ok && ok;
    }
    return rep;
}

}  // namespace coopeq::oracle
