#include "coopeq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopeq/errors.hpp"
#include "coopeq/rng.hpp"

namespace coopeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string agent_tag(int i) { return "agent " + std::to_string(i + 1); }

std::int64_t checked_cell_count(const std::vector<int>& dims) {
    std::int64_t p = 1;
    for (int m : dims) {
        if (m < 1) throw InputError("action counts must be positive");
        if (p > kMaxTableCells / m) {
            throw CapacityError("payoff table exceeds the cell cap of " +
                                std::to_string(kMaxTableCells));
        }
        p *= m;
    }
    return p;
}

void check_finite_table(const std::vector<double>& table, int owner) {
    for (double v : table) {
        if (!std::isfinite(v)) {
            throw InputError("non-finite payoff entry in table of " + agent_tag(owner));
        }
    }
}

}  // namespace

std::int64_t Game::joint_count() const {
    std::int64_t p = 1;
    for (int m : action_counts) {
        if (p > std::numeric_limits<std::int64_t>::max() / m) {
            return std::numeric_limits<std::int64_t>::max();
        }
        p *= m;
    }
    return p;
}

void validate_game(const Game& g) {
    const int n = g.num_agents();
    if (n < 1) throw InputError("game must have at least one agent");
    for (int m : g.action_counts) {
        if (m < 1) throw InputError("every agent needs at least one action");
    }
    if (static_cast<int>(g.subs.size()) != n) {
        throw InputError("expected one sub-objective per agent");
    }
    for (int i = 0; i < n; ++i) {
        const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
        if (sub.owner != i) throw InputError("sub-objectives must be stored in owner order");
        if (sub.scope.empty()) throw InputError("empty scope for " + agent_tag(i));
        int prev = -1;
        bool has_owner = false;
        std::vector<int> dims;
        dims.reserve(sub.scope.size());
        for (int v : sub.scope) {
            if (v < 0 || v >= n) throw InputError("scope index out of range for " + agent_tag(i));
            if (v <= prev) throw InputError("scope must be strictly ascending for " + agent_tag(i));
            prev = v;
            if (v == i) has_owner = true;
            dims.push_back(g.action_counts[static_cast<std::size_t>(v)]);
        }
        if (!has_owner) throw InputError("scope must contain the owner for " + agent_tag(i));
        const std::int64_t cells = checked_cell_count(dims);
        if (static_cast<std::int64_t>(sub.table.size()) != cells) {
            throw InputError("table of " + agent_tag(i) + " has " +
                             std::to_string(sub.table.size()) + " entries, expected " +
                             std::to_string(cells));
        }
        check_finite_table(sub.table, i);
        if (g.flavor == GameFlavor::NormalForm &&
            static_cast<int>(sub.scope.size()) != n) {
            throw InputError("normal-form tables must span the full joint space");
        }
    }
}

Game make_normal_form(std::vector<int> action_counts,
                      std::vector<std::vector<double>> payoffs) {
    Game g;
    g.flavor = GameFlavor::NormalForm;
    g.action_counts = std::move(action_counts);
    const int n = g.num_agents();
    if (n < 1) throw InputError("game must have at least one agent");
    checked_cell_count(g.action_counts);  // cap before touching tables
    if (static_cast<int>(payoffs.size()) != n) {
        throw InputError("expected one payoff table per agent");
    }
    std::vector<int> full(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) full[static_cast<std::size_t>(j)] = j;
    g.subs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g.subs.push_back(SubObjective{i, full, std::move(payoffs[static_cast<std::size_t>(i)])});
    }
    validate_game(g);
    return g;
}

Game make_factored(std::vector<int> action_counts, std::vector<SubObjective> subs) {
    Game g;
    g.flavor = GameFlavor::Factored;
    g.action_counts = std::move(action_counts);
    std::sort(subs.begin(), subs.end(),
              [](const SubObjective& a, const SubObjective& b) { return a.owner < b.owner; });
    g.subs = std::move(subs);
    validate_game(g);
    return g;
}

Game make_shared_objective(std::vector<int> action_counts, std::vector<double> table) {
    const int n = static_cast<int>(action_counts.size());
    if (n < 1) throw InputError("game must have at least one agent");
    for (double& v : table) v /= static_cast<double>(n);
    std::vector<int> full(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) full[static_cast<std::size_t>(j)] = j;
    std::vector<SubObjective> subs;
    subs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) subs.push_back(SubObjective{i, full, table});
    Game g;
    g.flavor = GameFlavor::Factored;
    g.action_counts = std::move(action_counts);
    g.subs = std::move(subs);
    validate_game(g);
    return g;
}

std::int64_t flat_index(const std::vector<int>& dims, const std::vector<int>& assignment) {
    std::int64_t idx = 0;
    for (std::size_t p = 0; p < dims.size(); ++p) {
        idx = idx * dims[p] + assignment[p];
    }
    return idx;
}

bool next_assignment(std::vector<int>& x, const std::vector<int>& dims) {
    for (int p = static_cast<int>(x.size()) - 1; p >= 0; --p) {
        if (++x[static_cast<std::size_t>(p)] < dims[static_cast<std::size_t>(p)]) return true;
        x[static_cast<std::size_t>(p)] = 0;
    }
    return false;
}

bool next_assignment_skip(std::vector<int>& x, const std::vector<int>& dims, int skip) {
    for (int p = static_cast<int>(x.size()) - 1; p >= 0; --p) {
        if (p == skip) continue;
        if (++x[static_cast<std::size_t>(p)] < dims[static_cast<std::size_t>(p)]) return true;
        x[static_cast<std::size_t>(p)] = 0;
    }
    return false;
}

namespace {

void check_assignment(const Game& g, const std::vector<int>& x) {
    if (static_cast<int>(x.size()) != g.num_agents()) {
        throw InputError("assignment has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(g.num_agents()));
    }
    for (int j = 0; j < g.num_agents(); ++j) {
        const int v = x[static_cast<std::size_t>(j)];
        if (v < 0 || v >= g.num_actions(j)) {
            throw InputError("action index out of range for " + agent_tag(j));
        }
    }
}

// Table lookup on the agent's scope; assignment already validated.
double payoff_unchecked(const Game& g, int i, const std::vector<int>& x) {
    const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
    std::int64_t idx = 0;
    for (int v : sub.scope) {
        idx = idx * g.action_counts[static_cast<std::size_t>(v)] + x[static_cast<std::size_t>(v)];
    }
    return sub.table[static_cast<std::size_t>(idx)];
}

}  // namespace

double global_utility(const Game& g, const std::vector<int>& x) {
    check_assignment(g, x);
    double s = 0.0;
    for (int i = 0; i < g.num_agents(); ++i) s += payoff_unchecked(g, i, x);
    return s;
}

double agent_payoff(const Game& g, int i, const std::vector<int>& x) {
    if (i < 0 || i >= g.num_agents()) throw InputError("agent index out of range");
    check_assignment(g, x);
    return payoff_unchecked(g, i, x);
}

ExpectedPayoff expected_agent_payoff(const Game& g, int i, const StrategyProfile& p,
                                     double hbar) {
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    if (i < 0 || i >= g.num_agents()) throw InputError("agent index out of range");
    validate_profile(g, p);

    const SubObjective& sub = g.subs[static_cast<std::size_t>(i)];
    std::vector<int> dims;
    dims.reserve(sub.scope.size());
    for (int v : sub.scope) dims.push_back(g.action_counts[static_cast<std::size_t>(v)]);

    // log p per scope variable; zero entries become -inf terms that the
    // log-sum-exp reduction drops.
    std::vector<std::vector<double>> logp(sub.scope.size());
    for (std::size_t k = 0; k < sub.scope.size(); ++k) {
        const auto& pv = p.probs[static_cast<std::size_t>(sub.scope[k])];
        logp[k].reserve(pv.size());
        for (double q : pv) logp[k].push_back(std::log(q));
    }

    LogSumExp acc;
    std::vector<int> xs(sub.scope.size(), 0);
    do {
        double term = sub.table[static_cast<std::size_t>(flat_index(dims, xs))] / hbar;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            term += logp[k][static_cast<std::size_t>(xs[static_cast<std::size_t>(k)])];
        }
        acc.add(term);
    } while (next_assignment(xs, dims));

    // Variables outside the scope contribute their total mass, which is one
    // up to rounding.
    double out_log = 0.0;
    std::size_t next_scope = 0;
    for (int j = 0; j < g.num_agents(); ++j) {
        if (next_scope < sub.scope.size() && sub.scope[next_scope] == j) {
            ++next_scope;
            continue;
        }
        double s = 0.0;
        for (double q : p.probs[static_cast<std::size_t>(j)]) s += q;
        out_log += std::log(s);
    }

    ExpectedPayoff out;
    out.log_value = acc.value() + out_log;
    out.linear_safe = std::abs(out.log_value) < 700.0;
    out.linear_value = std::exp(out.log_value);
    return out;
}

StrategyProfile uniform_profile(const Game& g) {
    validate_game(g);
    StrategyProfile p;
    p.probs.reserve(static_cast<std::size_t>(g.num_agents()));
    for (int m : g.action_counts) {
        p.probs.emplace_back(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));
    }
    return p;
}

StrategyProfile random_profile(const Game& g, std::uint64_t seed) {
    validate_game(g);
    Rng rng(seed);
    StrategyProfile p;
    p.probs.reserve(static_cast<std::size_t>(g.num_agents()));
    for (int m : g.action_counts) {
        std::vector<double> v(static_cast<std::size_t>(m));
        double total = 0.0;
        for (double& e : v) {
            e = -std::log(rng.uniform01());  // Exponential(1) -> Dirichlet(1)
            total += e;
        }
        for (double& e : v) e /= total;
        p.probs.push_back(std::move(v));
    }
    return p;
}

void validate_profile(const Game& g, const StrategyProfile& p) {
    if (static_cast<int>(p.probs.size()) != g.num_agents()) {
        throw InputError("profile has " + std::to_string(p.probs.size()) +
                         " strategies, expected " + std::to_string(g.num_agents()));
    }
    for (int j = 0; j < g.num_agents(); ++j) {
        const auto& v = p.probs[static_cast<std::size_t>(j)];
        if (static_cast<int>(v.size()) != g.num_actions(j)) {
            throw InputError("strategy length mismatch for " + agent_tag(j));
        }
        // Kahan summation: the invariant is about the true sum, and a naive
        // float sum drifts past the tolerance around 1e5 actions.
        double sum = 0.0;
        double comp = 0.0;
        double maxv = 0.0;
        for (double q : v) {
            if (!std::isfinite(q) || q < 0.0) {
                throw InputError("strategy of " + agent_tag(j) +
                                 " has a negative or non-finite entry");
            }
            const double y = q - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            maxv = std::max(maxv, q);
        }
        if (maxv == 0.0) {
            throw InputError("strategy of " + agent_tag(j) + " is identically zero");
        }
        if (std::abs(sum - 1.0) > kProfileSumTol) {
            throw InputError("strategy of " + agent_tag(j) + " sums to " + std::to_string(sum) +
                             ", expected 1");
        }
    }
}

void validate_state(const Game& g, const AssignmentState& s, StateDomain expected) {
    if (s.domain != expected) {
        throw InputError(expected == StateDomain::Log
                             ? "expected a log-domain assignment state"
                             : "expected a linear-domain assignment state");
    }
    if (static_cast<int>(s.values.size()) != g.num_agents()) {
        throw InputError("state has " + std::to_string(s.values.size()) +
                         " rows, expected " + std::to_string(g.num_agents()));
    }
    for (int j = 0; j < g.num_agents(); ++j) {
        const auto& v = s.values[static_cast<std::size_t>(j)];
        if (static_cast<int>(v.size()) != g.num_actions(j)) {
            throw InputError("state length mismatch for " + agent_tag(j));
        }
        for (double q : v) {
            if (!std::isfinite(q)) {
                throw InputError("state of " + agent_tag(j) + " has a non-finite entry");
            }
        }
    }
}

AssignmentState zero_state(const Game& g) {
    AssignmentState s;
    s.domain = StateDomain::Linear;
    s.values.reserve(static_cast<std::size_t>(g.num_agents()));
    for (int m : g.action_counts) s.values.emplace_back(static_cast<std::size_t>(m), 0.0);
    return s;
}

AssignmentState random_state(const Game& g, std::uint64_t seed, double range) {
    if (!(range >= 0.0) || !std::isfinite(range)) {
        throw ConfigError("init range must be finite and nonnegative");
    }
    Rng rng(seed);
    AssignmentState s;
    s.domain = StateDomain::Linear;
    s.values.reserve(static_cast<std::size_t>(g.num_agents()));
    for (int m : g.action_counts) {
        std::vector<double> v(static_cast<std::size_t>(m));
        for (double& e : v) e = rng.uniform(-range, range);
        s.values.push_back(std::move(v));
    }
    return s;
}

namespace {

double sup_diff_tables(const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b) {
    if (a.size() != b.size()) throw InputError("sup_diff: mismatched agent counts");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) throw InputError("sup_diff: mismatched action counts");
        for (std::size_t k = 0; k < a[i].size(); ++k) {
            d = std::max(d, std::abs(a[i][k] - b[i][k]));
        }
    }
    return d;
}

}  // namespace

double sup_diff(const StrategyProfile& a, const StrategyProfile& b) {
    return sup_diff_tables(a.probs, b.probs);
}

double sup_diff(const AssignmentState& a, const AssignmentState& b) {
    if (a.domain != b.domain) throw InputError("sup_diff: mismatched state domains");
    return sup_diff_tables(a.values, b.values);
}

void LogSumExp::add(double t) {
    if (t == -kInf) return;
    if (t <= m) {
        s += std::exp(t - m);
    } else {
        s = s * std::exp(m - t) + 1.0;
        m = t;
    }
}

double LogSumExp::value() const {
    if (s == 0.0) return -kInf;
    return m + std::log(s);
}

}  // namespace coopeq
