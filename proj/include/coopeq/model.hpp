#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace coopeq {

// Per-table cell cap, enforced when games are constructed or loaded.
inline constexpr std::int64_t kMaxTableCells = 10'000'000;

// Tolerance on per-agent strategy normalization.
inline constexpr double kProfileSumTol = 1e-12;

enum class GameFlavor { NormalForm, Factored };

// One agent's payoff table. `scope` lists the variables the table depends on
// (0-based, strictly ascending, always containing the owner). `table` is dense
// over joint assignments of the scope, lexicographic with the lowest-numbered
// variable slowest-varying.
struct SubObjective {
    int owner = 0;
    std::vector<int> scope;
    std::vector<double> table;

    bool operator==(const SubObjective&) const = default;
};

// An n-agent game, either a dense normal form (every table spans the full
// joint space) or a factored objective (per-agent tables on sub-scopes whose
// sum is the global utility). Immutable after construction by convention;
// build through the make_* constructors below, which validate.
struct Game {
    GameFlavor flavor = GameFlavor::NormalForm;
    std::vector<int> action_counts;
    std::vector<SubObjective> subs;  // one per agent, subs[i].owner == i
    std::vector<std::string> player_names;                 // optional metadata
    std::vector<std::vector<std::string>> action_labels;   // optional metadata

    int num_agents() const { return static_cast<int>(action_counts.size()); }
    int num_actions(int i) const { return action_counts[static_cast<std::size_t>(i)]; }
    // Saturates at int64 max instead of overflowing.
    std::int64_t joint_count() const;

    bool operator==(const Game&) const = default;
};

Game make_normal_form(std::vector<int> action_counts,
                      std::vector<std::vector<double>> payoffs);
Game make_factored(std::vector<int> action_counts, std::vector<SubObjective> subs);
// Convenience split of one shared table E into n equal parts E/n on full scopes.
Game make_shared_objective(std::vector<int> action_counts, std::vector<double> table);

void validate_game(const Game& g);

// One probability distribution per agent over its actions.
struct StrategyProfile {
    std::vector<std::vector<double>> probs;
    bool operator==(const StrategyProfile&) const = default;
};

enum class StateDomain { Log, Linear };

// Per-agent per-action value table. The soft engine stores log(psi), the hard
// engine stores psi directly; the tag keeps the two from being mixed up.
struct AssignmentState {
    StateDomain domain = StateDomain::Linear;
    std::vector<std::vector<double>> values;
};

// ---- index layout helpers ----
//
// Flat layout for a table over dims (m_0, m_1, ..): lexicographic with the
// first listed variable slowest-varying, so for a 2x2 table the cells are
// (0,0), (0,1), (1,0), (1,1).

std::int64_t flat_index(const std::vector<int>& dims, const std::vector<int>& assignment);
// Odometer step in the layout above; returns false when the last assignment
// wraps back to all-zero.
bool next_assignment(std::vector<int>& x, const std::vector<int>& dims);
// Same, holding position `skip` fixed.
bool next_assignment_skip(std::vector<int>& x, const std::vector<int>& dims, int skip);

// ---- operations ----

// Sum of all agents' payoffs at a joint pure assignment, accumulated in agent
// order (fixed so the value is reproducible).
double global_utility(const Game& g, const std::vector<int>& x);
double agent_payoff(const Game& g, int i, const std::vector<int>& x);

struct ExpectedPayoff {
    double log_value = 0.0;
    bool linear_safe = false;
    double linear_value = 0.0;  // exp(log_value); overflows to +inf when not safe
};

// Expected exponentiated payoff sum_x e^{E_i(x)/hbar} prod_j p_j(x_j),
// computed in log domain; the linear form is exposed when it fits a double.
ExpectedPayoff expected_agent_payoff(const Game& g, int i, const StrategyProfile& p,
                                     double hbar);

StrategyProfile uniform_profile(const Game& g);
// Interior-of-simplex sample (Dirichlet(1)); deterministic given the seed.
StrategyProfile random_profile(const Game& g, std::uint64_t seed);

void validate_profile(const Game& g, const StrategyProfile& p);
void validate_state(const Game& g, const AssignmentState& s, StateDomain expected);

AssignmentState zero_state(const Game& g);
AssignmentState random_state(const Game& g, std::uint64_t seed, double range);

double sup_diff(const StrategyProfile& a, const StrategyProfile& b);
double sup_diff(const AssignmentState& a, const AssignmentState& b);

// Streaming log-sum-exp with a running maximum. -inf terms are no-ops; an
// empty reduction yields -inf.
struct LogSumExp {
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    void add(double t);
    double value() const;
};

}  // namespace coopeq
