#pragma once

#include <cstdint>
#include <vector>

#include "coopeq/model.hpp"
#include "coopeq/propagation.hpp"

namespace coopeq::oracle {

// Brute-force reference implementations used to validate both engines.
// Everything here enumerates joint profiles exhaustively and shares no
// computational kernels with the engines: plain linear-domain sums, no
// log-sum-exp, no decoupling shortcuts.

inline constexpr std::int64_t kMaxOracleProfiles = 1'000'000;
// brute_psi works in the linear domain and is only meaningful while
// e^{E/hbar} stays comfortably inside a double.
inline constexpr double kMaxLogScale = 20.0;

struct NashEntry {
    std::vector<int> profile;
    // Minimum payoff loss over all unilateral deviations; +inf when no agent
    // has an alternative action.
    double margin = 0.0;
};

struct NashReport {
    std::vector<NashEntry> equilibria;
};

// Exact comparisons on the stored payoffs: x is a pure Nash equilibrium iff
// no unilateral deviation strictly gains.
bool is_pure_nash(const Game& g, const std::vector<int>& x);
NashReport enumerate_pure_nash(const Game& g);

struct GlobalOptimum {
    std::vector<std::vector<int>> argmax;  // full argmax set, enumeration order
    double value = 0.0;
};

GlobalOptimum global_optimum(const Game& g);

// Naive direct evaluation of the soft update in the linear domain.
AssignmentState brute_psi(const Game& g, const StrategyProfile& p, double hbar);

// Full enumeration of the hard update's inner max over all other variables,
// including the ones outside each sub-objective's scope. Per-profile sums
// accumulate in-scope terms first, then out-of-scope terms, each in ascending
// agent order -- the same reduction order as hard_step, which is what makes
// the two bit-identical.
AssignmentState brute_hard_step(const Game& g, const AssignmentState& state, double lambda,
                                const PropagationMatrix& W);

struct EpsilonNashReport {
    std::vector<double> relative_regret;  // (best response - expected) / best response
    std::vector<bool> ok;
    bool all_ok = false;
};

// Checks that no agent's best pure response in expected exponentiated payoff
// beats its expected payoff by more than epsilon, relative to the best
// response.
EpsilonNashReport epsilon_nash_check(const Game& g, const StrategyProfile& p, double hbar,
                                     double epsilon);

}  // namespace coopeq::oracle
