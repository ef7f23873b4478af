#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopeq/model.hpp"
#include "coopeq/propagation.hpp"

namespace coopeq {

// Tolerance for argmax-set membership in consensus detection; exact equality
// is meaningless after iterated arithmetic.
inline constexpr double kConsensusTieTol = 1e-9;

// Cooperation strength per iteration. A single value is the constant schedule
// (the convergence regime, 0 <= lambda < 1); longer sequences are accepted as
// experimental and clamp to their last entry.
struct LambdaSchedule {
    std::vector<double> values;

    static LambdaSchedule constant(double lam) { return {{lam}}; }
    static LambdaSchedule sequence(std::vector<double> vals) { return {std::move(vals)}; }

    bool is_constant() const { return values.size() == 1; }
    double at(int iter) const;  // iter is 1-based
    void validate() const;      // throws ConfigError
};

enum class HardInit { Zero, RandomSeeded };

struct HardConfig {
    LambdaSchedule lambda = LambdaSchedule::constant(0.5);
    PropagationMatrix w;
    double tol = 1e-9;  // sup-norm stopping threshold on psi change
    int max_iters = 10000;
    HardInit init = HardInit::Zero;
    std::uint64_t seed = 0;
    double init_range = 1.0;

    void validate(int num_agents) const;  // throws ConfigError
};

// One synchronous max-sum update:
//
//   psi_i(x_i) = max over the other variables of
//                E_i(x) + lambda * sum_{j != i} w_ij psi_j(x_j)
//
// For j outside E_i's scope the inner max decouples to the constant
// lambda * w_ij * max_a psi_j(a), added after the in-scope terms. Terms are
// accumulated in ascending agent order so results are bit-reproducible.
AssignmentState hard_step(const Game& g, const AssignmentState& prev, double lambda,
                          const PropagationMatrix& W);

struct BestAssignment {
    std::vector<int> x;      // per-agent argmax of psi, ties to the lowest index
    std::vector<bool> tie;   // per-agent flag: another action attains the max exactly
    bool any_tie = false;
};

BestAssignment best_assignment(const AssignmentState& state);

struct ConsensusReport {
    std::vector<bool> per_agent;
    bool overall = false;
};

// Tests, for each agent i, whether x_tilde restricted to E_i's scope lies in
// the argmax set of E_i(x) + lambda * sum_{j != i, j in scope} w_ij psi_j(x_j)
// over joint assignments of the scope (within kConsensusTieTol). Variables
// outside the scope impose no constraint. psi here is the state of the
// previous iteration.
ConsensusReport check_consensus(const Game& g, const AssignmentState& state_prev,
                                const std::vector<int>& x_tilde, double lambda,
                                const PropagationMatrix& W);

struct HardTraceRow {
    int iter = 0;
    double delta = 0.0;  // sup-norm psi change
    std::vector<int> x_tilde;
    bool consensus = false;
    double best_value = 0.0;  // global utility at x_tilde
};

struct HardResult {
    AssignmentState final_state;  // linear domain
    BestAssignment best;
    bool final_consensus = false;
    std::vector<HardTraceRow> trace;
    std::vector<double> contraction_ratios;  // delta(t+1)/delta(t) where defined
    double contraction_bound = 0.0;          // contraction_modulus(W, max lambda)
    std::optional<double> constant_lambda;   // set for constant schedules
    bool converged = false;
    int iterations = 0;
};

// Iterates hard_step until the sup-norm psi change drops below tol or
// max_iters runs out, recording best assignments, consensus flags and
// empirical contraction ratios along the way.
HardResult run_hard(const Game& g, const HardConfig& cfg);

struct GlobalAuditReport {
    bool consensus = false;
    std::optional<bool> pure_nash;        // set when consensus holds
    std::optional<bool> global_optimum;   // set when consensus holds
    std::vector<int> best;
    double value_at_best = 0.0;
    std::optional<double> global_value;
};

// For a converged constant-lambda run whose final iteration reached
// consensus, asks the brute-force oracle whether the best assignment is a
// pure Nash equilibrium and whether it attains the enumerated global maximum
// of the summed payoffs. Throws StateError on non-converged results or
// non-constant schedules.
GlobalAuditReport consensus_is_global_check(const Game& g, const HardResult& result);

}  // namespace coopeq
