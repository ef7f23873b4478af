#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopeq/model.hpp"

namespace coopeq {

enum class SoftInit { Uniform, RandomSeeded };

struct SoftConfig {
    double alpha = 1.0;  // selfishness exponent, > 0
    double hbar = 1.0;   // temperature, > 0
    double tol = 1e-10;  // sup-norm stopping threshold on strategy change
    int max_iters = 10000;
    SoftInit init = SoftInit::Uniform;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

// One synchronous update of every agent's assignment state from the previous
// strategy profile:
//
//   log psi_i(a) = logsumexp over joint x with x_i = a of
//                  E_i(x)/hbar + sum_{j != i} log p_j(x_j)
//
// All arithmetic stays in log domain (e^{E/hbar} overflows for small hbar and
// only normalized psi matters downstream). Out-of-scope variables of a
// factored sub-objective marginalize to probability one and drop out. The
// reduction order is fixed (lexicographic), so results are deterministic and
// independent of the parallel schedule.
AssignmentState soft_step(const Game& g, const StrategyProfile& prev, double hbar);

// p_i(a) = psi_i(a)^alpha, normalized per agent. alpha = 0 is accepted as an
// explicit diagnostic (uniform output); the iteration itself requires
// alpha > 0.
StrategyProfile to_strategy(const AssignmentState& state, double alpha);

struct NashGap {
    std::vector<double> per_agent;  // each in [0, 1]
    double max_gap = 0.0;
};

// Relative best-minus-expected payoff per agent,
// 1 - (sum_a psi_i(a) p_i(a)) / max_a psi_i(a), computed stably in log domain.
// Zero for an agent means its best payoff equals its expected payoff.
NashGap nash_gap(const AssignmentState& state, const StrategyProfile& profile);

// (m_i - 1) / (e * alpha): bound on the relative gap, valid for alpha >= 1.
double gap_bound(int num_actions, double alpha);

// True when every agent's gap is inside its bound (single-action agents must
// sit at zero gap; the bound is strict otherwise).
bool gaps_within_bound(const Game& g, const std::vector<double>& gaps, double alpha);

struct SoftTraceRow {
    int iter = 0;
    double max_delta = 0.0;         // sup-norm strategy change this iteration
    std::vector<double> gaps;       // per-agent nash gap at this iteration
    double max_gap = 0.0;
    std::optional<double> bound_max;  // max_i gap_bound(m_i, alpha); alpha >= 1 only
    std::optional<bool> bound_ok;
    std::vector<int> x_tilde;       // per-agent argmax of psi, ties to lowest
    double best_value = 0.0;        // global utility at x_tilde
};

struct SoftResult {
    AssignmentState final_state;    // log domain
    StrategyProfile final_profile;
    std::vector<SoftTraceRow> trace;
    bool converged = false;
    int iterations = 0;
};

// Iterates soft_step / to_strategy from the configured initial profile until
// the sup-norm strategy change drops below tol or max_iters runs out.
// Convergence is declared on strategy change, not raw psi change, because
// psi's scale drifts multiplicatively while the dynamics factor through the
// normalized quantities.
SoftResult run_soft(const Game& g, const SoftConfig& cfg);

struct FixedPointCheck {
    double residual = 0.0;
    bool within_tol = false;
};

// Sup-norm residual between the state's strategy and the strategy after one
// more soft_step, measured in normalized (strategy) space. A residual within
// tol certifies an approximate fixed point.
FixedPointCheck verify_fixed_point(const Game& g, const AssignmentState& state,
                                   const SoftConfig& cfg, double tol);

}  // namespace coopeq
