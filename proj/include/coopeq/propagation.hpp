#pragma once

#include <string>
#include <vector>

namespace coopeq {

inline constexpr double kColumnSumTol = 1e-12;

// n x n nonnegative weight matrix routing assignment functions between
// agents. Column j says how agent j's state is weighted by the others;
// columns of a valid matrix sum to 1.
struct PropagationMatrix {
    int n = 0;
    std::vector<double> w;  // row-major, w[i*n + j] = w_ij

    double at(int i, int j) const {
        return w[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)];
    }

    bool operator==(const PropagationMatrix&) const = default;
};

// w_ij = 1/n everywhere. Column- and row-stochastic, irreducible and aperiodic
// for every n >= 1; the default choice.
PropagationMatrix make_uniform_w(int n);
// No self-weight: w_ij = 1/(n-1) off the diagonal. Periodic for n = 2.
PropagationMatrix make_offdiagonal_w(int n);

// Shape-checking constructors; stochasticity verdicts come from validate_w.
PropagationMatrix w_from_rows(const std::vector<std::vector<double>>& rows);
PropagationMatrix w_from_flat(int n, std::vector<double> flat);

struct ValidationReport {
    bool nonnegative = false;
    bool column_stochastic = false;
    bool irreducible = false;
    bool aperiodic = false;
    std::vector<std::string> failures;  // one line per failed check

    // Nonnegativity, column-stochasticity and irreducibility are hard
    // requirements; aperiodicity is a warning unless strict mode asks for it.
    bool hard_ok() const { return nonnegative && column_stochastic && irreducible; }
    bool all_ok() const { return hard_ok() && aperiodic; }
};

// Irreducibility is strong connectivity of the graph with edge j -> i when
// w_ij > 0; aperiodicity is gcd 1 of directed cycle lengths, computed from
// BFS level differences per strongly connected component.
ValidationReport validate_w(const PropagationMatrix& W);

// Throws ConfigError unless W is nonnegative with unit column sums.
void require_stochastic(const PropagationMatrix& W);

// Upper bound lambda * max_i sum_{j != i} w_ij on the hard-engine sup-norm
// contraction factor; a value < 1 certifies contraction.
double contraction_modulus(const PropagationMatrix& W, double lambda);

}  // namespace coopeq
