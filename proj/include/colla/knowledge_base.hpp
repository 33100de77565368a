#pragma once

#include <span>

#include "colla/linalg.hpp"
#include "colla/sparse_coding.hpp"
#include "colla/task_model.hpp"

// Per-agent dictionary state. Each learned task contributes a Kronecker block
// (s s^T) (x) Gamma to a running normal-equation matrix A and vec(Gamma alpha
// s^T) to the right-hand side, so the local dictionary update is one SPD solve
// regardless of how many tasks were seen.

namespace colla {

// The knowledge base itself is just the d-by-u dictionary.
using KnowledgeBase = Matrix;

struct AccumulatorState {
  Matrix a;     // (d*u) x (d*u), symmetric PSD: sum_t (s s^T) (x) Gamma
  Vec b_core;   // d*u: sum_t vec(Gamma alpha s^T)
  int task_count = 0;
  std::size_t d = 0, u = 0;

  AccumulatorState() = default;
  AccumulatorState(std::size_t d_, std::size_t u_)
      : a(d_ * u_, d_ * u_), b_core(d_ * u_, 0.0), d(d_), u(u_) {}
};

// Consensus-side inputs to a local dictionary solve, built fresh each primal
// step by consensus_net. An all-zero summary with degree 0 recovers the
// single-agent (ELLA) update.
struct NeighborSummary {
  Matrix dual_aggregate;     // d x u: sum over incident edges of H_{l,i} Z_l
  Matrix neighbor_dict_sum;  // d x u: sum of neighbor dictionaries, freshest
  int degree = 0;

  static NeighborSummary none(std::size_t d, std::size_t u) {
    return NeighborSummary{Matrix(d, u), Matrix(d, u), 0};
  }
};

// A += (s s^T) (x) Gamma;  b_core += vec(Gamma alpha s^T);  task_count += 1.
// Called exactly once per learned task, outside any ADMM iteration.
void accumulate_task(AccumulatorState& acc, const SparseCode& code,
                     const TaskEncoding& enc);

// Closed-form local dictionary update:
//   mat_{d,u}( [ (rho/2 deg + lambda) I + (1/T) A ]^{-1}
//              [ (1/T) b_core + vec(-1/2 dual + rho/2 neighbor_sum) ] )
// T = task_count (the data terms vanish when no tasks have been seen).
KnowledgeBase solve_local_dictionary(const AccumulatorState& acc,
                                     const NeighborSummary& nbr, double rho,
                                     double lambda);

// Single-agent baseline path: rho = 0, empty neighbor summary.
KnowledgeBase ella_update(const AccumulatorState& acc, double lambda);

// Centralized solve over pooled accumulators: the dictionary minimizing
// (1/T_pool) sum_all ||alpha - L s||^2_Gamma + lambda ||L||_F^2. This is the
// consensus fixed point the distributed iteration converges to.
KnowledgeBase pooled_dictionary_solve(
    std::span<const AccumulatorState* const> accs, double lambda);

}  // namespace colla
