#include "colla/knowledge_base.hpp"

#include "colla/errors.hpp"

namespace colla {

void accumulate_task(AccumulatorState& acc, const SparseCode& code,
                     const TaskEncoding& enc) {
  require(code.s.size() == acc.u, Err::DimensionMismatch,
          "accumulate_task: code length != u");
  require(enc.alpha.size() == acc.d, Err::DimensionMismatch,
          "accumulate_task: alpha length != d");

  const std::size_t d = acc.d;
  const std::size_t du = d * acc.u;
  // A block (p, q) += s_p s_q Gamma. Only support columns contribute.
  for (int q : code.support) {
    for (int p : code.support) {
      const double w = code.s[static_cast<std::size_t>(p)] *
                       code.s[static_cast<std::size_t>(q)];
      double* block =
          acc.a.data() + (static_cast<std::size_t>(q) * d) * du +
          static_cast<std::size_t>(p) * d;
      for (std::size_t col = 0; col < d; ++col)
        kern::axpy(w, enc.gamma_mat.col(col), block + col * du, d);
    }
  }
  // b_core += vec(Gamma alpha s^T): column q gets s_q * (Gamma alpha)
  const Vec ga = matvec(enc.gamma_mat, enc.alpha);
  for (int q : code.support)
    kern::axpy(code.s[static_cast<std::size_t>(q)], ga.data(),
               acc.b_core.data() + static_cast<std::size_t>(q) * d, d);

  ++acc.task_count;
}

KnowledgeBase solve_local_dictionary(const AccumulatorState& acc,
                                     const NeighborSummary& nbr, double rho,
                                     double lambda) {
  require(lambda > 0.0, Err::BadSpec, "lambda must be positive");
  require(rho >= 0.0, Err::BadSpec, "rho must be non-negative");
  const std::size_t du = acc.d * acc.u;
  require(nbr.dual_aggregate.rows() == acc.d &&
              nbr.dual_aggregate.cols() == acc.u &&
              nbr.neighbor_dict_sum.rows() == acc.d &&
              nbr.neighbor_dict_sum.cols() == acc.u,
          Err::DimensionMismatch, "neighbor summary shape");

  Matrix system(du, du);
  Vec rhs(du, 0.0);
  if (acc.task_count > 0) {
    const double inv_t = 1.0 / static_cast<double>(acc.task_count);
    system = acc.a;
    system *= inv_t;
    rhs = acc.b_core;
    kern::scal(inv_t, rhs.data(), du);
  }
  add_diag(system, 0.5 * rho * nbr.degree + lambda);
  // consensus terms: -1/2 dual_aggregate + rho/2 neighbor_dict_sum,
  // column-stacked straight into the rhs
  kern::axpy(-0.5, nbr.dual_aggregate.data(), rhs.data(), du);
  kern::axpy(0.5 * rho, nbr.neighbor_dict_sum.data(), rhs.data(), du);

  const Cholesky ch = Cholesky::factor(system);
  require(ch.ok, Err::SolveFailure,
          "local dictionary system not SPD (state corrupted?)");
  Vec l = ch.solve(rhs);
  require(all_finite(l), Err::SolveFailure,
          "local dictionary solve produced non-finite values");
  return unvec(acc.d, acc.u, std::move(l));
}

KnowledgeBase ella_update(const AccumulatorState& acc, double lambda) {
  return solve_local_dictionary(acc, NeighborSummary::none(acc.d, acc.u), 0.0,
                                lambda);
}

KnowledgeBase pooled_dictionary_solve(
    std::span<const AccumulatorState* const> accs, double lambda) {
  require(!accs.empty(), Err::EmptyInput, "pooled solve needs accumulators");
  AccumulatorState pooled(accs[0]->d, accs[0]->u);
  for (const AccumulatorState* acc : accs) {
    require(acc->d == pooled.d && acc->u == pooled.u, Err::DimensionMismatch,
            "pooled solve: accumulator shapes differ");
    pooled.a += acc->a;
    kern::axpy(1.0, acc->b_core.data(), pooled.b_core.data(),
               pooled.b_core.size());
    pooled.task_count += acc->task_count;
  }
  return ella_update(pooled, lambda);
}

}  // namespace colla
