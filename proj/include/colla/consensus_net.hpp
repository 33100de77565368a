#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "colla/knowledge_base.hpp"
#include "colla/linalg.hpp"

// Network structure and the extended-ADMM consensus machinery. The incidence
// matrix H has one row per edge (+1 at the lesser endpoint, -1 at the
// greater); the E_i blocks of H (x) I_d are never materialized -- all E_i^T E_j
// products reduce to graph Laplacian entries.

namespace colla {

enum class TopologyKind { Chain, Star, Complete, RandomConnected };

TopologyKind topology_from_string(const std::string& s);
const char* topology_to_string(TopologyKind k) noexcept;

class NetworkGraph {
 public:
  // Edges are normalized to (i, j) with i < j and sorted lexicographically
  // (this fixes the row order of H). Throws MalformedEdge on self-loops,
  // duplicates, or out-of-range endpoints; DisconnectedGraph when the graph
  // does not connect all agents.
  NetworkGraph(int n_agents, std::vector<std::pair<int, int>> edges);

  int n_agents() const noexcept { return n_agents_; }
  const std::vector<std::pair<int, int>>& edges() const noexcept {
    return edges_;
  }
  const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
  int degree(int i) const {
    return static_cast<int>(adjacency_[static_cast<std::size_t>(i)].size());
  }
  bool adjacent(int i, int j) const;

 private:
  int n_agents_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// Chain = path 0-1-...-N-1; Star = hub at node 0; Complete = all pairs;
// RandomConnected = uniform random spanning tree plus random extra edges up
// to ceil(e_complete / 2) edges total. Deterministic given the seed.
NetworkGraph make_topology(TopologyKind kind, int n_agents,
                           std::uint64_t seed);

struct IncidenceStructure {
  Matrix h;  // e x N, one +1 and one -1 per row

  // E_i^T E_j collapsed to its scalar factor: deg(i) when i == j, -1 when
  // (i, j) is an edge, 0 otherwise (the actual product is this times I_d).
  int ete(int i, int j) const;

  std::vector<std::pair<int, int>> edges;  // row l corresponds to edges[l]
  std::vector<int> degrees;
};

IncidenceStructure build_incidence(const NetworkGraph& g);

struct DualVariable {
  std::vector<Matrix> blocks;  // one d x u block per edge, in edge order

  static DualVariable zeros(const NetworkGraph& g, std::size_t d,
                            std::size_t u);
};

// Signed dual aggregate and freshest neighbor dictionary sum for agent i;
// rebuilt before every primal solve.
NeighborSummary build_neighbor_summary(const NetworkGraph& g, int agent,
                                       const std::vector<Matrix>& dicts,
                                       const DualVariable& duals);

struct AdmmOptions {
  double rho = 1.0;
  double lambda = 1.0;
  int iterations = 1;
  // stop early once the consensus residual drops to this level (< 0: never)
  double stop_below = -1.0;
  // Gauss-Seidel sweep order; empty = ascending agent index
  std::vector<int> sweep_order;
};

struct ConsensusTrace {
  Vec residuals;  // consensus residual after each completed iteration
};

// K iterations of: Gauss-Seidel primal sweep (each agent re-solving its local
// dictionary against fresh neighbor summaries), then the per-edge dual update
// Z_l += rho (L_i - L_j). Dictionaries and duals are updated in place.
ConsensusTrace admm_consensus_round(
    const NetworkGraph& g, const std::vector<const AccumulatorState*>& accs,
    std::vector<Matrix>& dicts, DualVariable& duals, const AdmmOptions& opts);

// max over edges of ||L_i - L_j||_F; 0 iff exact consensus.
double consensus_residual(const NetworkGraph& g,
                          const std::vector<Matrix>& dicts);

struct RhoCheck {
  double bound = 0.0;  // min_i 2 eta_i / (3 (N-1) ||E_i||^2); inf when N = 1
  bool ok = false;     // 0 < rho < bound
};

// Theorem-style admissibility diagnostic: eta_i = 2 lambda +
// 2 lambda_min((1/T) A_i) and ||E_i||^2 = deg(i). The algorithm runs
// regardless of the outcome; callers log a warning when !ok.
RhoCheck rho_admissibility(const NetworkGraph& g,
                           const std::vector<const AccumulatorState*>& accs,
                           double lambda, double rho);

}  // namespace colla
