#include "colla/consensus_net.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "colla/errors.hpp"
#include "colla/util.hpp"

namespace colla {

TopologyKind topology_from_string(const std::string& s) {
  if (s == "chain") return TopologyKind::Chain;
  if (s == "star") return TopologyKind::Star;
  if (s == "complete") return TopologyKind::Complete;
  if (s == "random") return TopologyKind::RandomConnected;
  fail(Err::ConfigError, "unknown topology '" + s + "'");
}

const char* topology_to_string(TopologyKind k) noexcept {
  switch (k) {
    case TopologyKind::Chain: return "chain";
    case TopologyKind::Star: return "star";
    case TopologyKind::Complete: return "complete";
    case TopologyKind::RandomConnected: return "random";
  }
  return "?";
}

NetworkGraph::NetworkGraph(int n_agents,
                           std::vector<std::pair<int, int>> edges)
    : n_agents_(n_agents) {
  require(n_agents >= 1, Err::TooFewAgents, "need at least one agent");
  for (auto& [i, j] : edges) {
    require(i != j, Err::MalformedEdge, "self-loop");
    if (i > j) std::swap(i, j);
    require(i >= 0 && j < n_agents, Err::MalformedEdge,
            "edge endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  require(std::adjacent_find(edges.begin(), edges.end()) == edges.end(),
          Err::MalformedEdge, "duplicate edge");
  edges_ = std::move(edges);

  adjacency_.assign(static_cast<std::size_t>(n_agents), {});
  for (auto [i, j] : edges_) {
    adjacency_[static_cast<std::size_t>(i)].push_back(j);
    adjacency_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  // BFS connectivity check
  std::vector<char> seen(static_cast<std::size_t>(n_agents), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    for (int w : adjacency_[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        queue.push_back(w);
      }
  }
  require(std::all_of(seen.begin(), seen.end(), [](char c) { return c; }),
          Err::DisconnectedGraph, "network graph is not connected");
}

bool NetworkGraph::adjacent(int i, int j) const {
  const auto& nbrs = adjacency_[static_cast<std::size_t>(i)];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

NetworkGraph make_topology(TopologyKind kind, int n_agents,
                           std::uint64_t seed) {
  require(n_agents >= 1, Err::TooFewAgents, "need at least one agent");
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case TopologyKind::Chain:
      for (int i = 0; i + 1 < n_agents; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::Star:
      for (int i = 1; i < n_agents; ++i) edges.emplace_back(0, i);
      break;
    case TopologyKind::Complete:
      for (int i = 0; i < n_agents; ++i)
        for (int j = i + 1; j < n_agents; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::RandomConnected: {
      if (n_agents == 1) break;
      std::mt19937_64 rng(splitmix64(seed));
      // Uniform random labeled tree via a Pruefer sequence
      std::set<std::pair<int, int>> tree;
      if (n_agents == 2) {
        tree.insert({0, 1});
      } else {
        std::vector<int> pruefer(static_cast<std::size_t>(n_agents - 2));
        std::uniform_int_distribution<int> node(0, n_agents - 1);
        for (auto& p : pruefer) p = node(rng);
        std::vector<int> deg(static_cast<std::size_t>(n_agents), 1);
        for (int p : pruefer) ++deg[static_cast<std::size_t>(p)];
        std::set<int> leaves;
        for (int i = 0; i < n_agents; ++i)
          if (deg[static_cast<std::size_t>(i)] == 1) leaves.insert(i);
        for (int p : pruefer) {
          const int leaf = *leaves.begin();
          leaves.erase(leaves.begin());
          tree.insert({std::min(leaf, p), std::max(leaf, p)});
          if (--deg[static_cast<std::size_t>(p)] == 1) leaves.insert(p);
        }
        const int a = *leaves.begin();
        const int b = *std::next(leaves.begin());
        tree.insert({std::min(a, b), std::max(a, b)});
      }
      // Fill with uniformly chosen non-tree edges up to half the complete
      // graph's edge count.
      const int e_complete = n_agents * (n_agents - 1) / 2;
      const std::size_t target =
          static_cast<std::size_t>((e_complete + 1) / 2);
      std::vector<std::pair<int, int>> rest;
      for (int i = 0; i < n_agents; ++i)
        for (int j = i + 1; j < n_agents; ++j)
          if (!tree.count({i, j})) rest.emplace_back(i, j);
      std::shuffle(rest.begin(), rest.end(), rng);
      edges.assign(tree.begin(), tree.end());
      for (std::size_t k = 0; edges.size() < target && k < rest.size(); ++k)
        edges.push_back(rest[k]);
      break;
    }
  }
  return NetworkGraph(n_agents, std::move(edges));
}

IncidenceStructure build_incidence(const NetworkGraph& g) {
  IncidenceStructure inc;
  const std::size_t e = g.edges().size();
  inc.h = Matrix(e, static_cast<std::size_t>(g.n_agents()));
  for (std::size_t l = 0; l < e; ++l) {
    const auto [i, j] = g.edges()[l];
    inc.h(l, static_cast<std::size_t>(i)) = 1.0;
    inc.h(l, static_cast<std::size_t>(j)) = -1.0;
  }
  inc.edges = g.edges();
  inc.degrees.resize(static_cast<std::size_t>(g.n_agents()));
  for (int i = 0; i < g.n_agents(); ++i)
    inc.degrees[static_cast<std::size_t>(i)] = g.degree(i);
  return inc;
}

int IncidenceStructure::ete(int i, int j) const {
  if (i == j) return degrees[static_cast<std::size_t>(i)];
  const auto key = std::make_pair(std::min(i, j), std::max(i, j));
  return std::binary_search(edges.begin(), edges.end(), key) ? -1 : 0;
}

DualVariable DualVariable::zeros(const NetworkGraph& g, std::size_t d,
                                 std::size_t u) {
  DualVariable z;
  z.blocks.assign(g.edges().size(), Matrix(d, u));
  return z;
}

NeighborSummary build_neighbor_summary(const NetworkGraph& g, int agent,
                                       const std::vector<Matrix>& dicts,
                                       const DualVariable& duals) {
  const Matrix& own = dicts[static_cast<std::size_t>(agent)];
  NeighborSummary nbr = NeighborSummary::none(own.rows(), own.cols());
  nbr.degree = g.degree(agent);
  for (std::size_t l = 0; l < g.edges().size(); ++l) {
    const auto [i, j] = g.edges()[l];
    if (i == agent) nbr.dual_aggregate += duals.blocks[l];
    else if (j == agent) nbr.dual_aggregate -= duals.blocks[l];
  }
  for (int j : g.neighbors(agent))
    nbr.neighbor_dict_sum += dicts[static_cast<std::size_t>(j)];
  return nbr;
}

double consensus_residual(const NetworkGraph& g,
                          const std::vector<Matrix>& dicts) {
  double worst = 0.0;
  for (auto [i, j] : g.edges())
    worst = std::max(worst, fro_dist(dicts[static_cast<std::size_t>(i)],
                                     dicts[static_cast<std::size_t>(j)]));
  return worst;
}

ConsensusTrace admm_consensus_round(
    const NetworkGraph& g, const std::vector<const AccumulatorState*>& accs,
    std::vector<Matrix>& dicts, DualVariable& duals, const AdmmOptions& opts) {
  const std::size_t n = static_cast<std::size_t>(g.n_agents());
  require(accs.size() == n && dicts.size() == n, Err::DimensionMismatch,
          "agent count mismatch");
  require(duals.blocks.size() == g.edges().size(), Err::DimensionMismatch,
          "dual block count != edge count");
  require(opts.iterations >= 1, Err::BadSpec, "need at least one iteration");

  std::vector<int> order = opts.sweep_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  require(order.size() == n, Err::DimensionMismatch, "sweep order size");

  ConsensusTrace trace;
  trace.residuals.reserve(static_cast<std::size_t>(opts.iterations));
  for (int k = 0; k < opts.iterations; ++k) {
    for (int i : order) {
      const NeighborSummary nbr = build_neighbor_summary(g, i, dicts, duals);
      try {
        dicts[static_cast<std::size_t>(i)] = solve_local_dictionary(
            *accs[static_cast<std::size_t>(i)], nbr, opts.rho, opts.lambda);
      } catch (const Error& e) {
        fail(e.code(), "agent " + std::to_string(i) + ": " + e.what());
      }
    }
    for (std::size_t l = 0; l < g.edges().size(); ++l) {
      const auto [i, j] = g.edges()[l];
      Matrix delta = dicts[static_cast<std::size_t>(i)];
      delta -= dicts[static_cast<std::size_t>(j)];
      delta *= opts.rho;
      duals.blocks[l] += delta;
    }
    trace.residuals.push_back(consensus_residual(g, dicts));
    if (opts.stop_below >= 0.0 && trace.residuals.back() <= opts.stop_below)
      break;
  }
  return trace;
}

RhoCheck rho_admissibility(const NetworkGraph& g,
                           const std::vector<const AccumulatorState*>& accs,
                           double lambda, double rho) {
  RhoCheck check;
  const int n = g.n_agents();
  if (n == 1) {
    check.bound = std::numeric_limits<double>::infinity();
    check.ok = rho > 0.0;
    return check;
  }
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const AccumulatorState& acc = *accs[static_cast<std::size_t>(i)];
    double lam_min = 0.0;
    if (acc.task_count > 0) {
      Matrix scaled = acc.a;
      scaled *= 1.0 / static_cast<double>(acc.task_count);
      lam_min = std::max(0.0, sym_min_eigenvalue(scaled));
    }
    const double eta = 2.0 * lambda + 2.0 * lam_min;
    const double deg = static_cast<double>(g.degree(i));
    bound = std::min(bound, 2.0 * eta / (3.0 * (n - 1) * deg));
  }
  check.bound = bound;
  check.ok = rho > 0.0 && rho < bound;
  return check;
}

}  // namespace colla
