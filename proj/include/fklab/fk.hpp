#pragma once

// FK (random-cluster) configurations, boundary conditions and weights
//   P(ω) ∝ p^{o(ω)} (1-p)^{c(ω)} q^{k(ω,ξ)}
// plus an exhaustive-enumeration measure for small graphs.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fklab/lattice.hpp"
#include "fklab/union_find.hpp"

namespace fklab {

struct FKParams {
  double p = 0.0;
  double q = 1.0;
  /// Throws Error(invalid_argument) unless 0 <= p <= 1 and q >= 1.
  void validate() const;
};

double self_dual_point(double q);
/// Solves p p* / ((1-p)(1-p*)) = q for p*.
double dual_parameter(double p, double q);
/// (p_sd(2), 2)
FKParams critical_ising();

/// Wired blocks over the sites of one graph; sites outside every block are free.
class BoundaryCondition {
 public:
  BoundaryCondition() = default;
  /// Each block lists site indices; blocks must be disjoint. Blocks are not
  /// restricted to degree-rule boundary sites so that Dobrushin arcs through
  /// reflex corners can be wired.
  BoundaryCondition(const PrimalGraph& g, std::vector<std::vector<int>> blocks);

  static BoundaryCondition free(const PrimalGraph& g);
  /// All boundary sites in a single block.
  static BoundaryCondition wired(const PrimalGraph& g);
  /// Wired arc of a Dobrushin domain as one block.
  static BoundaryCondition dobrushin(const DobrushinDomain& d);

  int site_count() const { return site_count_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int block_of(int site) const { return block_of_[site]; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

 private:
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
  int site_count_ = 0;
};

/// Open/closed state per edge of a PrimalGraph.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int edges, bool all_open = false)
      : open_(static_cast<std::size_t>(edges), all_open ? 1 : 0) {}

  /// Bit i of mask gives edge i.
  static Configuration from_mask(int edges, std::uint64_t mask);

  int size() const { return static_cast<int>(open_.size()); }
  bool open(int e) const { return open_[e] != 0; }
  void set(int e, bool v) { open_[e] = v ? 1 : 0; }
  void flip(int e) { open_[e] ^= 1; }
  int open_count() const;
  std::span<const std::uint8_t> bits() const { return open_; }
  std::span<std::uint8_t> bits() { return open_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::uint8_t> open_;
};

/// Union-find over sites plus one ghost node per wired block, reused across calls.
class ClusterScratch {
 public:
  /// Builds clusters of ω ∪ ξ; returns the cluster count k(ω, ξ).
  int build(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc);
  /// Clusters of ω ∪ ξ without edge `skip`.
  int build_without(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc, int skip);
  bool connected(int u, int v) { return uf_.connected(u, v); }
  int root(int u) { return uf_.find(u); }
  UnionFind& uf() { return uf_; }

 private:
  UnionFind uf_;
};

int cluster_count(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc);
double config_log_weight(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc,
                         const FKParams& params);
double config_weight(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc,
                     const FKParams& params);

/// Normalized probabilities of all 2^E configurations; index = edge bitmask.
class ExactMeasure {
 public:
  int edge_count() const { return edges_; }
  const FKParams& params() const { return params_; }
  const BoundaryCondition& bc() const { return bc_; }
  double log_z() const { return log_z_; }
  double probability(std::uint64_t mask) const { return prob_[mask]; }
  std::span<const double> probabilities() const { return prob_; }

 private:
  friend ExactMeasure enumerate_measure(const PrimalGraph&, const BoundaryCondition&, const FKParams&, int);
  int edges_ = 0;
  FKParams params_;
  BoundaryCondition bc_;
  std::vector<double> prob_;
  double log_z_ = 0.0;
};

inline constexpr int kDefaultEnumerationCutoff = 24;

/// Throws Error(cutoff_exceeded) when the edge count exceeds `cutoff`.
ExactMeasure enumerate_measure(const PrimalGraph& g, const BoundaryCondition& bc, const FKParams& params,
                               int cutoff = kDefaultEnumerationCutoff);

using Event = std::function<bool(const Configuration&)>;
double event_probability(const ExactMeasure& m, const Event& event);
/// Probability that edge e is open, for every edge.
std::vector<double> edge_marginals(const ExactMeasure& m);

/// True when some site of `from` is joined to some site of `to` by open edges
/// of c (boundary wiring is not used).
bool open_connection(const PrimalGraph& g, const Configuration& c, std::span<const int> from,
                     std::span<const int> to, UnionFind& scratch);

/// Bottom-to-top open crossing of a rectangle built by build_rectangle.
bool vertical_crossing(const PrimalGraph& g, const Configuration& c, UnionFind& scratch);
bool horizontal_crossing(const PrimalGraph& g, const Configuration& c, UnionFind& scratch);

}  // namespace fklab
