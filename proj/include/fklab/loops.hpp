#pragma once

// Loop representation of an FK configuration on a Dobrushin domain: the
// exploration path from e_a to e_b plus closed loops, all on medial edges.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fklab/fk.hpp"
#include "fklab/lattice.hpp"

namespace fklab {

struct InterfaceSet {
  std::vector<int> path;                // medial edge ids, e_a first, e_b last
  std::vector<int> path_winding;        // quarter turns from e_a, per path position
  std::vector<std::vector<int>> loops;  // canonical: each starts at its smallest id; sorted
};

/// Throws Error(malformed_domain) if an edge is reached twice.
InterfaceSet trace_interfaces(const Configuration& c, const MedialGraph& m);

/// Path only, reusing buffers; `winding` receives quarter turns per position.
void trace_path(const Configuration& c, const MedialGraph& m, std::vector<int>& path, std::vector<int>& winding);

/// Winding of the path from e_a to `target`, in radians.
/// Throws Error(not_on_path) when the path does not use `target`.
double winding_along(const InterfaceSet& s, int target);

/// Index of the first path edge in `edges`; nullopt if the path never hits it.
std::optional<int> hitting_step(std::span<const int> path, std::span<const int> edges);

/// Primal edges whose state steers the interfaces (degree-4 medial vertex).
std::vector<int> switch_edges(const MedialGraph& m);

struct LoopLawReport {
  int patterns = 0;
  double max_relative_deviation = 0.0;  // of P(pattern) / sqrt(2)^loops from its mean
  bool loop_count_consistent = true;    // same pattern always has the same loop count
};

/// Aggregates the exact measure over interface patterns and compares each
/// pattern probability with (√2)^{#loops}.
LoopLawReport check_loop_weight_law(const MedialGraph& m, const ExactMeasure& mu);

}  // namespace fklab
