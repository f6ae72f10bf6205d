#pragma once

// Monte Carlo experiments at (p_sd(2), 2): crossing bands, duality, boundary
// connection probabilities, circuits in annuli, arm exponents, two-point
// function and crossing counts of the exploration path.

#include <cstdint>
#include <string>
#include <vector>

#include "fklab/fk.hpp"
#include "fklab/lattice.hpp"
#include "fklab/sampler.hpp"
#include "fklab/stats.hpp"

namespace fklab {

struct McBudget {
  int sweeps = 10000;
  int burn_in = -1;  // -1: automatic
  int chains = 1;
  std::uint64_t seed = 1;
  Dynamics dynamics = Dynamics::cluster;
};

enum class BcKind { free, wired, dobrushin };
std::string bc_name(BcKind k);
/// Throws Error(invalid_argument) for unknown names.
BcKind parse_bc(const std::string& s);

/// Boundary condition on build_rectangle(n, m). The Dobrushin choice has
/// a = (0, m/2), b = (n, m/2): free lower half, wired upper half.
BoundaryCondition rectangle_bc(const PrimalGraph& g, BcKind kind);

struct CrossingEstimates {
  Estimate vertical;
  Estimate horizontal;
  Estimate both;
};

/// Open crossings of build_rectangle(n, m) (n columns of edges, m rows).
CrossingEstimates crossing_probability(int n, int m, BcKind bc, const McBudget& budget);
CrossingEstimates crossing_probability(const PrimalGraph& g, const BoundaryCondition& bc, const FKParams& params,
                                       const McBudget& budget);

/// Dual of build_rectangle(n, m) with the free condition: one dual site per
/// unit face plus one exterior site per boundary edge, all exterior sites in
/// one wired block. `left`/`right` are the exterior sites beyond x = 0 / x = n.
struct DualComb {
  PrimalGraph graph;
  BoundaryCondition bc;
  std::vector<int> left, right;
};
DualComb dual_comb(int n, int m);

/// P¹ of a left-right open crossing of the dual comb at the dual parameter.
Estimate dual_crossing_probability(int n, int m, const McBudget& budget);

/// R_n^β = [-βn, βn] x [0, 2n] with free boundary; x on the bottom side, u on
/// the top side (horizontal coordinates).
Estimate boundary_onepoint(int n, double beta, int x, int u, const McBudget& budget);

/// R_n^β with Dobrushin conditions wired on the top side (a, b its corners);
/// P(x and y both joined to the top side), x, y on the bottom.
Estimate boundary_pair(int n, double beta, int x, int y, const McBudget& budget);

struct CircuitEstimates {
  Estimate circuit;         // exact: no closed dual path across the annulus
  Estimate four_crossings;  // hard-direction crossings of the four rectangles
  long long samples = 0;
  long long implication_violations = 0;  // four crossings without a circuit
};

/// S_n = [-n, n]^2, annulus S_n minus the interior of S_m. Requires 0 < m < n.
CircuitEstimates circuit_probability(int m, int n, BcKind bc, const McBudget& budget);

/// Circuit surrounding S_m made of open edges of the annulus (dual cut check).
bool annulus_circuit(const PrimalGraph& g, const Configuration& c, int m, int n, UnionFind& scratch);
/// All four rectangles R_B, R_L, R_T, R_R crossed in the hard direction.
bool four_rectangle_crossings(const PrimalGraph& g, const Configuration& c, int m, int n, UnionFind& scratch);
/// Open crossing of [x0, x1] x [y0, y1] using edges inside it.
bool box_crossing(const PrimalGraph& g, const Configuration& c, Site lo, Site hi, bool vertical,
                  UnionFind& scratch);

enum class ArmKind { half_plane, plane };

struct ScalingResult {
  std::vector<int> sizes;
  std::vector<Estimate> estimates;
  PowerLawFit fit;        // slope of log P against log size
  double exponent = 0.0;  // decay exponent, -fit.exponent
};

/// half_plane: [-n, n] x [0, n], bottom side free, the rest wired,
/// P(0 ↝ wired part). plane: [-m, m]^2 wired, P(0 ↝ boundary).
ScalingResult one_arm(ArmKind kind, const std::vector<int>& sizes, const McBudget& budget);
/// One size of the above; one_arm seeds size i with one_arm_seed(budget.seed, i).
Estimate one_arm_point(ArmKind kind, int n, const McBudget& budget);
std::uint64_t one_arm_seed(std::uint64_t master, std::size_t index);

/// Windowed power-law fit of estimates against sizes.
ScalingResult scaling_result(std::vector<int> sizes, std::vector<Estimate> est);

/// P(x ↝ y) in a free box of side `box`, averaged over horizontal and vertical
/// pairs with x in a central window of side `window`.
ScalingResult two_point(const std::vector<int>& dists, int box, int window, const McBudget& budget);

struct CrossingCounts {
  std::vector<Estimate> p;  // P(A_k), k = 0..k_max
  double slope = 0.0;       // of log P(A_k) against k, k = 1..k_max
  double r_squared = 0.0;
  bool decreasing = false;
};

/// Number of crossings of the annulus B(x, R) minus B(x, r) (sup-norm balls in
/// lattice units) by the exploration path, counted as alternations between
/// the two balls. Medial points are compared in doubled coordinates.
int path_annulus_crossings(const MedialGraph& m, std::span<const int> path, Site x, int r, int R);

/// Square [0, n]^2 with a = (n/2, 0), b = (n/2, n); x the centre, R = 2r.
CrossingCounts crossing_counts(int n, int r, int k_max, const McBudget& budget);

}  // namespace fklab
