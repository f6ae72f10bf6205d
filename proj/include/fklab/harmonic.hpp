#pragma once

// Harmonic measures of the rate-modified walks on the extended medial graph.
//
// Black walk: from non-wired black faces, rate 1 to adjacent black faces and
// `layer_rate` onto the extra black layer; absorbed on the wired arc (value 1)
// or on the layer (value 0). White walk: from interior white faces, rate 1 to
// adjacent white faces and `layer_rate` onto the extra white layer; absorbed
// on the layer (value 1) or on the free arc (value 0).

#include <string>
#include <utility>
#include <vector>

#include "fklab/lattice.hpp"
#include "fklab/observable.hpp"
#include "fklab/stats.hpp"

namespace fklab {

/// (√2 + 1) / 2, the rate as usually quoted.
inline constexpr double kLayerRate = 1.2071067811865475244;
/// 2(√2 - 1) = 1 / kLayerRate = 1 - tan²(π/8): the layer/ordinary weight ratio
/// of boundary_laplacian_coefficients(). This is the default; with kLayerRate
/// the comparison principle fails already on a 2x2 rectangle.
inline constexpr double kLayerRateFromWeights = 0.82842712474619009760;

enum class WalkColor { black, white };

struct RateGraph {
  struct Arc {
    int face = 0;
    double rate = 1.0;
  };
  WalkColor color = WalkColor::black;
  int face_count = 0;                 // faces of the ExtendedMedial
  std::vector<int> unknowns;          // non-absorbing faces
  std::vector<int> unknown_of;        // per face, -1 when absorbing or of the other colour
  std::vector<std::vector<Arc>> arcs;  // per unknown
  std::vector<char> target;           // per face: wired arc (black) / extra white layer (white)
  std::vector<char> other;            // per face: extra black layer (black) / free arc (white)
};

RateGraph build_rate_graph(const ExtendedMedial& x, WalkColor color, double layer_rate = kLayerRateFromWeights);

struct HarmonicMeasure {
  std::vector<double> values;  // per face; NaN on faces of the other colour
  double residual = 0.0;       // max |value - rate-weighted mean of neighbours|
  int unknowns = 0;
  bool dense = false;
};

inline constexpr int kDenseSolveLimit = 2000;

/// `swap_targets` exchanges the roles of the two absorbing sets.
/// Throws Error(singular_system) when an interior component reaches neither set.
HarmonicMeasure solve_hm(const RateGraph& rg, bool swap_targets = false);

/// Jacobi-preconditioned conjugate gradient on a CSR system, using the
/// runtime-selected kernels. Returns the iteration count.
int conjugate_gradient(const std::vector<std::int32_t>& row_start, const std::vector<std::int32_t>& col,
                       const std::vector<double>& val, const std::vector<double>& rhs, std::vector<double>& x,
                       double tol = 1e-12, int max_iter = 100000);

/// Weights of the modified boundary Laplacian for a black face with exactly
/// one neighbour in the extra layer: {(2+√2)/(6+5√2), 2√2/(6+5√2)}.
std::pair<double, double> boundary_laplacian_coefficients();

struct ComparisonReport {
  int edges = 0;
  int candidates = 0;
  double worst_lower = -1.0;  // max of √HM∘(W) - |F(e)|
  double worst_upper = -1.0;  // max of |F(e)| - √HM•(B)
  bool pass = false;
  struct Row {
    int edge = 0;
    double abs_f = 0.0;
    double sqrt_hm_black = 0.0;
    double sqrt_hm_white = 0.0;  // at the canonical closest white face
    Pt white_pos;
  };
  std::vector<Row> rows;
};

/// Checks √HM∘(W) ≤ |F(e)| ≤ √HM•(B) for every medial edge whose white face is
/// on the free arc. Every closest non-free white face W is tested; the row
/// reports the one with lexicographically smallest doubled coordinates.
ComparisonReport check_comparison(const MedialGraph& m, const Observable& o, double layer_rate = kLayerRateFromWeights,
                                  bool swap_targets = false, double tol = 1e-10);

struct BoundaryLaplacian {
  double min_value = 0.0;  // over black faces next to the extra layer
  int faces = 0;
  double min_interior = 0.0;  // ordinary 1/4-weight Laplacian on the other non-absorbing black faces
};

/// Modified Laplacian of H with H = 0 on the extra black layer. Ordinary
/// neighbours weigh 1 and layer neighbours 1 - tan²(π/8) before normalization,
/// which reproduces boundary_laplacian_coefficients() for one layer neighbour.
BoundaryLaplacian boundary_subharmonicity_check(const HFunction& h, const ExtendedMedial& x);

/// Domain families for the scaling probes.
struct ProbeDomain {
  DobrushinDomain domain;
  Pt face;  // doubled coordinates of the probed face
  WalkColor color = WalkColor::white;
};

ProbeDomain probe_domain(const std::string& family, int size);

struct ScalingProbe {
  std::string family;
  std::vector<int> sizes;
  std::vector<double> values;
  double max_residual = 0.0;
  PowerLawFit fit;
};

/// family ∈ {rect_bottom_point, distance_d, slit_k, segment_kn}.
ScalingProbe hm_scaling_probe(const std::string& family, const std::vector<int>& sizes,
                              double layer_rate = kLayerRateFromWeights);

}  // namespace fklab
