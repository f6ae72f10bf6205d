#pragma once

// Fermionic observable F(e) = E[exp(-i W(e_a, e) / 2) 1{e ∈ γ}] and the face
// function H with H(B) - H(W) = |F(e)|^2 across every medial edge.

#include <complex>
#include <vector>

#include "fklab/fk.hpp"
#include "fklab/lattice.hpp"
#include "fklab/loops.hpp"

namespace fklab {

using cplx = std::complex<double>;

struct Observable {
  std::vector<cplx> F;        // per medial edge
  std::vector<double> on_path;  // P(e ∈ γ), or its MC frequency
  std::vector<double> se;     // MC standard error of F (empty for exact values)
  static constexpr double spin = 0.5;
};

/// Summand exp(-i W / 2) for a winding of `quarter_turns` · π/2.
cplx winding_phase(int quarter_turns);

/// `mu` must be the Dobrushin measure on m's domain graph.
Observable exact_observable(const MedialGraph& m, const ExactMeasure& mu);
/// Enumerates the critical (p_sd(2), 2) Dobrushin measure itself.
Observable exact_observable(const MedialGraph& m, int cutoff = kDefaultEnumerationCutoff);

/// Accumulates sampled configurations into an MC estimate of F.
class ObservableAccumulator {
 public:
  explicit ObservableAccumulator(const MedialGraph& m);
  void add(const Configuration& c);
  long long samples() const { return n_; }
  Observable result() const;

 private:
  const MedialGraph* m_;
  std::vector<double> re_, im_, re2_, im2_, hits_;
  std::vector<int> path_, wind_;
  long long n_ = 0;
};

/// max |F(e1) + F(e3) - F(e2) - F(e4)| over degree-4 vertices, edges taken
/// clockwise NE, SE, SW, NW.
double check_local_relation(const Observable& o, const MedialGraph& m);
/// max distance (mod π) between arg F(e) and -(θ_e - θ_{e_a})/2; edges with
/// |F(e)| below `zero` are skipped.
double check_argument_lines(const Observable& o, const MedialGraph& m, double zero = 1e-13);
/// max | |F(e1)|² + |F(e3)|² - |F(e2)|² - |F(e4)|² | over degree-4 vertices.
double check_orthogonal_squares(const Observable& o, const MedialGraph& m);
/// max over degree-2 vertices of | |F(in)| - |F(out)| | and | |F(in)| - P(in ∈ γ) |.
double check_degree_two(const Observable& o, const MedialGraph& m);
/// max over free-arc boundary edges of | |F(e)| - P(x ↝ wired arc) |, x the
/// black face of e.
double check_boundary_connection(const Observable& o, const MedialGraph& m, const ExactMeasure& mu);

struct HFunction {
  std::vector<double> H;        // per face of the medial graph
  double path_residual = 0.0;   // max | H(B) - H(W) - |F(e)|² | over all edges
  double boundary_residual = 0.0;  // max deviation from 1 on wired blacks / 0 on free whites
  double min_value = 0.0;
  double max_value = 0.0;
};

/// Integrates the increments breadth-first from the black face of a.
/// Throws Error(inconsistent) when path_residual exceeds `tolerance`.
HFunction build_H(const Observable& o, const MedialGraph& m, double tolerance = 1e-9);

struct Harmonicity {
  double min_black = 0.0;  // min 4-neighbour Laplacian over interior black faces
  double max_white = 0.0;  // max over interior white faces
  int black_faces = 0;
  int white_faces = 0;
};

/// Interior faces: all four corner medial vertices have degree 4.
Harmonicity check_harmonicity(const HFunction& h, const MedialGraph& m);

}  // namespace fklab
