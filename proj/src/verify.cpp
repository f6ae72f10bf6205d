#include "fklab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fklab/fk.hpp"
#include "fklab/loops.hpp"
#include "fklab/observable.hpp"

namespace fklab {

namespace {

struct Rows {
  std::string domain;
  double tol;
  std::vector<CheckRow> rows;
  void add(const std::string& check, double value) {
    rows.push_back({domain, check, value, tol, value <= tol});
  }
};

}  // namespace

namespace {

std::vector<CheckRow> observable_rows(const MedialGraph& m, const ExactMeasure& mu, const Observable& o,
                                      const std::string& name, double tol) {
  Rows r{name, tol, {}};
  r.add("F(e_a)=1", std::abs(o.F[m.e_a()] - cplx{1.0, 0.0}));
  r.add("|F(e_b)|=1", std::abs(std::abs(o.F[m.e_b()]) - 1.0));
  r.add("cauchy_riemann", check_local_relation(o, m));
  r.add("argument_lines", check_argument_lines(o, m));
  r.add("orthogonal_squares", check_orthogonal_squares(o, m));
  r.add("degree_two", check_degree_two(o, m));
  r.add("boundary_connection", check_boundary_connection(o, m, mu));
  const LoopLawReport law = check_loop_weight_law(m, mu);
  r.add("loop_weight_law", law.loop_count_consistent ? law.max_relative_deviation : 1.0);
  // Integrate without throwing so that a failure shows up as a row.
  const HFunction h = build_H(o, m, std::numeric_limits<double>::infinity());
  r.add("H_well_defined", h.path_residual);
  r.add("H_boundary_values", h.boundary_residual);
  r.add("H_range", std::max({0.0, -h.min_value, h.max_value - 1.0}));
  const Harmonicity hm = check_harmonicity(h, m);
  r.add("H_black_subharmonic", std::max(0.0, -hm.min_black));
  r.add("H_white_superharmonic", std::max(0.0, hm.max_white));
  return r.rows;
}

}  // namespace

std::vector<CheckRow> verify_observable(const DobrushinDomain& d, const std::string& name, double tol) {
  const MedialGraph m = build_medial(d);
  const ExactMeasure mu = enumerate_measure(d.graph, BoundaryCondition::dobrushin(d), critical_ising());
  return observable_rows(m, mu, exact_observable(m, mu), name, tol);
}

std::vector<CheckRow> verify_harmonic(const DobrushinDomain& d, const std::string& name, double tol,
                                      double layer_rate) {
  const MedialGraph m = build_medial(d);
  return verify_harmonic(m, exact_observable(m), name, tol, layer_rate);
}

std::vector<CheckRow> verify_domain(const DobrushinDomain& d, const std::string& name, double tol,
                                    double layer_rate) {
  const MedialGraph m = build_medial(d);
  const ExactMeasure mu = enumerate_measure(d.graph, BoundaryCondition::dobrushin(d), critical_ising());
  const Observable o = exact_observable(m, mu);
  auto rows = observable_rows(m, mu, o, name, tol);
  auto h = verify_harmonic(m, o, name, tol, layer_rate);
  rows.insert(rows.end(), h.begin(), h.end());
  return rows;
}

std::vector<CheckRow> verify_harmonic(const MedialGraph& m, const Observable& o, const std::string& name,
                                      double tol, double layer_rate) {
  const HFunction h = build_H(o, m, std::numeric_limits<double>::infinity());
  Rows r{name, tol, {}};
  const BoundaryLaplacian bl = boundary_subharmonicity_check(h, extend_medial(m));
  r.add("boundary_modified_laplacian", std::max(0.0, -bl.min_value));
  r.add("interior_black_laplacian", std::max(0.0, -bl.min_interior));
  const ComparisonReport c = check_comparison(m, o, layer_rate, false, tol);
  r.add("comparison_lower", std::max(0.0, c.worst_lower));
  r.add("comparison_upper", std::max(0.0, c.worst_upper));
  const ComparisonReport sw = check_comparison(m, o, layer_rate, true, tol);
  r.add("swapped_targets_rejected", sw.pass ? 1.0 : 0.0);
  return r.rows;
}

}  // namespace fklab
