#pragma once

// Exact identity checks on one enumerable Dobrushin domain, as named rows.

#include <string>
#include <vector>

#include "fklab/harmonic.hpp"
#include "fklab/lattice.hpp"

namespace fklab {

struct CheckRow {
  std::string domain;
  std::string check;
  double value = 0.0;  // residual or signed margin; pass iff value <= tolerance
  double tolerance = 0.0;
  bool pass = false;
};

/// F(e_a) = 1, |F(e_b)| = 1, Cauchy-Riemann, argument lines, |F|² relations
/// at four- and two-valent vertices, boundary connection probabilities, the
/// loop-weight law, and H (well-defined, boundary values, range, interior
/// sub/superharmonicity).
std::vector<CheckRow> verify_observable(const DobrushinDomain& d, const std::string& name, double tol = 1e-10);

/// Modified boundary Laplacian of H and both comparison bounds, plus the
/// swapped-target negative control (passes when the swapped check fails).
std::vector<CheckRow> verify_harmonic(const DobrushinDomain& d, const std::string& name, double tol = 1e-10,
                                      double layer_rate = kLayerRateFromWeights);
/// Same, reusing an observable already computed on m.
std::vector<CheckRow> verify_harmonic(const MedialGraph& m, const Observable& o, const std::string& name,
                                      double tol = 1e-10, double layer_rate = kLayerRateFromWeights);

/// Both of the above with one enumeration of the measure.
std::vector<CheckRow> verify_domain(const DobrushinDomain& d, const std::string& name, double tol = 1e-10,
                                    double layer_rate = kLayerRateFromWeights);

}  // namespace fklab
