#include "fklab/harmonic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "fklab/error.hpp"
#include "fklab/kernels.hpp"

namespace fklab {

RateGraph build_rate_graph(const ExtendedMedial& x, WalkColor color, double layer_rate) {
  RateGraph rg;
  rg.color = color;
  rg.face_count = static_cast<int>(x.faces.size());
  rg.unknown_of.assign(rg.face_count, -1);
  rg.target.assign(rg.face_count, 0);
  rg.other.assign(rg.face_count, 0);
  for (int f = 0; f < rg.face_count; ++f) {
    const FaceRole r = x.faces[f].role;
    if (color == WalkColor::black) {
      if (r == FaceRole::wired_site) rg.target[f] = 1;
      if (r == FaceRole::extra_black) rg.other[f] = 1;
      if (r == FaceRole::interior_site || r == FaceRole::free_site) {
        rg.unknown_of[f] = static_cast<int>(rg.unknowns.size());
        rg.unknowns.push_back(f);
      }
    } else {
      if (r == FaceRole::extra_white) rg.target[f] = 1;
      if (r == FaceRole::free_dual) rg.other[f] = 1;
      if (r == FaceRole::interior_dual) {
        rg.unknown_of[f] = static_cast<int>(rg.unknowns.size());
        rg.unknowns.push_back(f);
      }
    }
  }
  rg.arcs.resize(rg.unknowns.size());
  for (std::size_t i = 0; i < rg.unknowns.size(); ++i)
    for (const WalkStep& s : x.adj[rg.unknowns[i]]) rg.arcs[i].push_back({s.face, s.to_layer ? layer_rate : 1.0});
  return rg;
}

int conjugate_gradient(const std::vector<std::int32_t>& row_start, const std::vector<std::int32_t>& col,
                       const std::vector<double>& val, const std::vector<double>& rhs, std::vector<double>& x,
                       double tol, int max_iter) {
  const std::size_t n = rhs.size();
  const kernels::CsrView a{row_start, col, val};
  std::vector<double> diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::int32_t k = row_start[i]; k < row_start[i + 1]; ++k)
      if (static_cast<std::size_t>(col[k]) == i) diag[i] = val[k];
  x.assign(n, 0.0);
  std::vector<double> r(rhs), z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = kernels::dot(r, z);
  const double bnorm = std::sqrt(kernels::dot(rhs, rhs));
  if (bnorm == 0.0) return 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (std::sqrt(kernels::dot(r, r)) <= tol * bnorm) break;
    kernels::spmv(a, p, ap);
    const double alpha = rz / kernels::dot(p, ap);
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, ap, r);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = kernels::dot(r, z);
    kernels::xpay(z, rz_new / rz, p);
    rz = rz_new;
  }
  return it;
}

HarmonicMeasure solve_hm(const RateGraph& rg, bool swap_targets) {
  const auto& tgt = swap_targets ? rg.other : rg.target;
  const auto& oth = swap_targets ? rg.target : rg.other;
  const int n = static_cast<int>(rg.unknowns.size());

  // Every unknown must reach an absorbing face.
  {
    std::vector<std::vector<int>> back(n);
    std::vector<char> reach(n, 0);
    std::queue<int> q;
    for (int i = 0; i < n; ++i)
      for (const auto& arc : rg.arcs[i]) {
        const int j = rg.unknown_of[arc.face];
        if (j >= 0) {
          back[j].push_back(i);
        } else if (!reach[i] && (tgt[arc.face] || oth[arc.face])) {
          reach[i] = 1;
          q.push(i);
        }
      }
    while (!q.empty()) {
      const int j = q.front();
      q.pop();
      for (int i : back[j])
        if (!reach[i]) {
          reach[i] = 1;
          q.push(i);
        }
    }
    if (std::find(reach.begin(), reach.end(), 0) != reach.end())
      throw Error(ErrorCode::singular_system, "interior faces cut off from both absorbing sets");
  }

  std::vector<double> rhs(n, 0.0), diag(n, 0.0);
  std::vector<std::int32_t> row_start{0}, col;
  std::vector<double> val;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> row{{i, 0.0}};
    for (const auto& arc : rg.arcs[i]) {
      diag[i] += arc.rate;
      row[0].second += arc.rate;
      const int j = rg.unknown_of[arc.face];
      if (j >= 0)
        row.push_back({j, -arc.rate});
      else if (tgt[arc.face])
        rhs[i] += arc.rate;
    }
    std::sort(row.begin(), row.end());
    for (const auto& [j, v] : row) {
      if (!col.empty() && static_cast<int>(col.size()) > row_start.back() && col.back() == j) {
        val.back() += v;
        continue;
      }
      col.push_back(j);
      val.push_back(v);
    }
    row_start.push_back(static_cast<std::int32_t>(col.size()));
  }

  HarmonicMeasure hm;
  hm.unknowns = n;
  std::vector<double> u(n, 0.0);
  if (n > 0 && n < kDenseSolveLimit) {
    hm.dense = true;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (std::int32_t k = row_start[i]; k < row_start[i + 1]; ++k) a(i, col[k]) += val[k];
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), n);
    Eigen::VectorXd sol = a.ldlt().solve(b);
    for (int i = 0; i < n; ++i) u[i] = sol[i];
  } else if (n > 0) {
    conjugate_gradient(row_start, col, val, rhs, u, 1e-13);
  }

  hm.values.assign(rg.face_count, std::numeric_limits<double>::quiet_NaN());
  for (int f = 0; f < rg.face_count; ++f) {
    if (tgt[f]) hm.values[f] = 1.0;
    if (oth[f]) hm.values[f] = 0.0;
  }
  for (int i = 0; i < n; ++i) hm.values[rg.unknowns[i]] = u[i];
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& arc : rg.arcs[i]) s += arc.rate * hm.values[arc.face];
    hm.residual = std::max(hm.residual, std::abs(u[i] - s / diag[i]));
  }
  return hm;
}

std::pair<double, double> boundary_laplacian_coefficients() {
  const double s = std::numbers::sqrt2;
  return {(2 + s) / (6 + 5 * s), 2 * s / (6 + 5 * s)};
}

ComparisonReport check_comparison(const MedialGraph& m, const Observable& o, double layer_rate, bool swap_targets,
                                  double tol) {
  const ExtendedMedial x = extend_medial(m);
  const auto black = solve_hm(build_rate_graph(x, WalkColor::black, layer_rate), swap_targets);
  const auto white = solve_hm(build_rate_graph(x, WalkColor::white, layer_rate), swap_targets);

  std::vector<int> interior_whites;
  for (int f = 0; f < static_cast<int>(m.faces().size()); ++f)
    if (m.faces()[f].role == FaceRole::interior_dual) interior_whites.push_back(f);

  ComparisonReport rep;
  for (int e = 0; e < m.edge_count(); ++e) {
    const MedialEdge& me = m.edges()[e];
    if (m.faces()[me.white].role != FaceRole::free_dual) continue;
    ++rep.edges;
    const Pt t = m.vertices()[me.tail].pos, h = m.vertices()[me.head].pos;
    const Pt mid2{t.x + h.x, t.y + h.y};
    long long best = std::numeric_limits<long long>::max();
    std::vector<int> closest;
    for (int w : interior_whites) {
      const Pt p = m.faces()[w].pos;
      const long long dx = 2LL * p.x - mid2.x, dy = 2LL * p.y - mid2.y;
      const long long d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        closest.clear();
      }
      if (d2 == best) closest.push_back(w);
    }
    std::sort(closest.begin(), closest.end(), [&](int a, int b) { return m.faces()[a].pos < m.faces()[b].pos; });
    const double f = std::abs(o.F[e]);
    const double sb = std::sqrt(std::max(0.0, black.values[me.black]));
    rep.worst_upper = std::max(rep.worst_upper, f - sb);
    ComparisonReport::Row row{e, f, sb, 0.0, {}};
    for (std::size_t k = 0; k < closest.size(); ++k) {
      const double sw = std::sqrt(std::max(0.0, white.values[closest[k]]));
      rep.worst_lower = std::max(rep.worst_lower, sw - f);
      ++rep.candidates;
      if (k == 0) {
        row.sqrt_hm_white = sw;
        row.white_pos = m.faces()[closest[k]].pos;
      }
    }
    rep.rows.push_back(row);
  }
  rep.pass = rep.edges > 0 && rep.worst_lower <= tol && rep.worst_upper <= tol;
  return rep;
}

BoundaryLaplacian boundary_subharmonicity_check(const HFunction& h, const ExtendedMedial& x) {
  const double t = std::tan(std::numbers::pi / 8);
  const double layer_w = 1.0 - t * t;
  BoundaryLaplacian r;
  r.min_value = std::numeric_limits<double>::infinity();
  r.min_interior = std::numeric_limits<double>::infinity();
  const auto value = [&](int f) { return f < static_cast<int>(h.H.size()) ? h.H[f] : 0.0; };
  for (int f = 0; f < static_cast<int>(x.base.faces().size()); ++f) {
    const FaceRole role = x.faces[f].role;
    if (role != FaceRole::interior_site && role != FaceRole::free_site) continue;
    double num = 0.0, den = 0.0;
    bool layer = false;
    for (const WalkStep& s : x.adj[f]) {
      const double w = s.to_layer ? layer_w : 1.0;
      layer = layer || s.to_layer;
      num += w * ((s.to_layer ? 0.0 : value(s.face)) - h.H[f]);
      den += w;
    }
    if (den == 0.0) continue;
    if (layer) {
      r.min_value = std::min(r.min_value, num / den);
      ++r.faces;
    } else {
      r.min_interior = std::min(r.min_interior, num / den);
    }
  }
  if (r.faces == 0) r.min_value = 0.0;
  if (!std::isfinite(r.min_interior)) r.min_interior = 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Scaling probes

ProbeDomain probe_domain(const std::string& family, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "probe size must be positive");
  std::vector<Site> sites;
  ProbeDomain pd;
  if (family == "rect_bottom_point") {
    // (R_n, u, u) with R_n = [-n, n] x [0, 2n], u the top midpoint; white face above the origin.
    for (int y = 0; y <= 2 * n; ++y)
      for (int x = -n; x <= n; ++x) sites.push_back({x, y});
    pd.domain = build_dobrushin(PrimalGraph::induced(std::move(sites)), {0, 2 * n}, {0, 2 * n});
    pd.face = {1, 1};
    pd.color = WalkColor::white;
  } else if (family == "distance_d") {
    // Half box [-d, d] x [0, d], free bottom side; black face of the origin.
    for (int y = 0; y <= n; ++y)
      for (int x = -n; x <= n; ++x) sites.push_back({x, y});
    pd.domain = build_dobrushin(PrimalGraph::induced(std::move(sites)), {-n, 0}, {n, 0});
    pd.face = {0, 0};
    pd.color = WalkColor::black;
  } else if (family == "slit_k") {
    // Box [-4k, 4k] x [0, 4k] with the sites {-k} x [0, k-1] removed. The wired
    // arc runs from the top-left corner down the left side, along the bottom
    // and up the left wall of the notch to its tip; white face above the origin.
    const int l = 4 * n;
    for (int y = 0; y <= l; ++y)
      for (int x = -l; x <= l; ++x)
        if (!(x == -n && y < n)) sites.push_back({x, y});
    pd.domain = build_dobrushin(PrimalGraph::induced(std::move(sites)), {-n, n}, {-l, l});
    pd.face = {1, 1};
    pd.color = WalkColor::white;
  } else if (family == "segment_kn") {
    // Half box [-n, n] x [0, n] wired only on the bottom segment [-2, 2];
    // black face at height n/2 above it.
    for (int y = 0; y <= n; ++y)
      for (int x = -n; x <= n; ++x) sites.push_back({x, y});
    pd.domain = build_dobrushin(PrimalGraph::induced(std::move(sites)), {2, 0}, {-2, 0});
    pd.face = {0, 2 * (n / 2)};
    pd.color = WalkColor::black;
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown probe family: " + family);
  }
  return pd;
}

ScalingProbe hm_scaling_probe(const std::string& family, const std::vector<int>& sizes, double layer_rate) {
  ScalingProbe sp;
  sp.family = family;
  sp.sizes = sizes;
  std::vector<PowerLawPoint> pts;
  for (int n : sizes) {
    const ProbeDomain pd = probe_domain(family, n);
    const MedialGraph m = build_medial(pd.domain);
    const ExtendedMedial x = extend_medial(m);
    const auto hm = solve_hm(build_rate_graph(x, pd.color, layer_rate));
    const auto f = m.face_at(pd.face);
    if (!f) throw Error(ErrorCode::invalid_argument, "probe face is not in the domain");
    sp.values.push_back(hm.values[*f]);
    sp.max_residual = std::max(sp.max_residual, hm.residual);
    pts.push_back({static_cast<double>(n), hm.values[*f], 0.0});
  }
  sp.fit = fit_power_law(pts);
  return sp;
}

}  // namespace fklab
