#include "fklab/loops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fklab/error.hpp"
#include "fklab/neumaier.hpp"

namespace fklab {

namespace {

int step(const Configuration& c, const MedialGraph& m, int e, int& turn) {
  const int sw = m.switch_edge(e);
  const bool open = sw >= 0 && c.open(sw);
  turn = m.turn(e, open);
  return m.next_edge(e, open);
}

}  // namespace

void trace_path(const Configuration& c, const MedialGraph& m, std::vector<int>& path, std::vector<int>& winding) {
  path.clear();
  winding.clear();
  int e = m.e_a(), w = 0;
  const int limit = m.edge_count();
  while (true) {
    path.push_back(e);
    winding.push_back(w);
    if (e == m.e_b()) break;
    if (static_cast<int>(path.size()) > limit)
      throw Error(ErrorCode::malformed_domain, "exploration path does not terminate");
    int t = 0;
    e = step(c, m, e, t);
    w += t;
  }
}

InterfaceSet trace_interfaces(const Configuration& c, const MedialGraph& m) {
  InterfaceSet s;
  trace_path(c, m, s.path, s.path_winding);
  std::vector<char> used(m.edge_count(), 0);
  for (int e : s.path) {
    if (used[e]) throw Error(ErrorCode::malformed_domain, "exploration path revisits an edge");
    used[e] = 1;
  }
  for (int start = 0; start < m.edge_count(); ++start) {
    if (used[start]) continue;
    std::vector<int> loop;
    int e = start;
    do {
      if (used[e]) throw Error(ErrorCode::malformed_domain, "loop runs into a used edge");
      used[e] = 1;
      loop.push_back(e);
      int t = 0;
      e = step(c, m, e, t);
      if (e < 0) throw Error(ErrorCode::malformed_domain, "loop leaves the medial graph");
    } while (e != start);
    std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());
    s.loops.push_back(std::move(loop));
  }
  std::sort(s.loops.begin(), s.loops.end());
  return s;
}

double winding_along(const InterfaceSet& s, int target) {
  for (std::size_t k = 0; k < s.path.size(); ++k)
    if (s.path[k] == target) return s.path_winding[k] * std::numbers::pi / 2;
  throw Error(ErrorCode::not_on_path, "edge is not on the exploration path");
}

std::optional<int> hitting_step(std::span<const int> path, std::span<const int> edges) {
  for (std::size_t k = 0; k < path.size(); ++k)
    if (std::find(edges.begin(), edges.end(), path[k]) != edges.end()) return static_cast<int>(k);
  return std::nullopt;
}

std::vector<int> switch_edges(const MedialGraph& m) {
  std::vector<char> mark(m.domain().graph.edge_count(), 0);
  for (int e = 0; e < m.edge_count(); ++e)
    if (m.switch_edge(e) >= 0) mark[m.switch_edge(e)] = 1;
  std::vector<int> out;
  for (int e = 0; e < static_cast<int>(mark.size()); ++e)
    if (mark[e]) out.push_back(e);
  return out;
}

LoopLawReport check_loop_weight_law(const MedialGraph& m, const ExactMeasure& mu) {
  // A pattern is fixed by the states of the switching edges; the remaining
  // edges (along the wired arc) never steer an interface.
  const auto sw = switch_edges(m);
  const int ns = static_cast<int>(sw.size());
  std::vector<NeumaierSum> mass(std::size_t{1} << ns);
  std::vector<int> loops(std::size_t{1} << ns, -1);
  LoopLawReport rep;

  const int ne = mu.edge_count();
  Configuration c(ne);
  std::uint64_t mask = 0;
  const std::uint64_t total = std::uint64_t{1} << ne;
  std::vector<char> used(m.edge_count());
  std::vector<int> path, wind;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0) {
      const int e = std::countr_zero(i);
      c.flip(e);
      mask ^= std::uint64_t{1} << e;
    }
    std::uint64_t key = 0;
    for (int k = 0; k < ns; ++k) key |= ((mask >> sw[k]) & 1U) << k;
    mass[key].add(mu.probability(mask));
    // Count loops: edges not on the path, grouped into cycles.
    trace_path(c, m, path, wind);
    std::fill(used.begin(), used.end(), 0);
    for (int e : path) used[e] = 1;
    int nl = 0;
    for (int start = 0; start < m.edge_count(); ++start) {
      if (used[start]) continue;
      ++nl;
      int e = start, t = 0;
      do {
        used[e] = 1;
        e = step(c, m, e, t);
      } while (e != start);
    }
    if (loops[key] >= 0 && loops[key] != nl) rep.loop_count_consistent = false;
    loops[key] = nl;
  }

  std::vector<double> ratio;
  for (std::size_t k = 0; k < mass.size(); ++k)
    if (loops[k] >= 0) ratio.push_back(mass[k].value() / std::pow(std::numbers::sqrt2, loops[k]));
  double mean = 0.0;
  for (double r : ratio) mean += r;
  mean /= static_cast<double>(ratio.size());
  for (double r : ratio) rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::abs(r / mean - 1.0));
  rep.patterns = static_cast<int>(ratio.size());
  return rep;
}

}  // namespace fklab
