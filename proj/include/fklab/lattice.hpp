#pragma once

// Finite subgraphs of Z^2, Dobrushin domains, and the medial graph on which
// interfaces live.
//
// Boundary convention: a site of a PrimalGraph is a boundary site when it has
// fewer than four incident edges in the graph (not when it lies on the outer
// face). Dobrushin arcs are built from the outer boundary polygon, which for
// rectangles visits exactly the boundary sites.
//
// Medial objects use doubled integer coordinates: a primal site (x, y) sits at
// (2x, 2y), a dual site (x + 1/2, y + 1/2) at (2x + 1, 2y + 1), and medial
// vertices (midpoints of lattice edges) at the mixed-parity points.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fklab {

struct Site {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Site&, const Site&) = default;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
                                      static_cast<std::uint32_t>(s.y));
  }
};

struct PrimalEdge {
  int u = 0;  // site indices, u < v
  int v = 0;
};

class PrimalGraph {
 public:
  PrimalGraph() = default;
  /// Throws Error(invalid_argument) for duplicate sites or edges that are not unit lattice steps.
  PrimalGraph(std::vector<Site> sites, const std::vector<std::pair<Site, Site>>& edges);

  /// All lattice edges between the given sites.
  static PrimalGraph induced(std::vector<Site> sites);

  int site_count() const { return static_cast<int>(sites_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<PrimalEdge>& edges() const { return edges_; }
  const Site& site(int i) const { return sites_[i]; }

  std::optional<int> index_of(Site s) const;
  std::optional<int> edge_between(Site s, Site t) const;
  std::optional<int> edge_between_indices(int u, int v) const;
  /// Edge leaving site i in lattice direction d (0=E, 1=N, 2=W, 3=S), or -1.
  int edge_toward(int i, int d) const { return dir_edge_[static_cast<std::size_t>(i) * 4 + d]; }
  int degree(int i) const;
  std::vector<int> incident_edges(int i) const;

  /// Sites with fewer than four incident edges.
  const std::vector<int>& boundary() const { return boundary_; }
  bool is_boundary(int i) const { return degree(i) < 4; }
  bool connected() const;

  Site min_corner() const { return {x0_, y0_}; }
  Site max_corner() const { return {x0_ + w_ - 1, y0_ + h_ - 1}; }

 private:
  int slot(Site s) const;

  std::vector<Site> sites_;
  std::vector<PrimalEdge> edges_;
  std::vector<int> boundary_;
  std::vector<int> dir_edge_;  // 4 per site
  std::vector<int> grid_;      // bounding-box lookup, -1 when absent
  int x0_ = 0, y0_ = 0, w_ = 0, h_ = 0;
};

inline constexpr std::array<Site, 4> kLatticeStep{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

/// ⟦x0, x0+n⟧ × ⟦y0, y0+m⟧ with all lattice edges.
PrimalGraph build_rectangle(int n, int m, Site origin = {0, 0});

/// Bounded unit faces of g (all four sides present). A face is labelled by its
/// lower-left corner, so the face centred at (x+1/2, y+1/2) becomes Site{x, y}.
/// Two faces are joined when they share a side that is an edge of g.
PrimalGraph dual_graph(const PrimalGraph& g);

/// Outer boundary of g traversed counterclockwise, starting at the lowest-then-
/// leftmost site. Throws Error(invalid_domain) when g is not connected, when the
/// walk is not a simple polygon, or when the region it bounds has holes or
/// faces that are not unit squares of g.
std::vector<int> outer_polygon(const PrimalGraph& g);

/// Unit faces strictly inside the outer polygon, by lower-left corner.
std::vector<Site> interior_cells(const PrimalGraph& g, std::span<const int> polygon);

struct DobrushinDomain {
  PrimalGraph graph;
  Site a;
  Site b;
  std::vector<int> polygon;      // counterclockwise, polygon[0] == a
  std::vector<int> free_arc;     // a .. b inclusive, counterclockwise
  std::vector<int> wired_arc;    // b .. a inclusive; {a} when a == b
  std::vector<int> free_edges;   // polygon edges along the free arc, in order
  std::vector<int> wired_edges;  // polygon edges along the wired arc, in order
  std::vector<std::uint8_t> wired;  // per site

  bool degenerate() const { return a == b; }
  int a_index() const { return polygon.front(); }
  int b_index() const { return free_arc.back(); }
};

/// Throws Error(invalid_domain) unless a and b lie on a simple outer polygon.
DobrushinDomain build_dobrushin(PrimalGraph g, Site a, Site b);

// ---------------------------------------------------------------------------
// Medial graph

struct Pt {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Pt&, const Pt&) = default;
};

struct PtHash {
  std::size_t operator()(const Pt& p) const noexcept { return SiteHash{}(Site{p.x, p.y}); }
};

enum class Color : std::uint8_t { black, white };

enum class FaceRole : std::uint8_t {
  interior_site,
  free_site,   // primal site on the free arc, other than a and b
  wired_site,  // primal site on the wired arc (includes a and b)
  interior_dual,
  free_dual,   // white diamond on the free arc
  extra_black,
  extra_white,
};

struct Face {
  Color color = Color::black;
  Pt pos;  // doubled coordinates
  FaceRole role = FaceRole::interior_site;
  int site = -1;  // primal site index for original black faces
};

/// Medial edge directions, counterclockwise from the positive diagonal.
enum class Dir : std::uint8_t { NE = 0, NW = 1, SW = 2, SE = 3 };

double dir_angle(Dir d);  // radians
Dir dir_of(Pt from, Pt to);
/// Endpoints of the lattice edge whose midpoint is the medial point p.
std::pair<Site, Site> medial_point_sites(Pt p);

struct MedialEdge {
  int tail = 0;
  int head = 0;
  int black = 0;  // face ids
  int white = 0;
  Dir dir = Dir::NE;
};

struct MedialVertex {
  Pt pos;
  int primal_edge = -1;    // lattice edge through this point if it is an edge of the domain
  std::vector<int> in;
  std::vector<int> out;
  bool terminal = false;   // tail of e_a or head of e_b
  /// Incident edges by the compass position of their far endpoint,
  /// clockwise: NE, SE, SW, NW; -1 where absent.
  std::array<int, 4> around{-1, -1, -1, -1};

  int degree() const { return static_cast<int>(in.size() + out.size()); }
  /// Midpoint of a horizontal lattice edge.
  bool horizontal() const { return (pos.x & 1) != 0; }
};

/// Outgoing direction after entering a vertex in direction `in`. The walker
/// keeps open primal edges and open dual edges on opposite sides: on an open
/// primal edge it stays with the white face it came along, otherwise with the
/// black face. Indexed [in][horizontal][open]; impossible entries hold -1.
extern const std::array<std::array<std::array<int, 2>, 2>, 4> kTurnTable;

class MedialGraph {
 public:
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<MedialVertex>& vertices() const { return vertices_; }
  const std::vector<MedialEdge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int e_a() const { return e_a_; }
  int e_b() const { return e_b_; }

  const std::vector<int>& free_arc_faces() const { return free_arc_faces_; }
  const std::vector<int>& wired_arc_faces() const { return wired_arc_faces_; }
  std::optional<int> face_at(Pt doubled) const;
  int black_face(int site) const { return site; }
  std::optional<int> white_face(Site lower_left) const;
  std::optional<int> edge_between_faces(int black, int white) const;

  /// Next edge of an interface after `e`, for the given state of the primal
  /// edge through head(e); -1 after e_b.
  int next_edge(int e, bool primal_open) const { return primal_open ? next_open_[e] : next_closed_[e]; }
  /// Primal edge consulted when leaving edge e (-1: forced continuation).
  int switch_edge(int e) const { return switch_edge_[e]; }
  /// Quarter turns (+1 counterclockwise) from e to next_edge(e, open).
  int turn(int e, bool primal_open) const { return primal_open ? turn_open_[e] : turn_closed_[e]; }

  const DobrushinDomain& domain() const { return domain_; }

 private:
  friend MedialGraph build_medial(const DobrushinDomain& d);

  DobrushinDomain domain_;
  std::vector<Face> faces_;
  std::vector<MedialVertex> vertices_;
  std::vector<MedialEdge> edges_;
  std::vector<int> free_arc_faces_;
  std::vector<int> wired_arc_faces_;
  std::unordered_map<Pt, int, PtHash> face_index_;
  std::unordered_map<std::uint64_t, int> edge_index_;
  std::vector<int> next_open_, next_closed_, switch_edge_;
  std::vector<std::int8_t> turn_open_, turn_closed_;
  int e_a_ = -1;
  int e_b_ = -1;
};

/// Throws Error(malformed_domain) if the construction yields a vertex whose
/// in- and out-degrees differ (indicates a geometry bug or unsupported domain).
MedialGraph build_medial(const DobrushinDomain& d);

/// Neighbour of a face for the harmonic-measure walks.
struct WalkStep {
  int face = 0;
  bool to_layer = false;
};

/// Medial graph plus one layer of black diamonds along the free arc and one
/// layer of white diamonds along the wired arc. Layer faces are separate face
/// ids even when they sit on the same lattice position as an original face.
struct ExtendedMedial {
  MedialGraph base;
  std::vector<Face> faces;                 // base faces followed by layer faces
  std::vector<int> extra_black;            // face ids
  std::vector<int> extra_white;            // face ids
  std::vector<std::vector<WalkStep>> adj;  // walk neighbours of non-absorbing faces

  bool is_layer(int f) const {
    return faces[f].role == FaceRole::extra_black || faces[f].role == FaceRole::extra_white;
  }
};

ExtendedMedial extend_medial(const MedialGraph& m);

}  // namespace fklab
