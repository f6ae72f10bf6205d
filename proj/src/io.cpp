#include "fklab/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "fklab/error.hpp"

#ifndef FKLAB_GIT_REVISION
#define FKLAB_GIT_REVISION "unknown"
#endif

namespace fklab {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string version_string() { return "1.0.0"; }
std::string git_revision() { return FKLAB_GIT_REVISION; }

std::string manifest_header(const Manifest& m) {
  std::ostringstream o;
  o << "# fklab version=" << version_string() << " revision=" << git_revision() << "\n";
  o << "# command=" << m.command << " spec_hash=" << m.spec_hash << " seed=" << m.seed << "\n";
  return o.str();
}

json manifest_json(const Manifest& m) {
  return {{"version", version_string()},
          {"revision", git_revision()},
          {"command", m.command},
          {"spec_hash", m.spec_hash},
          {"seed", m.seed}};
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::invalid_argument, "domain spec: " + what); }

Site site_of(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    bad("expected [x, y], got " + j.dump());
  return {j[0].get<int>(), j[1].get<int>()};
}

std::pair<Site, Site> edge_of(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("expected [[x, y], [x, y]], got " + j.dump());
  return {site_of(j[0]), site_of(j[1])};
}

}  // namespace

PrimalGraph graph_from_json(const json& j) {
  if (!j.is_object()) bad("expected an object");
  std::vector<Site> sites;
  std::vector<std::pair<Site, Site>> edges;
  bool explicit_edges = false;
  if (j.contains("rectangle")) {
    const json& r = j["rectangle"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
      bad("rectangle must be [n, m]");
    const int n = r[0].get<int>(), m = r[1].get<int>();
    if (n < 1 || m < 1) bad("rectangle sides must be positive");
    const Site o = j.contains("origin") ? site_of(j["origin"]) : Site{0, 0};
    for (int x = 0; x <= n; ++x)
      for (int y = 0; y <= m; ++y) sites.push_back({o.x + x, o.y + y});
  } else if (j.contains("sites")) {
    if (!j["sites"].is_array()) bad("sites must be a list");
    for (const json& s : j["sites"]) sites.push_back(site_of(s));
    if (j.contains("edges")) {
      if (!j["edges"].is_array()) bad("edges must be a list");
      explicit_edges = true;
      for (const json& e : j["edges"]) edges.push_back(edge_of(e));
    }
  } else {
    bad("needs 'rectangle' or 'sites'");
  }
  if (j.contains("remove_sites")) {
    std::unordered_set<Site, SiteHash> drop;
    for (const json& s : j["remove_sites"]) drop.insert(site_of(s));
    std::erase_if(sites, [&](const Site& s) { return drop.contains(s); });
    std::erase_if(edges, [&](const auto& e) { return drop.contains(e.first) || drop.contains(e.second); });
  }
  if (!explicit_edges) {
    // Induced edges.
    std::unordered_set<Site, SiteHash> have(sites.begin(), sites.end());
    for (const Site& s : sites)
      for (int d = 0; d < 2; ++d) {
        const Site t{s.x + kLatticeStep[d].x, s.y + kLatticeStep[d].y};
        if (have.contains(t)) edges.push_back({s, t});
      }
  }
  if (j.contains("remove_edges")) {
    for (const json& e : j["remove_edges"]) {
      const auto [s, t] = edge_of(e);
      const auto before = edges.size();
      std::erase_if(edges, [&](const auto& f) {
        return (f.first == s && f.second == t) || (f.first == t && f.second == s);
      });
      if (edges.size() == before) bad("remove_edges: no edge " + e.dump());
    }
  }
  return PrimalGraph(std::move(sites), edges);
}

DobrushinDomain domain_from_json(const json& j) {
  if (!j.contains("a") || !j.contains("b")) bad("needs 'a' and 'b'");
  return build_dobrushin(graph_from_json(j), site_of(j["a"]), site_of(j["b"]));
}

json domain_to_json(const DobrushinDomain& d, const std::string& name) {
  json j;
  if (!name.empty()) j["name"] = name;
  json sites = json::array(), edges = json::array();
  for (const Site& s : d.graph.sites()) sites.push_back({s.x, s.y});
  for (const PrimalEdge& e : d.graph.edges()) {
    const Site u = d.graph.site(e.u), v = d.graph.site(e.v);
    edges.push_back({{u.x, u.y}, {v.x, v.y}});
  }
  j["sites"] = sites;
  j["edges"] = edges;
  j["a"] = {d.a.x, d.a.y};
  j["b"] = {d.b.x, d.b.y};
  return j;
}

json read_json_file(const std::string& path, std::string* raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (raw) *raw = text;
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_argument, path + ": " + e.what());
  }
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const Manifest& m, const std::vector<std::string>& columns)
    : out_(&out), columns_(columns.size()) {
  *out_ << manifest_header(m);
  for (std::size_t i = 0; i < columns.size(); ++i) *out_ << (i ? "," : "") << columns[i];
  *out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error(ErrorCode::invalid_argument, "CSV row has the wrong width");
  for (std::size_t i = 0; i < cells.size(); ++i) *out_ << (i ? "," : "") << cells[i];
  *out_ << "\n";
}

}  // namespace fklab
