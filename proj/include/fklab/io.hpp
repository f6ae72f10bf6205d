#pragma once

// JSON domain descriptions, CSV output with a manifest header, and hashing.
//
// Domain schema (version 1):
//   {"name": str,
//    "rectangle": [n, m], "origin": [x, y],          // or
//    "sites": [[x, y], ...], "edges": [[[x, y], [x, y]], ...],  // edges optional: induced
//    "remove_sites": [[x, y], ...], "remove_edges": [[[x, y], [x, y]], ...],
//    "a": [x, y], "b": [x, y]}

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fklab/lattice.hpp"

namespace fklab {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Version string and git revision baked in at build time.
std::string version_string();
std::string git_revision();

struct Manifest {
  std::string spec_hash;  // hex64(fnv1a(spec bytes))
  std::uint64_t seed = 0;
  std::string command;
};

/// "# key=value" lines; every CSV file starts with these.
std::string manifest_header(const Manifest& m);
nlohmann::json manifest_json(const Manifest& m);

/// Throws Error(invalid_argument) on schema violations and Error(invalid_domain)
/// when the sites do not form a valid Dobrushin domain.
PrimalGraph graph_from_json(const nlohmann::json& j);
DobrushinDomain domain_from_json(const nlohmann::json& j);
/// Explicit sites and edges, so any domain round-trips.
nlohmann::json domain_to_json(const DobrushinDomain& d, const std::string& name = "");

/// Reads and parses a JSON file; parse failures become Error(invalid_argument).
nlohmann::json read_json_file(const std::string& path, std::string* raw = nullptr);

/// Fixed formatting for CSV cells so outputs are byte-identical across runs.
std::string fmt_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const Manifest& m, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream* out_;
  std::size_t columns_;
};

}  // namespace fklab
