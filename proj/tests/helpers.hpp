#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "fklab/io.hpp"
#include "fklab/lattice.hpp"

namespace fklab::test {

inline const double kSqrt2 = std::sqrt(2.0);

inline std::vector<nlohmann::json> suite() { return read_json_file(FKLAB_SUITE)["domains"].get<std::vector<nlohmann::json>>(); }

inline DobrushinDomain suite_domain(const std::string& name) {
  for (const auto& d : suite())
    if (d["name"] == name) return domain_from_json(d);
  FAIL("no fixture " << name);
  return {};
}

inline DobrushinDomain rect_domain(int n, int m, Site a, Site b) { return build_dobrushin(build_rectangle(n, m), a, b); }

}  // namespace fklab::test
