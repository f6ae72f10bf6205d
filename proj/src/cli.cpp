#include "fklab/cli.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fklab/error.hpp"
#include "fklab/experiments.hpp"
#include "fklab/fk.hpp"
#include "fklab/harmonic.hpp"
#include "fklab/io.hpp"
#include "fklab/loops.hpp"
#include "fklab/verify.hpp"

namespace fklab {

using nlohmann::json;

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min(threads, count));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

constexpr int kSpecVersion = 1;

struct Context {
  const RunConfig& cfg;
  std::ostream& log;
  json spec;
  Manifest manifest;
  std::filesystem::path out;
};

void check_version(const json& spec) {
  if (!spec.is_object()) throw Error(ErrorCode::invalid_argument, "spec must be a JSON object");
  const int v = spec.value("version", kSpecVersion);
  if (v != kSpecVersion) throw Error(ErrorCode::invalid_argument, "unsupported spec version " + std::to_string(v));
}

std::ofstream open_out(const Context& ctx, const std::string& file) {
  std::ofstream f(ctx.out / file, std::ios::binary);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + (ctx.out / file).string());
  return f;
}

void write_json(const Context& ctx, const std::string& file, json body) {
  body["manifest"] = manifest_json(ctx.manifest);
  open_out(ctx, file) << body.dump(2) << "\n";
}

// A suite is {"domains": [...]} or a single domain object.
std::vector<json> suite_domains(const json& spec) {
  if (!spec.contains("domains")) return {spec};
  if (!spec["domains"].is_array() || spec["domains"].empty())
    throw Error(ErrorCode::invalid_argument, "'domains' must be a non-empty list");
  return spec["domains"].get<std::vector<json>>();
}

std::string domain_name(const json& d, std::size_t i) {
  return d.contains("name") ? d["name"].get<std::string>() : "domain_" + std::to_string(i);
}

int verify(Context& ctx, bool harmonic) {
  const double tol = ctx.spec.value("tolerance", 1e-10);
  const double rate = ctx.cfg.layer_rate.value_or(ctx.spec.value("layer_rate", kLayerRateFromWeights));
  const std::vector<json> domains = suite_domains(ctx.spec);
  std::vector<DobrushinDomain> built;
  for (const json& d : domains) built.push_back(domain_from_json(d));
  std::vector<std::vector<CheckRow>> rows(domains.size());
  parallel_for(static_cast<int>(domains.size()), ctx.cfg.threads, [&](int i) {
    const std::string name = domain_name(domains[i], i);
    rows[i] = harmonic ? verify_harmonic(built[i], name, tol, rate) : verify_observable(built[i], name, tol);
  });
  std::ofstream f = open_out(ctx, harmonic ? "verify_harmonic.csv" : "verify_observable.csv");
  CsvWriter csv(f, ctx.manifest, {"domain", "check", "value", "tolerance", "pass"});
  int failures = 0;
  for (const auto& block : rows)
    for (const CheckRow& r : block) {
      csv.row({r.domain, r.check, fmt_double(r.value), fmt_double(r.tolerance), r.pass ? "1" : "0"});
      if (!r.pass) {
        ++failures;
        ctx.log << "FAIL " << r.domain << " " << r.check << " " << fmt_double(r.value) << "\n";
      }
    }
  ctx.log << domains.size() << " domains, " << failures << " failed checks\n";
  return failures ? kExitCheckFailed : kExitOk;
}

BoundaryCondition bc_for_domain(const DobrushinDomain& d, const std::string& kind) {
  if (kind == "dobrushin") return BoundaryCondition::dobrushin(d);
  if (kind == "free") return BoundaryCondition::free(d.graph);
  if (kind == "wired") return BoundaryCondition::wired(d.graph);
  throw Error(ErrorCode::invalid_argument, "unknown boundary condition '" + kind + "'");
}

int enumerate(Context& ctx) {
  const std::vector<json> domains = suite_domains(ctx.spec);
  std::ofstream f = open_out(ctx, "enumerate.csv");
  CsvWriter csv(f, ctx.manifest, {"domain", "bc", "edge", "u_x", "u_y", "v_x", "v_y", "p_open"});
  json summary = json::array();
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const DobrushinDomain d = domain_from_json(domains[i]);
    const std::string name = domain_name(domains[i], i);
    const std::string bc = domains[i].value("bc", ctx.spec.value("bc", std::string("dobrushin")));
    const ExactMeasure mu = enumerate_measure(d.graph, bc_for_domain(d, bc), critical_ising());
    const std::vector<double> marg = edge_marginals(mu);
    for (int e = 0; e < d.graph.edge_count(); ++e) {
      const Site u = d.graph.site(d.graph.edges()[e].u), v = d.graph.site(d.graph.edges()[e].v);
      csv.row({name, bc, std::to_string(e), std::to_string(u.x), std::to_string(u.y), std::to_string(v.x),
               std::to_string(v.y), fmt_double(marg[e])});
    }
    json row = {{"domain", name}, {"bc", bc}, {"edges", d.graph.edge_count()}, {"log_z", mu.log_z()}};
    if (bc == "dobrushin") {
      const LoopLawReport law = check_loop_weight_law(build_medial(d), mu);
      row["loop_patterns"] = law.patterns;
      row["loop_law_max_relative_deviation"] = law.max_relative_deviation;
    }
    summary.push_back(row);
  }
  write_json(ctx, "enumerate.json", {{"domains", summary}});
  ctx.log << domains.size() << " domains enumerated\n";
  return kExitOk;
}

Dynamics parse_dynamics(const std::string& s) {
  if (s == "cluster") return Dynamics::cluster;
  if (s == "heat_bath") return Dynamics::heat_bath;
  throw Error(ErrorCode::invalid_argument, "unknown dynamics '" + s + "'");
}

// Keys of `j` override those of `defaults`.
McBudget budget_from(const json& j, const json& defaults, std::uint64_t seed) {
  auto get = [&](const char* key, auto fallback) {
    using T = decltype(fallback);
    if (j.contains(key)) return j[key].get<T>();
    if (defaults.is_object() && defaults.contains(key)) return defaults[key].get<T>();
    return fallback;
  };
  McBudget b;
  b.sweeps = get("sweeps", b.sweeps);
  b.burn_in = get("burn_in", b.burn_in);
  b.chains = get("chains", b.chains);
  b.dynamics = parse_dynamics(get("dynamics", std::string("cluster")));
  b.seed = seed;
  if (b.sweeps < 1 || b.chains < 1) throw Error(ErrorCode::invalid_argument, "sweeps and chains must be positive");
  return b;
}

struct Row {
  std::string kind;
  int n = 0;
  int m = 0;
  std::string bc;
  Estimate est;
  std::uint64_t seed = 0;
};

const std::vector<std::string> kRowColumns = {"kind", "n", "m", "bc", "estimate", "se", "n_samples", "seed"};

void write_row(CsvWriter& csv, const Row& r) {
  csv.row({r.kind, std::to_string(r.n), std::to_string(r.m), r.bc, fmt_double(r.est.mean),
           fmt_double(r.est.std_error), std::to_string(r.est.n_samples), std::to_string(r.seed)});
}

std::pair<int, int> rectangle_of(const json& spec) {
  if (!spec.contains("rectangle")) throw Error(ErrorCode::invalid_argument, "sample needs 'rectangle': [n, m]");
  const auto r = spec["rectangle"].get<std::vector<int>>();
  if (r.size() != 2 || r[0] < 1 || r[1] < 1) throw Error(ErrorCode::invalid_argument, "rectangle must be [n, m]");
  return {r[0], r[1]};
}

int sample(Context& ctx) {
  const auto [n, m] = rectangle_of(ctx.spec);
  const std::string bc_s = ctx.spec.value("bc", std::string("free"));
  const McBudget b = budget_from(ctx.spec, json(), ctx.cfg.seed);
  const PrimalGraph g = build_rectangle(n, m);
  ChainSpec s;
  s.graph = &g;
  s.bc = rectangle_bc(g, parse_bc(bc_s));
  s.dynamics = b.dynamics;
  s.burn_in_sweeps = b.burn_in;
  s.sweeps = b.sweeps;
  s.chains = b.chains;
  s.seed = b.seed;
  const auto est = run_chain(s, 4, [&g](const Configuration& c, std::span<double> out) {
    thread_local UnionFind uf;
    out[0] = static_cast<double>(c.open_count()) / static_cast<double>(c.size());
    out[1] = vertical_crossing(g, c, uf);
    out[2] = horizontal_crossing(g, c, uf);
    out[3] = out[1] * out[2];
  });
  std::ofstream f = open_out(ctx, "sample.csv");
  CsvWriter csv(f, ctx.manifest, kRowColumns);
  const char* kinds[] = {"edge_density", "crossing_vertical", "crossing_horizontal", "crossing_both"};
  for (int k = 0; k < 4; ++k) write_row(csv, {kinds[k], n, m, bc_s, est[k], b.seed});
  ctx.log << "vertical crossing " << fmt_double(est[1].mean) << " +- " << fmt_double(est[1].std_error) << "\n";
  return kExitOk;
}

// One experiment entry expands into independent cells plus a summary built
// from their rows once all cells are done.
struct Plan {
  std::vector<std::function<std::vector<Row>()>> cells;
  std::function<json(const std::vector<std::vector<Row>>&)> summarize;
};

std::vector<int> int_list(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::invalid_argument, std::string("experiment needs '") + key + "'");
  return j[key].get<std::vector<int>>();
}

json fit_json(const ScalingResult& r) {
  return {{"exponent", r.exponent},        {"slope", r.fit.exponent},   {"stderr", r.fit.stderr_},
          {"r_squared", r.fit.r_squared}, {"window_min", r.fit.x_min}, {"window_max", r.fit.x_max}};
}

ScalingResult scaling_of(const std::vector<std::vector<Row>>& rows) {
  std::vector<int> sizes;
  std::vector<Estimate> est;
  for (const auto& cell : rows)
    for (const Row& r : cell) {
      sizes.push_back(r.n);
      est.push_back(r.est);
    }
  return scaling_result(sizes, est);
}

// Largest (earlier - later) / combined SE over successive sizes.
double max_downward_z(const std::vector<Estimate>& e) {
  double worst = 0.0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    const double se = combined_se(e[i - 1], e[i]);
    const double d = e[i - 1].mean - e[i].mean;
    worst = std::max(worst, se > 0 ? d / se : (d > 0 ? INFINITY : 0.0));
  }
  return worst;
}

Plan plan_experiment(const json& x, const json& defaults, std::uint64_t seed, double layer_rate) {
  const std::string kind = x.value("kind", std::string());
  Plan p;
  auto budget = [&](std::size_t cell) { return budget_from(x, defaults, chain_seed(seed, cell)); };
  if (kind == "crossing") {
    const std::vector<int> sizes = int_list(x, "sizes");
    const double aspect = x.value("aspect", 1.0);
    const auto bcs = x.value("bc", std::vector<std::string>{"free", "wired", "dobrushin"});
    for (const std::string& bc : bcs) parse_bc(bc);
    for (int n : sizes)
      for (const std::string& bc : bcs) {
        const McBudget b = budget(p.cells.size());
        const int m = std::max(1, static_cast<int>(std::lround(aspect * n)));
        p.cells.push_back([=] {
          const CrossingEstimates c = crossing_probability(n, m, parse_bc(bc), b);
          return std::vector<Row>{{"crossing_vertical", n, m, bc, c.vertical, b.seed},
                                  {"crossing_horizontal", n, m, bc, c.horizontal, b.seed},
                                  {"crossing_both", n, m, bc, c.both, b.seed}};
        });
      }
    p.summarize = [bcs](const std::vector<std::vector<Row>>& rows) {
      json s = {{"kind", "crossing"}};
      for (std::size_t k = 0; k < bcs.size(); ++k) {
        std::vector<Estimate> v;
        for (std::size_t c = k; c < rows.size(); c += bcs.size()) v.push_back(rows[c][0].est);
        double lo = 1.0, hi = 0.0;
        for (const Estimate& e : v) lo = std::min(lo, e.mean), hi = std::max(hi, e.mean);
        s["vertical"][bcs[k]] = {{"min", lo}, {"max", hi}, {"max_downward_drift_z", max_downward_z(v)}};
      }
      return s;
    };
  } else if (kind == "duality") {
    for (int n : int_list(x, "sizes")) {
      const McBudget bp = budget(p.cells.size());
      p.cells.push_back([=] {
        return std::vector<Row>{{"duality_primal", n, n, "free", crossing_probability(n, n, BcKind::free, bp).vertical,
                                 bp.seed}};
      });
      const McBudget bd = budget(p.cells.size());
      p.cells.push_back([=] {
        return std::vector<Row>{{"duality_dual", n, n, "wired", dual_crossing_probability(n, n, bd), bd.seed}};
      });
    }
    p.summarize = [](const std::vector<std::vector<Row>>& rows) {
      json s = {{"kind", "duality"}, {"sizes", json::array()}};
      for (std::size_t c = 0; c + 1 < rows.size(); c += 2) {
        const Estimate& a = rows[c][0].est;
        const Estimate& b = rows[c + 1][0].est;
        const double se = combined_se(a, b);
        s["sizes"].push_back({{"n", rows[c][0].n}, {"sum", a.mean + b.mean}, {"se", se},
                              {"z", se > 0 ? (a.mean + b.mean - 1.0) / se : 0.0}});
      }
      return s;
    };
  } else if (kind == "circuit") {
    const double ratio = x.value("ratio", 0.5);
    const std::string bc = x.value("bc", std::string("free"));
    parse_bc(bc);
    for (int n : int_list(x, "sizes")) {
      const McBudget b = budget(p.cells.size());
      const int m = static_cast<int>(std::lround(ratio * n));
      if (m < 1 || m >= n) throw Error(ErrorCode::invalid_argument, "circuit needs 0 < m < n");
      p.cells.push_back([=] {
        const CircuitEstimates c = circuit_probability(m, n, parse_bc(bc), b);
        Estimate viol;
        viol.mean = static_cast<double>(c.implication_violations);
        viol.n_samples = c.samples;
        return std::vector<Row>{{"circuit", n, m, bc, c.circuit, b.seed},
                                {"four_crossings", n, m, bc, c.four_crossings, b.seed},
                                {"implication_violations", n, m, bc, viol, b.seed}};
      });
    }
    p.summarize = [](const std::vector<std::vector<Row>>& rows) {
      std::vector<Estimate> v;
      double viol = 0.0;
      for (const auto& cell : rows) v.push_back(cell[0].est), viol += cell[2].est.mean;
      return json{{"kind", "circuit"}, {"max_downward_drift_z", max_downward_z(v)},
                  {"implication_violations", viol}};
    };
  } else if (kind == "one_arm") {
    const std::string arm = x.value("arm", std::string("half_plane"));
    if (arm != "half_plane" && arm != "plane") throw Error(ErrorCode::invalid_argument, "arm must be half_plane or plane");
    const ArmKind ak = arm == "plane" ? ArmKind::plane : ArmKind::half_plane;
    const std::vector<int> sizes = int_list(x, "sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      McBudget b = budget(0);
      b.seed = one_arm_seed(seed, i);
      const int n = sizes[i];
      p.cells.push_back([=] {
        return std::vector<Row>{{"one_arm_" + arm, n, n, arm == "plane" ? "wired" : "dobrushin",
                                 one_arm_point(ak, n, b), b.seed}};
      });
    }
    p.summarize = [arm](const std::vector<std::vector<Row>>& rows) {
      return json{{"kind", "one_arm"}, {"arm", arm}, {"fit", fit_json(scaling_of(rows))}};
    };
  } else if (kind == "two_point") {
    const std::vector<int> dists = int_list(x, "distances");
    const int box = x.value("box", 256), window = x.value("window", 32);
    const McBudget b = budget(0);
    p.cells.push_back([=] {
      const ScalingResult r = two_point(dists, box, window, b);
      std::vector<Row> rows;
      for (std::size_t i = 0; i < dists.size(); ++i) rows.push_back({"two_point", dists[i], box, "free", r.estimates[i], b.seed});
      return rows;
    });
    p.summarize = [](const std::vector<std::vector<Row>>& rows) {
      return json{{"kind", "two_point"}, {"fit", fit_json(scaling_of(rows))}};
    };
  } else if (kind == "crossing_counts") {
    const int n = x.value("n", 64), r = x.value("r", 8), k_max = x.value("k_max", 4);
    const McBudget b = budget(0);
    auto result = std::make_shared<CrossingCounts>();
    p.cells.push_back([=] {
      *result = crossing_counts(n, r, k_max, b);
      std::vector<Row> rows;
      for (int k = 0; k <= k_max; ++k) rows.push_back({"crossing_count", n, k, "dobrushin", result->p[k], b.seed});
      return rows;
    });
    p.summarize = [result, r](const std::vector<std::vector<Row>>&) {
      return json{{"kind", "crossing_counts"}, {"r", r},  {"slope", result->slope},
                  {"r_squared", result->r_squared}, {"decreasing", result->decreasing}};
    };
  } else if (kind == "hm_scaling") {
    const std::string family = x.value("family", std::string());
    const std::vector<int> sizes = int_list(x, "sizes");
    auto result = std::make_shared<ScalingProbe>();
    p.cells.push_back([=] {
      *result = hm_scaling_probe(family, sizes, layer_rate);
      std::vector<Row> rows;
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        Estimate e;
        e.mean = result->values[i];
        rows.push_back({"hm_" + family, sizes[i], 0, "dobrushin", e, 0});
      }
      return rows;
    });
    p.summarize = [result](const std::vector<std::vector<Row>>&) {
      return json{{"kind", "hm_scaling"},
                  {"family", result->family},
                  {"exponent", result->fit.exponent},
                  {"stderr", result->fit.stderr_},
                  {"r_squared", result->fit.r_squared},
                  {"max_residual", result->max_residual}};
    };
  } else if (kind == "boundary_onepoint" || kind == "boundary_pair") {
    const double beta = x.value("beta", 1.0);
    const int px = x.value("x", 0), py = x.value(kind == "boundary_pair" ? "y" : "u", 0);
    for (int n : int_list(x, "sizes")) {
      const McBudget b = budget(p.cells.size());
      p.cells.push_back([=] {
        const Estimate e = kind == "boundary_pair" ? boundary_pair(n, beta, px, py, b)
                                                   : boundary_onepoint(n, beta, px, py, b);
        return std::vector<Row>{{kind, n, 0, kind == "boundary_pair" ? "dobrushin" : "free", e, b.seed}};
      });
    }
    p.summarize = [kind](const std::vector<std::vector<Row>>& rows) {
      json s = {{"kind", kind}};
      if (rows.size() >= 3) s["fit"] = fit_json(scaling_of(rows));
      return s;
    };
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown experiment kind '" + kind + "'");
  }
  return p;
}

int experiment(Context& ctx) {
  if (!ctx.spec.contains("experiments") || !ctx.spec["experiments"].is_array())
    throw Error(ErrorCode::invalid_argument, "spec needs an 'experiments' list");
  const json defaults = ctx.spec.value("budget", json::object());
  const double rate = ctx.cfg.layer_rate.value_or(ctx.spec.value("layer_rate", kLayerRateFromWeights));
  std::vector<Plan> plans;
  std::vector<std::pair<int, int>> cells;  // (plan, cell)
  for (std::size_t e = 0; e < ctx.spec["experiments"].size(); ++e) {
    plans.push_back(plan_experiment(ctx.spec["experiments"][e], defaults, chain_seed(ctx.cfg.seed, e), rate));
    for (std::size_t c = 0; c < plans.back().cells.size(); ++c) cells.push_back({static_cast<int>(e), static_cast<int>(c)});
  }
  std::vector<std::vector<std::vector<Row>>> rows(plans.size());
  for (std::size_t e = 0; e < plans.size(); ++e) rows[e].resize(plans[e].cells.size());
  parallel_for(static_cast<int>(cells.size()), ctx.cfg.threads, [&](int i) {
    const auto [e, c] = cells[i];
    rows[e][c] = plans[e].cells[c]();
  });
  std::ofstream f = open_out(ctx, "experiment.csv");
  CsvWriter csv(f, ctx.manifest, kRowColumns);
  json summary = json::array();
  for (std::size_t e = 0; e < plans.size(); ++e) {
    for (const auto& cell : rows[e])
      for (const Row& r : cell) write_row(csv, r);
    summary.push_back(plans[e].summarize(rows[e]));
  }
  write_json(ctx, "summary.json", {{"experiments", summary}});
  ctx.log << cells.size() << " cells in " << plans.size() << " experiments\n";
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    if (cfg.threads < 1) throw Error(ErrorCode::invalid_argument, "threads must be at least 1");
    std::string raw;
    Context ctx{cfg, log, read_json_file(cfg.spec_path, &raw), {}, cfg.out_dir};
    check_version(ctx.spec);
    ctx.manifest = {hex64(fnv1a(raw)), cfg.seed, cfg.command};
    std::filesystem::create_directories(ctx.out);
    if (cfg.command == "verify-observable") return verify(ctx, false);
    if (cfg.command == "verify-harmonic") return verify(ctx, true);
    if (cfg.command == "enumerate") return enumerate(ctx);
    if (cfg.command == "sample") return sample(ctx);
    if (cfg.command == "experiment") return experiment(ctx);
    throw Error(ErrorCode::invalid_argument, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    err << "fklab: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "fklab: spec: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fklab: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace fklab
