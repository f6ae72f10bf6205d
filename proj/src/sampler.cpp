#include "fklab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "fklab/error.hpp"
#include "fklab/kernels.hpp"

namespace fklab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain) {
  return splitmix64(splitmix64(master) ^ (chain * 0xd1b54a32d192ed03ULL));
}

std::string dynamics_name(Dynamics d) { return d == Dynamics::cluster ? "cluster" : "heat_bath"; }

double heat_bath_open_probability(bool endpoints_connected, const FKParams& params) {
  const double p = params.p, q = params.q;
  if (endpoints_connected) return p;
  return p / (p + q * (1.0 - p));
}

Sampler::Sampler(const PrimalGraph& g, BoundaryCondition bc, FKParams params, std::uint64_t seed, bool start_open)
    : g_(&g), bc_(std::move(bc)), params_(params), c_(g.edge_count(), start_open), rng_(seed) {
  params_.validate();
  if (bc_.site_count() != g.site_count())
    throw Error(ErrorCode::invalid_argument, "boundary condition does not match the graph");
  eu_.reserve(g.edge_count());
  ev_.reserve(g.edge_count());
  for (const PrimalEdge& e : g.edges()) {
    eu_.push_back(e.u);
    ev_.push_back(e.v);
  }
  spin_.resize(g.site_count());
  unif_.resize(g.edge_count());
  stamp_.assign(g.site_count(), 0);
  block_seen_.assign(bc_.block_count(), 0);
}

bool Sampler::connected_off(int e) {
  const int u = eu_[e], v = ev_[e];
  if (bc_.block_of(u) >= 0 && bc_.block_of(u) == bc_.block_of(v)) return true;
  // BFS over ω ∪ ξ from u, stopping at v.
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::fill(block_seen_.begin(), block_seen_.end(), 0);
  queue_.clear();
  auto visit = [&](int s) {
    if (stamp_[s] == epoch_) return;
    stamp_[s] = epoch_;
    queue_.push_back(s);
  };
  visit(u);
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const int s = queue_[head];
    if (s == v) return true;
    const int b = bc_.block_of(s);
    if (b >= 0 && !block_seen_[b]) {
      block_seen_[b] = 1;
      for (int t : bc_.blocks()[b]) visit(t);
    }
    for (int d = 0; d < 4; ++d) {
      const int f = g_->edge_toward(s, d);
      if (f < 0 || f == e || !c_.open(f)) continue;
      visit(eu_[f] == s ? ev_[f] : eu_[f]);
    }
  }
  return false;
}

void Sampler::heat_bath_step(int e) {
  const double pr = heat_bath_open_probability(connected_off(e), params_);
  c_.set(e, rng_() < pr);
}

void Sampler::heat_bath_sweep() {
  for (int e = 0; e < g_->edge_count(); ++e) heat_bath_step(e);
}

void Sampler::cluster_step() {
  if (std::abs(params_.q - 2.0) > 1e-12) throw Error(ErrorCode::q_unsupported, "cluster dynamics needs q = 2");
  clusters_.build(*g_, c_, bc_);
  root_spin_.assign(clusters_.uf().size(), -1);
  for (int s = 0; s < g_->site_count(); ++s) {
    const int r = clusters_.root(s);
    if (root_spin_[r] < 0) root_spin_[r] = rng_.bit() ? 1 : 0;
    spin_[s] = root_spin_[r];
  }
  for (double& x : unif_) x = rng_();
  kernels::bond_mask(spin_, eu_, ev_, unif_, params_.p, c_.bits());
}

int auto_burn_in(std::span<const double> pilot) {
  const Estimate e = batch_means(pilot);
  return std::max(100, static_cast<int>(std::ceil(10.0 * e.autocorr_time)));
}

namespace {

std::vector<std::vector<double>> run_one(const ChainSpec& spec, int outputs, const MultiFunctional& f, int chain) {
  if (spec.graph == nullptr) throw Error(ErrorCode::invalid_argument, "chain has no graph");
  if (spec.sweeps < 1 || spec.thin < 1) throw Error(ErrorCode::invalid_argument, "sweeps and thin must be >= 1");
  Sampler s(*spec.graph, spec.bc, spec.params, chain_seed(spec.seed, static_cast<std::uint64_t>(chain)),
            spec.start_open);
  if (spec.configure) spec.configure(s);
  std::vector<double> row(static_cast<std::size_t>(outputs));
  int burn = spec.burn_in_sweeps;
  if (burn < 0) {
    // Pilot run on the first output; its sweeps count towards burn-in.
    const int pilot_len = 200;
    std::vector<double> pilot;
    pilot.reserve(pilot_len);
    for (int k = 0; k < pilot_len; ++k) {
      s.sweep(spec.dynamics);
      if (outputs > 0) f(s.state(), row);
      pilot.push_back(outputs > 0 ? row[0] : 0.0);
    }
    burn = std::max(0, auto_burn_in(pilot) - pilot_len);
  }
  for (int k = 0; k < burn; ++k) s.sweep(spec.dynamics);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(spec.sweeps / spec.thin));
  for (int k = 1; k <= spec.sweeps; ++k) {
    s.sweep(spec.dynamics);
    if (k % spec.thin != 0) continue;
    f(s.state(), row);
    out.push_back(row);
  }
  return out;
}

MultiFunctional pack(const std::vector<Functional>& fs) {
  return [&fs](const Configuration& c, std::span<double> out) {
    for (std::size_t j = 0; j < fs.size(); ++j) out[j] = fs[j](c);
  };
}

}  // namespace

std::vector<std::vector<double>> sample_series(const ChainSpec& spec, const std::vector<Functional>& functionals,
                                               int chain) {
  return run_one(spec, static_cast<int>(functionals.size()), pack(functionals), chain);
}

std::vector<Estimate> run_chain(const ChainSpec& spec, const std::vector<Functional>& functionals) {
  return run_chain(spec, static_cast<int>(functionals.size()), pack(functionals));
}

std::vector<Estimate> run_chain(const ChainSpec& spec, int outputs, const MultiFunctional& f) {
  const int nc = std::max(1, spec.chains);
  std::vector<std::vector<std::vector<double>>> series(nc);
  if (nc == 1) {
    series[0] = run_one(spec, outputs, f, 0);
  } else {
    std::vector<std::exception_ptr> errors(nc);
    std::vector<std::thread> threads;
    for (int k = 0; k < nc; ++k)
      threads.emplace_back([&, k] {
        try {
          series[k] = run_one(spec, outputs, f, k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<Estimate> out(static_cast<std::size_t>(outputs));
  for (int j = 0; j < outputs; ++j) {
    double mean = 0.0, var = 0.0, tau = 0.0;
    long long n = 0;
    for (int k = 0; k < nc; ++k) {
      std::vector<double> xs;
      xs.reserve(series[k].size());
      for (const auto& row : series[k]) xs.push_back(row[j]);
      const Estimate e = batch_means(xs);
      mean += e.mean;
      var += e.std_error * e.std_error;
      tau += e.autocorr_time;
      n += e.n_samples;
    }
    out[j].mean = mean / nc;
    out[j].std_error = std::sqrt(var) / nc;
    out[j].autocorr_time = tau / nc;
    out[j].n_samples = n;
  }
  return out;
}

ValidationReport validate_against_exact(const ChainSpec& spec, double tolerance_sigmas) {
  const PrimalGraph& g = *spec.graph;
  const ExactMeasure mu = enumerate_measure(g, spec.bc, spec.params);
  const std::vector<double> marg = edge_marginals(mu);
  const Event crossing = [&g](const Configuration& c) {
    thread_local UnionFind uf;
    return vertical_crossing(g, c, uf);
  };
  const double p_cross = event_probability(mu, crossing);

  std::vector<Functional> fs;
  std::vector<std::string> names;
  std::vector<double> exact;
  for (int e = 0; e < g.edge_count(); ++e) {
    fs.push_back([e](const Configuration& c) { return c.open(e) ? 1.0 : 0.0; });
    names.push_back("edge " + std::to_string(e));
    exact.push_back(marg[e]);
  }
  fs.push_back([crossing](const Configuration& c) { return crossing(c) ? 1.0 : 0.0; });
  names.push_back("vertical crossing");
  exact.push_back(p_cross);

  const auto est = run_chain(spec, fs);
  ValidationReport r;
  r.pass = true;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    ValidationRow row{names[j], exact[j], est[j], 0.0};
    const double dev = std::abs(est[j].mean - exact[j]);
    if (est[j].std_error > 0.0) {
      row.z = dev / est[j].std_error;
      if (row.z >= tolerance_sigmas) r.pass = false;
    } else {
      row.z = dev < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
      if (dev >= 1e-12) r.pass = false;
    }
    r.max_z = std::max(r.max_z, row.z);
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace fklab
