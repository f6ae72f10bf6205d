#pragma once

// Markov chains on FK configurations: single-edge heat bath (any q >= 1) and
// Swendsen-Wang cluster moves through the Edwards-Sokal coupling (q = 2).

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fklab/fk.hpp"
#include "fklab/stats.hpp"

namespace fklab {

/// splitmix64 finalizer; used to derive independent per-chain seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain);

/// Uniform doubles in [0, 1). Tests may replace the source to bias a chain.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : eng_(seed) {}
  double operator()() {
    if (override_) return override_();
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  bool bit() { return (*this)() < 0.5; }
  void set_override(std::function<double()> f) { override_ = std::move(f); }

 private:
  std::mt19937_64 eng_;
  std::function<double()> override_;
};

enum class Dynamics { heat_bath, cluster };
std::string dynamics_name(Dynamics d);

/// Probability that an edge is open given the rest of the configuration.
double heat_bath_open_probability(bool endpoints_connected, const FKParams& params);

class Sampler {
 public:
  Sampler(const PrimalGraph& g, BoundaryCondition bc, FKParams params, std::uint64_t seed, bool start_open = false);

  const Configuration& state() const { return c_; }
  Configuration& state() { return c_; }
  const PrimalGraph& graph() const { return *g_; }
  UniformSource& rng() { return rng_; }

  /// Resamples edge e from its conditional law.
  void heat_bath_step(int e);
  /// One heat-bath update of every edge in index order.
  void heat_bath_sweep();
  /// One Swendsen-Wang move. Throws Error(q_unsupported) unless q == 2.
  void cluster_step();
  void sweep(Dynamics d) { d == Dynamics::cluster ? cluster_step() : heat_bath_sweep(); }

  /// Whether the endpoints of e are joined in ω ∪ ξ without e.
  bool connected_off(int e);

 private:
  const PrimalGraph* g_;
  BoundaryCondition bc_;
  FKParams params_;
  Configuration c_;
  UniformSource rng_;
  // scratch
  ClusterScratch clusters_;
  std::vector<std::int32_t> eu_, ev_, spin_, root_spin_;
  std::vector<double> unif_;
  std::vector<int> stamp_, queue_;
  std::vector<char> block_seen_;
  int epoch_ = 0;
};

using Functional = std::function<double(const Configuration&)>;
/// Writes `outputs` values per measurement; must be safe to call from
/// several chains at once (keep scratch thread_local).
using MultiFunctional = std::function<void(const Configuration&, std::span<double>)>;

struct ChainSpec {
  const PrimalGraph* graph = nullptr;
  BoundaryCondition bc;
  FKParams params = critical_ising();
  Dynamics dynamics = Dynamics::cluster;
  int burn_in_sweeps = -1;  // -1: 10 x estimated autocorrelation time, at least 100
  int sweeps = 1000;
  int thin = 1;
  int chains = 1;
  std::uint64_t seed = 1;
  bool start_open = false;
  /// Called on every sampler before burn-in (tests use it to bias the RNG).
  std::function<void(Sampler&)> configure;
};

/// Burn-in length actually used for `spec` given a pilot series.
int auto_burn_in(std::span<const double> pilot);

/// One Estimate per functional. Chains run on separate threads with seeds
/// chain_seed(spec.seed, k); the result does not depend on scheduling.
std::vector<Estimate> run_chain(const ChainSpec& spec, const std::vector<Functional>& functionals);
std::vector<Estimate> run_chain(const ChainSpec& spec, int outputs, const MultiFunctional& f);

/// Raw per-measurement values of one chain, [measurement][functional].
std::vector<std::vector<double>> sample_series(const ChainSpec& spec, const std::vector<Functional>& functionals,
                                               int chain = 0);

struct ValidationRow {
  std::string name;
  double exact = 0.0;
  Estimate mc;
  double z = 0.0;  // |mc - exact| / se
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double max_z = 0.0;
  bool pass = false;
};

/// Compares MC edge marginals and the vertical-crossing probability with
/// exhaustive enumeration. Rows with zero SE count as passing only when the
/// deviation is below 1e-12.
ValidationReport validate_against_exact(const ChainSpec& spec, double tolerance_sigmas = 4.0);

}  // namespace fklab
