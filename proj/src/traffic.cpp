#include "embedsim/traffic.hpp"

#include <cmath>

namespace embedsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& engine : engines_) engine.seed(splitmix64(state));
}

int arrivals(double lambda, std::mt19937_64& eng) {
  if (lambda <= 0.0) return 0;
  return std::poisson_distribution<int>(lambda)(eng);
}

VRR sample_vrr(Operator owner, const ServiceSpec& spec, int round,
               const Scenario& scenario, Rng& rng, std::uint64_t id) {
  VRR v;
  v.id = id;
  v.owner = owner;
  v.service = spec.kind;
  v.prbs = std::uniform_int_distribution<int>(
      spec.size_min, spec.size_max)(rng.stream(owner, spec.kind,
                                               StreamPurpose::size));
  v.shapes = shape_candidates(v.prbs, scenario.freq_dim, scenario.time_dim);
  double raw = spec.mean_duration;
  if (scenario.options.duration_model == DurationModel::exponential) {
    raw = std::exponential_distribution<double>(1.0 / spec.mean_duration)(
        rng.stream(owner, spec.kind, StreamPurpose::duration));
  }
  v.duration = std::max(1, static_cast<int>(std::lround(raw)));
  v.arrival_round = round;
  v.waited = 0;
  return v;
}

std::vector<VRR> generate_round(const Scenario& scenario, int round,
                                Mode mode, Rng& rng, std::uint64_t& next_id) {
  std::vector<VRR> out;
  for (Operator op : all_operators) {
    for (ServiceKind s : all_services) {
      const double lambda = scenario.rates.get(mode, op, s);
      const int n =
          arrivals(lambda, rng.stream(op, s, StreamPurpose::arrivals));
      for (int i = 0; i < n; ++i)
        out.push_back(
            sample_vrr(op, scenario.service(s), round, scenario, rng,
                       next_id++));
    }
  }
  return out;
}

}  // namespace embedsim
