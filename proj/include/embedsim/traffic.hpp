#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "embedsim/scenario.hpp"

namespace embedsim {

enum class StreamPurpose { arrivals, size, duration };

// Deterministic random streams, one per (operator, service, purpose), all
// derived from a single 64-bit seed. Separate streams keep the workload
// of one service reproducible when another service's rate changes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::mt19937_64& stream(Operator op, ServiceKind s, StreamPurpose p) {
    return engines_[(index_of(op) * 3 + index_of(s)) * 3 +
                    static_cast<int>(p)];
  }

 private:
  std::array<std::mt19937_64, 18> engines_;
};

// Poisson-distributed arrival count with mean lambda.
int arrivals(double lambda, std::mt19937_64& eng);

// Draws size and duration for one request and shapes it for the
// substrate. r ~ U{size_min..size_max}; d = max(1, lround(Exp(mu))) under
// the exponential model, max(1, lround(mu)) under the fixed model.
VRR sample_vrr(Operator owner, const ServiceSpec& spec, int round,
               const Scenario& scenario, Rng& rng, std::uint64_t id);

// All arrivals of one round, enumerated operator-major (PS first), then
// voice, video, msg. Ids are assigned sequentially from next_id.
std::vector<VRR> generate_round(const Scenario& scenario, int round,
                                Mode mode, Rng& rng, std::uint64_t& next_id);

}  // namespace embedsim
