#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "embedsim/embedder.hpp"
#include "embedsim/metrics.hpp"
#include "embedsim/traffic.hpp"

namespace embedsim {

// Emergency operation within [emergency_start, emergency_end).
Mode mode_at(int round, const Scenario& scenario);

// Domain-level validity checks shared by the file loader and run().
// Throws ValidationError naming the offending field.
void validate_scenario(const Scenario& scenario);

struct ActiveService {
  VRR vrr;
  int remaining = 0;
};

enum class EventKind { arrive, embed, defer, reject, preempt, expire };
const char* to_string(EventKind k);

// One line of the audit trail. `rounds` is the full duration except for
// preempt events, where it is the unserved remainder.
struct Event {
  int round = 0;
  std::uint64_t id = 0;
  Operator owner = Operator::ps;
  ServiceKind service = ServiceKind::voice;
  EventKind kind = EventKind::arrive;
  int prbs = 0;
  int rounds = 0;
  std::optional<Rect> rect;
};

struct SimState {
  Scenario scenario;
  Substrate substrate;
  std::vector<VRR> buffer;
  std::map<std::uint64_t, ActiveService> active;
  Rng rng;
  std::uint64_t next_id = 1;
  int round = 0;
  Mode mode = Mode::normal;

  SimState(Scenario sc, std::uint64_t seed);
};

// Executes one allocation round: arrivals, queueing, the configured
// engine, buffer aging, the occupancy snapshot, then expiry.
RoundMetrics step(SimState& state, std::vector<Event>* events);

struct SimResult {
  std::vector<RoundMetrics> rounds;
  std::vector<Event> events;
  Summary summary;
};

// Called after every step with the post-round state and its metrics.
using StepObserver =
    std::function<void(const SimState&, const RoundMetrics&)>;

SimResult run(const Scenario& scenario, std::uint64_t seed,
              const StepObserver& observer = {});

void write_events_log(std::ostream& os, const std::vector<Event>& events,
                      const Scenario& scenario);

}  // namespace embedsim
