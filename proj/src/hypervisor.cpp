#include "embedsim/hypervisor.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <utility>

#include "embedsim/errors.hpp"

namespace embedsim {

Mode mode_at(int round, const Scenario& scenario) {
  return round >= scenario.emergency_start && round < scenario.emergency_end
             ? Mode::emergency
             : Mode::normal;
}

void validate_scenario(const Scenario& scenario) {
  if (scenario.schema != 1)
    throw ValidationError("schema", "unsupported schema version");
  if (scenario.freq_dim < 1)
    throw ValidationError("substrate.F", "must be at least 1");
  if (scenario.time_dim < 1)
    throw ValidationError("substrate.T", "must be at least 1");
  if (scenario.horizon < 0)
    throw ValidationError("horizon", "must be nonnegative");
  if (scenario.emergency_start < 0)
    throw ValidationError("emergency.start", "must be nonnegative");
  if (scenario.emergency_end < scenario.emergency_start)
    throw ValidationError("emergency.end", "must not precede emergency.start");
  if (scenario.emergency_end > scenario.horizon)
    throw ValidationError("emergency.end", "must not exceed horizon");

  const int cells = scenario.freq_dim * scenario.time_dim;
  for (ServiceKind s : all_services) {
    const ServiceSpec& spec = scenario.service(s);
    const std::string base = std::string("services[") + to_string(s) + "]";
    if (spec.kind != s)
      throw ValidationError(base + ".kind", "stored under the wrong slot");
    if (!(spec.mean_duration >= 1.0))
      throw ValidationError(base + ".mean_duration", "must be at least 1");
    if (spec.size_min < 1)
      throw ValidationError(base + ".size_min", "must be at least 1");
    if (spec.size_max < spec.size_min)
      throw ValidationError(base + ".size_max", "must be >= size_min");
    if (spec.size_max > cells)
      throw ValidationError(base + ".size_max",
                            "exceeds substrate capacity of " +
                                std::to_string(cells) + " blocks");
    if (spec.max_delay < 1)
      throw ValidationError(base + ".max_delay", "must be at least 1");
  }

  for (Operator op : all_operators) {
    const std::string& name = scenario.name_of(op);
    const std::string base =
        "operators[" + std::to_string(index_of(op)) + "].name";
    if (name.empty()) throw ValidationError(base, "must not be empty");
    for (char c : name) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '_' || c == '-';
      if (!ok)
        throw ValidationError(base,
                              "may contain only letters, digits, '_', '-'");
    }
    for (ServiceKind s : all_services) {
      for (Mode m : {Mode::normal, Mode::emergency}) {
        const double lambda = scenario.rates.get(m, op, s);
        if (!(lambda >= 0.0) || !(lambda < 1e9))
          throw ValidationError("operators[" + scenario.name_of(op) +
                                    "].rates." + to_string(s) + "." +
                                    to_string(m),
                                "must be a nonnegative rate");
      }
    }
  }
  if (scenario.operator_names[0] == scenario.operator_names[1])
    throw ValidationError("operators", "operator names must be distinct");

  for (ServiceKind s : all_services) {
    if (scenario.policy.level(Mode::normal, Operator::ps, s) !=
        scenario.policy.level(Mode::normal, Operator::commercial, s))
      throw ValidationError(
          std::string("policy.normal.") + to_string(s),
          "normal mode must rank both operators equally per service");
  }
  int ps_min = 1 << 30, comm_max = -(1 << 30);
  for (ServiceKind s : all_services) {
    ps_min = std::min(
        ps_min, scenario.policy.level(Mode::emergency, Operator::ps, s));
    comm_max = std::max(comm_max, scenario.policy.level(
                                      Mode::emergency, Operator::commercial, s));
  }
  if (ps_min <= comm_max)
    throw ValidationError("policy.emergency",
                          "every PS level must exceed every commercial level");

  if (scenario.smoothing_window < 1)
    throw ValidationError("smoothing_window", "must be at least 1");
  if (scenario.algorithm == EngineKind::oracle && cells > 36)
    throw ValidationError("algorithm",
                          "oracle engine is limited to 36 substrate cells");
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::arrive:
      return "arrive";
    case EventKind::embed:
      return "embed";
    case EventKind::defer:
      return "defer";
    case EventKind::reject:
      return "reject";
    case EventKind::preempt:
      return "preempt";
    case EventKind::expire:
      return "expire";
  }
  return "?";
}

SimState::SimState(Scenario sc, std::uint64_t seed)
    : scenario(std::move(sc)),
      substrate(scenario.freq_dim, scenario.time_dim,
                EdiOptions{scenario.options.edi_counts_border}),
      rng(seed) {}

namespace {

long long mass_of(const VRR& v) {
  return static_cast<long long>(v.prbs) * v.duration;
}

void emit(std::vector<Event>* events, int round, const VRR& v, EventKind kind,
          int rounds, std::optional<Rect> rect = std::nullopt) {
  if (!events) return;
  events->push_back(
      {round, v.id, v.owner, v.service, kind, v.prbs, rounds, rect});
}

}  // namespace

RoundMetrics step(SimState& state, std::vector<Event>* events) {
  const Scenario& sc = state.scenario;
  RoundMetrics rm;
  rm.round = state.round;
  rm.substrate_cells = sc.freq_dim * sc.time_dim;
  state.mode = mode_at(state.round, sc);
  rm.mode = state.mode;

  for (VRR& v :
       generate_round(sc, state.round, state.mode, state.rng, state.next_id)) {
    rm.at(v.owner, v.service).generated_mass += mass_of(v);
    emit(events, state.round, v, EventKind::arrive, v.duration);
    state.buffer.push_back(std::move(v));
  }

  const bool all_eligible =
      sc.options.arrival_eligibility == ArrivalEligibility::same_round;
  std::vector<VRR> eligible;
  eligible.reserve(state.buffer.size());
  for (const VRR& v : state.buffer)
    if (all_eligible || v.arrival_round < state.round) eligible.push_back(v);
  EmbedQueue queue = order_queue(eligible, state.mode, sc.policy);

  EmbedQueue actives;
  if (sc.algorithm != EngineKind::static_km) {
    actives.reserve(state.active.size());
    for (const auto& [id, as] : state.active)
      actives.push_back({as.vrr,
                         priority_of(as.vrr.owner, as.vrr.service, state.mode,
                                     sc.policy),
                         true, as.remaining});
  }

  std::vector<EmbedDecision> decisions;
  switch (sc.algorithm) {
    case EngineKind::static_km:
      decisions = embed_static(state.substrate, queue);
      break;
    case EngineKind::dynamic_km: {
      auto result = embed_dynamic(actives, queue, sc.freq_dim, sc.time_dim,
                                  state.substrate.edi_options());
      state.substrate = std::move(result.substrate);
      decisions = std::move(result.decisions);
      break;
    }
    case EngineKind::oracle: {
      EmbedQueue merged = actives;
      merged.insert(merged.end(), queue.begin(), queue.end());
      decisions = embed_oracle(merged, sc.freq_dim, sc.time_dim);
      Substrate fresh(sc.freq_dim, sc.time_dim,
                      state.substrate.edi_options());
      for (const EmbedDecision& d : decisions)
        if (d.outcome == Outcome::embedded) fresh.place(*d.rect, d.vrr_id);
      state.substrate = std::move(fresh);
      break;
    }
  }

  std::set<std::uint64_t> embedded_ids;
  for (const EmbedDecision& d : decisions) {
    auto it = state.active.find(d.vrr_id);
    if (it != state.active.end()) {
      if (d.outcome == Outcome::embedded) continue;
      // Re-embedding failed: the unserved remainder counts as rejected.
      const VRR& v = it->second.vrr;
      const long long remainder =
          static_cast<long long>(v.prbs) * it->second.remaining;
      KeyStats& ks = rm.at(v.owner, v.service);
      ks.rejected_mass += remainder;
      ks.resolved_mass += remainder;
      rm.preempted_mass += remainder;
      rm.preempted_count += 1;
      emit(events, state.round, v, EventKind::preempt, it->second.remaining);
      state.active.erase(it);
      continue;
    }
    // New request out of the buffer.
    auto buf = std::find_if(state.buffer.begin(), state.buffer.end(),
                            [&](const VRR& v) { return v.id == d.vrr_id; });
    const VRR& v = *buf;
    if (d.outcome == Outcome::embedded) {
      rm.at(v.owner, v.service).resolved_mass += mass_of(v);
      rm.accepted_weighted_area +=
          static_cast<long long>(
              priority_of(v.owner, v.service, state.mode, sc.policy)) *
          d.rect->area();
      emit(events, state.round, v, EventKind::embed, v.duration, d.rect);
      embedded_ids.insert(v.id);
      state.active.emplace(v.id, ActiveService{*buf, v.duration});
    } else {
      emit(events, state.round, v, EventKind::defer, v.duration);
    }
  }

  std::vector<VRR> still_buffered;
  still_buffered.reserve(state.buffer.size());
  for (VRR& v : state.buffer) {
    if (embedded_ids.count(v.id)) continue;
    const bool attempted = all_eligible || v.arrival_round < state.round;
    if (!attempted) {
      still_buffered.push_back(std::move(v));
      continue;
    }
    const int max_delay = sc.service(v.service).max_delay;
    if (v.waited >= max_delay) {
      KeyStats& ks = rm.at(v.owner, v.service);
      ks.rejected_mass += mass_of(v);
      ks.resolved_mass += mass_of(v);
      emit(events, state.round, v, EventKind::reject, v.duration);
    } else {
      v.waited += 1;
      still_buffered.push_back(std::move(v));
    }
  }
  state.buffer = std::move(still_buffered);

  std::map<std::uint64_t, std::pair<Operator, ServiceKind>> owners;
  for (const auto& [id, as] : state.active)
    owners.emplace(id, std::make_pair(as.vrr.owner, as.vrr.service));
  const OccupancySplit split = occupancy_split(state.substrate, owners);
  for (Operator op : all_operators)
    for (ServiceKind s : all_services)
      rm.at(op, s).occupied_cells = split.cells[index_of(op)][index_of(s)];
  rm.total_occupied_cells = split.total_cells;

  for (const VRR& v : state.buffer) rm.at(v.owner, v.service).buffer_depth += 1;

  for (auto it = state.active.begin(); it != state.active.end();) {
    if (--it->second.remaining == 0) {
      const VRR& v = it->second.vrr;
      emit(events, state.round, v, EventKind::expire, v.duration,
           state.substrate.placement(v.id));
      state.substrate.remove(v.id);
      it = state.active.erase(it);
    } else {
      ++it;
    }
  }

  state.round += 1;
  return rm;
}

SimResult run(const Scenario& scenario, std::uint64_t seed,
              const StepObserver& observer) {
  validate_scenario(scenario);
  SimState state(scenario, seed);
  SimResult result;
  result.rounds.reserve(scenario.horizon);
  for (int i = 0; i < scenario.horizon; ++i) {
    result.rounds.push_back(step(state, &result.events));
    if (observer) observer(state, result.rounds.back());
  }
  result.summary = phase_summary(result.rounds, scenario);
  result.summary.algorithm = to_string(scenario.algorithm);
  result.summary.seed = seed;
  result.summary.smoothing_window = scenario.smoothing_window;
  for (const auto& [id, as] : state.active) {
    result.summary.still_active_count += 1;
    result.summary.still_active_remaining_mass +=
        static_cast<long long>(as.vrr.prbs) * as.remaining;
  }
  for (const VRR& v : state.buffer) {
    result.summary.still_buffered_count += 1;
    result.summary.still_buffered_mass +=
        static_cast<long long>(v.prbs) * v.duration;
  }
  return result;
}

void write_events_log(std::ostream& os, const std::vector<Event>& events,
                      const Scenario& scenario) {
  for (const Event& e : events) {
    os << e.round << ' ' << e.id << ' ' << scenario.name_of(e.owner) << ' '
       << to_string(e.service) << ' ' << to_string(e.kind) << ' ' << e.prbs
       << ' ' << e.rounds << ' ';
    if (e.rect) {
      os << e.rect->f0 << ',' << e.rect->t0 << ',' << e.rect->f << ','
         << e.rect->t;
    } else {
      os << '-';
    }
    os << '\n';
  }
}

}  // namespace embedsim
