#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "doctest.h"
#include "embedsim/errors.hpp"
#include "embedsim/hypervisor.hpp"

using namespace embedsim;

namespace {

Scenario quiet_scenario(EngineKind algorithm, int horizon = 8) {
  Scenario sc = Scenario::paper_defaults();
  sc.algorithm = algorithm;
  sc.horizon = horizon;
  sc.emergency_start = horizon;
  sc.emergency_end = horizon;
  for (Mode m : {Mode::normal, Mode::emergency})
    for (Operator op : all_operators)
      for (ServiceKind s : all_services) sc.rates.set(m, op, s, 0.0);
  return sc;
}

VRR make_vrr(std::uint64_t id, Operator op, ServiceKind s, int prbs,
             int duration, int arrival, const Scenario& sc) {
  VRR v;
  v.id = id;
  v.owner = op;
  v.service = s;
  v.prbs = prbs;
  v.shapes = shape_candidates(prbs, sc.freq_dim, sc.time_dim);
  v.duration = duration;
  v.arrival_round = arrival;
  return v;
}

long long event_mass(const Event& e) {
  return static_cast<long long>(e.prbs) * e.rounds;
}

}  // namespace

TEST_CASE("mode switches on the half-open emergency window") {
  const Scenario sc = Scenario::paper_defaults();
  CHECK(mode_at(0, sc) == Mode::normal);
  CHECK(mode_at(299, sc) == Mode::normal);
  CHECK(mode_at(300, sc) == Mode::emergency);
  CHECK(mode_at(699, sc) == Mode::emergency);
  CHECK(mode_at(700, sc) == Mode::normal);
}

TEST_CASE("scenario validation pinpoints the offending field") {
  auto field_of = [](const Scenario& sc) {
    try {
      validate_scenario(sc);
    } catch (const ValidationError& e) {
      return std::string(e.field());
    }
    return std::string();
  };

  Scenario ok = Scenario::paper_defaults();
  CHECK_NOTHROW(validate_scenario(ok));

  Scenario sc = ok;
  sc.freq_dim = 0;
  CHECK(field_of(sc) == "substrate.F");

  sc = ok;
  sc.emergency_end = sc.emergency_start - 1;
  CHECK(field_of(sc) == "emergency.end");

  sc = ok;
  sc.emergency_end = sc.horizon + 1;
  CHECK(field_of(sc) == "emergency.end");

  sc = ok;
  sc.services[1].size_max = 401;
  CHECK(field_of(sc) == "services[video].size_max");

  sc = ok;
  sc.services[0].max_delay = 0;
  CHECK(field_of(sc) == "services[voice].max_delay");

  sc = ok;
  sc.rates.set(Mode::emergency, Operator::commercial, ServiceKind::msg, -0.1);
  CHECK(field_of(sc) == "operators[commercial].rates.msg.emergency");

  sc = ok;
  sc.operator_names[1] = sc.operator_names[0];
  CHECK(field_of(sc) == "operators");

  sc = ok;
  sc.operator_names[0] = "public safety";
  CHECK(field_of(sc) == "operators[0].name");

  sc = ok;
  sc.policy.set_level(Mode::normal, Operator::commercial, ServiceKind::voice,
                      5);
  CHECK(field_of(sc) == "policy.normal.voice");

  sc = ok;
  sc.policy.set_level(Mode::emergency, Operator::ps, ServiceKind::msg, 3);
  CHECK(field_of(sc) == "policy.emergency");

  sc = ok;
  sc.smoothing_window = 0;
  CHECK(field_of(sc) == "smoothing_window");

  sc = ok;
  sc.algorithm = EngineKind::oracle;
  CHECK(field_of(sc) == "algorithm");

  sc = ok;
  sc.algorithm = EngineKind::oracle;
  sc.freq_dim = 6;
  sc.time_dim = 6;
  sc.services[1].size_max = 25;
  sc.services[2].size_max = 8;
  CHECK_NOTHROW(validate_scenario(sc));

  sc = ok;
  sc.horizon = -1;
  CHECK_THROWS_AS(run(sc, 1), ValidationError);
}

TEST_CASE("a silent scenario produces all-zero rounds") {
  const Scenario sc = quiet_scenario(EngineKind::dynamic_km, 5);
  const SimResult result = run(sc, 11);
  REQUIRE(result.rounds.size() == 5);
  for (const RoundMetrics& rm : result.rounds) {
    CHECK(rm.total_occupied_cells == 0);
    CHECK(rm.substrate_cells == 400);
    for (Operator op : all_operators)
      for (ServiceKind s : all_services) CHECK(rm.at(op, s) == KeyStats{});
  }
  CHECK(result.events.empty());
  CHECK(result.summary.still_active_count == 0);
  CHECK(result.summary.still_buffered_count == 0);
  CHECK(result.summary.phase(Phase::pre).rounds == 5);
  CHECK(result.summary.phase(Phase::emergency).rounds == 0);
}

TEST_CASE("a zero horizon yields an empty but valid result") {
  const Scenario sc = quiet_scenario(EngineKind::static_km, 0);
  const SimResult result = run(sc, 1);
  CHECK(result.rounds.empty());
  CHECK(result.events.empty());
  for (Phase p : all_phases) CHECK(result.summary.phase(p).rounds == 0);
}

TEST_CASE("a substrate-filling request embeds and expires on schedule") {
  const Scenario sc = quiet_scenario(EngineKind::static_km, 4);
  SimState state(sc, 3);
  std::vector<Event> events;

  state.buffer.push_back(
      make_vrr(1, Operator::ps, ServiceKind::voice, 400, 3, 0, sc));
  const RoundMetrics rm0 = step(state, &events);
  CHECK(rm0.at(Operator::ps, ServiceKind::voice).resolved_mass == 1200);
  CHECK(rm0.at(Operator::ps, ServiceKind::voice).occupied_cells == 400);
  CHECK(rm0.occupancy() == doctest::Approx(1.0));
  CHECK(state.active.count(1) == 1);
  CHECK(state.substrate.placement(1).area() == 400);
  // voice priority 3 on a 400-cell rectangle
  CHECK(rm0.accepted_weighted_area == 1200);

  const RoundMetrics rm1 = step(state, &events);
  CHECK(rm1.occupancy() == doctest::Approx(1.0));
  const RoundMetrics rm2 = step(state, &events);
  CHECK(rm2.occupancy() == doctest::Approx(1.0));
  CHECK(state.active.empty());

  const RoundMetrics rm3 = step(state, &events);
  CHECK(rm3.occupancy() == 0.0);

  REQUIRE(events.size() == 2);
  CHECK(events[0].kind == EventKind::embed);
  CHECK(events[0].round == 0);
  CHECK(events[1].kind == EventKind::expire);
  CHECK(events[1].round == 2);
  CHECK(events[1].rect.has_value());

  std::ostringstream os;
  write_events_log(os, events, sc);
  CHECK(os.str() ==
        "0 1 public_safety voice embed 400 3 0,0,20,20\n"
        "2 1 public_safety voice expire 400 3 0,0,20,20\n");
}

TEST_CASE("waiting requests age out after max_delay extra rounds") {
  const Scenario sc = quiet_scenario(EngineKind::static_km, 4);
  SimState state(sc, 3);
  std::vector<Event> events;

  state.buffer.push_back(
      make_vrr(1, Operator::ps, ServiceKind::voice, 400, 5, 0, sc));
  state.buffer.push_back(
      make_vrr(2, Operator::ps, ServiceKind::voice, 2, 4, 0, sc));

  const RoundMetrics rm0 = step(state, &events);
  CHECK(rm0.at(Operator::ps, ServiceKind::voice).resolved_mass == 2000);
  CHECK(rm0.at(Operator::ps, ServiceKind::voice).buffer_depth == 1);
  REQUIRE(state.buffer.size() == 1);
  CHECK(state.buffer[0].waited == 1);

  // voice max_delay is 1: the second attempt is the last one.
  const RoundMetrics rm1 = step(state, &events);
  CHECK(rm1.at(Operator::ps, ServiceKind::voice).rejected_mass == 8);
  CHECK(rm1.at(Operator::ps, ServiceKind::voice).resolved_mass == 8);
  CHECK(rm1.at(Operator::ps, ServiceKind::voice).buffer_depth == 0);
  CHECK(state.buffer.empty());

  std::vector<EventKind> kinds;
  for (const Event& e : events)
    if (e.id == 2) kinds.push_back(e.kind);
  CHECK(kinds == std::vector<EventKind>{EventKind::defer, EventKind::defer,
                                        EventKind::reject});
}

TEST_CASE("next-round eligibility holds arrivals out of their first round") {
  Scenario sc = quiet_scenario(EngineKind::static_km, 4);
  sc.options.arrival_eligibility = ArrivalEligibility::next_round;
  SimState state(sc, 3);
  std::vector<Event> events;

  state.buffer.push_back(
      make_vrr(1, Operator::ps, ServiceKind::msg, 4, 2, 0, sc));
  const RoundMetrics rm0 = step(state, &events);
  CHECK(rm0.at(Operator::ps, ServiceKind::msg).resolved_mass == 0);
  CHECK(rm0.at(Operator::ps, ServiceKind::msg).buffer_depth == 1);
  CHECK(state.buffer[0].waited == 0);
  CHECK(events.empty());

  const RoundMetrics rm1 = step(state, &events);
  CHECK(rm1.at(Operator::ps, ServiceKind::msg).resolved_mass == 8);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == EventKind::embed);
  CHECK(events[0].round == 1);
}

TEST_CASE("dynamic repacking preempts lower priority active services") {
  const Scenario sc = quiet_scenario(EngineKind::dynamic_km, 4);
  SimState state(sc, 3);
  std::vector<Event> events;

  state.buffer.push_back(
      make_vrr(1, Operator::commercial, ServiceKind::video, 400, 5, 0, sc));
  const RoundMetrics rm0 = step(state, &events);
  CHECK(rm0.at(Operator::commercial, ServiceKind::video).resolved_mass ==
        2000);
  CHECK(state.active.at(1).remaining == 4);

  state.buffer.push_back(
      make_vrr(2, Operator::ps, ServiceKind::voice, 400, 2, 1, sc));
  const RoundMetrics rm1 = step(state, &events);
  CHECK(rm1.at(Operator::ps, ServiceKind::voice).resolved_mass == 800);
  CHECK(rm1.at(Operator::commercial, ServiceKind::video).rejected_mass ==
        1600);
  CHECK(rm1.at(Operator::commercial, ServiceKind::video).resolved_mass ==
        1600);
  CHECK(rm1.preempted_count == 1);
  CHECK(rm1.preempted_mass == 1600);
  CHECK(rm1.occupancy() == doctest::Approx(1.0));
  CHECK(state.active.count(1) == 0);
  CHECK(state.active.count(2) == 1);

  std::vector<std::string> kinds;
  for (const Event& e : events)
    kinds.push_back(std::to_string(e.id) + ":" + to_string(e.kind));
  CHECK(kinds == std::vector<std::string>{"1:embed", "2:embed", "1:preempt"});
  CHECK(events[2].rounds == 4);
}

TEST_CASE("static placements never move once embedded") {
  Scenario sc = Scenario::paper_defaults();
  sc.algorithm = EngineKind::static_km;
  sc.horizon = 120;
  sc.emergency_start = 30;
  sc.emergency_end = 90;
  std::map<std::uint64_t, Rect> first_seen;
  bool moved = false;
  bool audits_ok = true;
  run(sc, 5, [&](const SimState& state, const RoundMetrics&) {
    audits_ok = audits_ok && checks::cell_audit(state.substrate);
    for (const auto& [id, rect] : state.substrate.placements()) {
      auto [it, inserted] = first_seen.emplace(id, rect);
      if (!inserted && !(it->second == rect)) moved = true;
    }
  });
  CHECK(!moved);
  CHECK(audits_ok);
  CHECK(first_seen.size() > 50);
}

TEST_CASE("occupancy splits match the placements exactly") {
  for (EngineKind algo : {EngineKind::static_km, EngineKind::dynamic_km}) {
    Scenario sc = Scenario::paper_defaults();
    sc.algorithm = algo;
    sc.horizon = 150;
    sc.emergency_start = 40;
    sc.emergency_end = 110;
    SimState state(sc, 9);
    std::vector<Event> events;
    bool consistent = true;
    for (int round = 0; round < sc.horizon; ++round) {
      const std::size_t seen = events.size();
      const RoundMetrics rm = step(state, &events);
      // The snapshot is taken while services expiring this round still
      // hold their cells.
      long long expired_area = 0;
      for (std::size_t i = seen; i < events.size(); ++i)
        if (events[i].kind == EventKind::expire)
          expired_area += events[i].rect->area();
      long long placed = 0;
      for (const auto& [id, rect] : state.substrate.placements()) {
        placed += rect.area();
        if (!state.active.count(id)) consistent = false;
      }
      if (placed + expired_area != rm.total_occupied_cells) consistent = false;
      if (state.substrate.occupied_cells() != placed) consistent = false;
      int split_sum = 0;
      for (Operator op : all_operators)
        for (ServiceKind s : all_services)
          split_sum += rm.at(op, s).occupied_cells;
      if (split_sum != rm.total_occupied_cells) consistent = false;
      if (!checks::cell_audit(state.substrate)) consistent = false;
    }
    CHECK(consistent);
  }
}

TEST_CASE("event ledger balances the metric masses") {
  for (EngineKind algo : {EngineKind::static_km, EngineKind::dynamic_km}) {
    Scenario sc = Scenario::paper_defaults();
    sc.algorithm = algo;
    sc.horizon = 250;
    sc.emergency_start = 60;
    sc.emergency_end = 180;
    const SimResult result = run(sc, 17);

    long long generated = 0, resolved = 0, rejected = 0;
    for (const RoundMetrics& rm : result.rounds)
      for (Operator op : all_operators)
        for (ServiceKind s : all_services) {
          generated += rm.at(op, s).generated_mass;
          resolved += rm.at(op, s).resolved_mass;
          rejected += rm.at(op, s).rejected_mass;
          CHECK(rm.at(op, s).rejected_mass <= rm.at(op, s).resolved_mass);
        }

    long long arrive = 0, embed = 0, reject = 0, preempt = 0;
    std::set<std::uint64_t> embedded_ids, closed_ids;
    for (const Event& e : result.events) {
      switch (e.kind) {
        case EventKind::arrive:
          arrive += event_mass(e);
          break;
        case EventKind::embed:
          embed += event_mass(e);
          CHECK(embedded_ids.insert(e.id).second);
          break;
        case EventKind::reject:
          reject += event_mass(e);
          break;
        case EventKind::preempt:
          preempt += event_mass(e);
          CHECK(closed_ids.insert(e.id).second);
          break;
        case EventKind::expire:
          CHECK(closed_ids.insert(e.id).second);
          break;
        case EventKind::defer:
          break;
      }
    }
    for (std::uint64_t id : closed_ids) CHECK(embedded_ids.count(id) == 1);

    CHECK(generated == arrive);
    CHECK(resolved == embed + reject + preempt);
    CHECK(rejected == reject + preempt);
    long long preempted = 0;
    for (const RoundMetrics& rm : result.rounds)
      preempted += rm.preempted_mass;
    CHECK(preempted == preempt);
    CHECK(generated ==
          embed + reject + result.summary.still_buffered_mass);
    if (algo == EngineKind::static_km) CHECK(preempt == 0);
  }
}

TEST_CASE("runs are reproducible byte for byte") {
  Scenario sc = Scenario::paper_defaults();
  sc.algorithm = EngineKind::dynamic_km;
  sc.horizon = 80;
  sc.emergency_start = 20;
  sc.emergency_end = 60;

  auto render = [&sc]() {
    const SimResult result = run(sc, 23);
    std::ostringstream os;
    write_metrics_csv(os, result.rounds, sc);
    write_events_log(os, result.events, sc);
    write_summary_text(os, result.summary, sc);
    return os.str();
  };
  const std::string a = render();
  const std::string b = render();
  CHECK(a == b);
  CHECK(a.size() > 1000);

  const SimResult other = run(sc, 24);
  std::ostringstream os;
  write_metrics_csv(os, other.rounds, sc);
  write_events_log(os, other.events, sc);
  write_summary_text(os, other.summary, sc);
  CHECK(os.str() != a);
}

TEST_CASE("oracle engine drives the round loop on a small substrate") {
  Scenario sc = quiet_scenario(EngineKind::oracle, 3);
  sc.freq_dim = 6;
  sc.time_dim = 6;
  for (ServiceSpec& spec : sc.services) spec.size_max = 8;
  SimState state(sc, 3);

  state.buffer.push_back(
      make_vrr(1, Operator::commercial, ServiceKind::msg, 8, 3, 0, sc));
  const RoundMetrics rm0 = step(state, nullptr);
  CHECK(rm0.at(Operator::commercial, ServiceKind::msg).resolved_mass == 24);
  CHECK(rm0.total_occupied_cells == 8);

  state.buffer.push_back(
      make_vrr(2, Operator::ps, ServiceKind::msg, 8, 2, 1, sc));
  const RoundMetrics rm1 = step(state, nullptr);
  CHECK(rm1.total_occupied_cells == 16);
  CHECK(state.active.size() == 2);
  CHECK(checks::cell_audit(state.substrate));
}
