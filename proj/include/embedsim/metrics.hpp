#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "embedsim/scenario.hpp"

namespace embedsim {

// Masses are r*d sums in PRB-rounds. resolved = embedded + rejected this
// round; preempted remainders enter both sides so the rate stays a
// fraction of accounted-for traffic.
struct KeyStats {
  long long generated_mass = 0;
  long long rejected_mass = 0;
  long long resolved_mass = 0;
  int occupied_cells = 0;
  int buffer_depth = 0;

  bool operator==(const KeyStats&) const = default;
};

struct RoundMetrics {
  int round = 0;
  Mode mode = Mode::normal;
  std::array<std::array<KeyStats, 3>, 2> keys{};  // [operator][service]
  long long preempted_mass = 0;
  int preempted_count = 0;
  int total_occupied_cells = 0;
  int substrate_cells = 0;
  long long accepted_weighted_area = 0;  // priority level * embedded area

  KeyStats& at(Operator op, ServiceKind s) {
    return keys[index_of(op)][index_of(s)];
  }
  const KeyStats& at(Operator op, ServiceKind s) const {
    return keys[index_of(op)][index_of(s)];
  }
  double occupancy() const {
    return substrate_cells == 0
               ? 0.0
               : static_cast<double>(total_occupied_cells) / substrate_cells;
  }

  bool operator==(const RoundMetrics&) const = default;
};

// rejected/resolved mass ratio; absent when nothing was resolved.
std::optional<double> rejection_rate(long long rejected_mass,
                                     long long resolved_mass);

// Centered moving average that skips absent values; length-preserving.
std::vector<std::optional<double>> smooth(
    const std::vector<std::optional<double>>& series, int window);

enum class Phase { pre, emergency, post };
inline constexpr std::array<Phase, 3> all_phases = {Phase::pre,
                                                    Phase::emergency,
                                                    Phase::post};
const char* to_string(Phase p);

struct PhaseKeyStats {
  long long generated_mass = 0;
  long long rejected_mass = 0;
  long long resolved_mass = 0;
  long long occupied_cell_rounds = 0;

  long long embedded_mass() const { return resolved_mass - rejected_mass; }
  std::optional<double> rejection() const {
    return rejection_rate(rejected_mass, resolved_mass);
  }
  PhaseKeyStats& operator+=(const PhaseKeyStats& o);
};

struct PhaseSummary {
  int rounds = 0;
  std::array<std::array<PhaseKeyStats, 3>, 2> keys{};
  long long preempted_mass = 0;
  int preempted_count = 0;
  long long occupied_cell_rounds = 0;
  long long cell_rounds = 0;

  const PhaseKeyStats& at(Operator op, ServiceKind s) const {
    return keys[index_of(op)][index_of(s)];
  }
  PhaseKeyStats operator_total(Operator op) const;
  PhaseKeyStats service_total(ServiceKind s) const;
  PhaseKeyStats grand_total() const;

  double mean_occupancy() const {
    return cell_rounds == 0
               ? 0.0
               : static_cast<double>(occupied_cell_rounds) / cell_rounds;
  }
  // Share of embedded mass belonging to the operator.
  std::optional<double> served_share(Operator op) const;
  // Share of generated mass belonging to the operator.
  std::optional<double> requested_share(Operator op) const;
  // Share of occupied cell-rounds devoted to the service.
  std::optional<double> capacity_share(ServiceKind s) const;
};

struct Summary {
  std::array<PhaseSummary, 3> phases{};  // indexed by Phase
  long long accepted_weighted_area = 0;
  long long still_active_count = 0;
  long long still_active_remaining_mass = 0;
  long long still_buffered_count = 0;
  long long still_buffered_mass = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  int smoothing_window = 1;

  const PhaseSummary& phase(Phase p) const {
    return phases[static_cast<int>(p)];
  }
};

Phase phase_of(int round, const Scenario& scenario);

// Aggregates the per-round records into pre/emergency/post phases. Run
// metadata (seed, algorithm, leftover state) is filled by the caller.
Summary phase_summary(const std::vector<RoundMetrics>& metrics,
                      const Scenario& scenario);

// One row per (round, operator, service); fixed column set, fixed
// formatting, so identical runs serialize byte-identically.
void write_metrics_csv(std::ostream& os,
                       const std::vector<RoundMetrics>& metrics,
                       const Scenario& scenario);

// Round-tripped subset sufficient for re-plotting: per-key masses,
// occupancy fractions, modes and operator names.
struct MetricsTable {
  std::vector<RoundMetrics> rounds;
  std::array<std::string, 2> operator_names;
};

MetricsTable read_metrics_csv(std::istream& is);

void write_summary_text(std::ostream& os, const Summary& summary,
                        const Scenario& scenario);

}  // namespace embedsim
