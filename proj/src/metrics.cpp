#include "embedsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "embedsim/errors.hpp"

namespace embedsim {

std::optional<double> rejection_rate(long long rejected_mass,
                                     long long resolved_mass) {
  if (resolved_mass == 0) return std::nullopt;
  return static_cast<double>(rejected_mass) / resolved_mass;
}

std::vector<std::optional<double>> smooth(
    const std::vector<std::optional<double>>& series, int window) {
  if (window < 1) throw Error("smoothing window must be >= 1");
  const int n = static_cast<int>(series.size());
  std::vector<std::optional<double>> out(series.size());
  const int lo_span = (window - 1) / 2;
  const int hi_span = window / 2;
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    int count = 0;
    for (int j = std::max(0, i - lo_span); j <= std::min(n - 1, i + hi_span);
         ++j) {
      if (series[j]) {
        sum += *series[j];
        ++count;
      }
    }
    if (count > 0) out[i] = sum / count;
  }
  return out;
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::pre:
      return "pre";
    case Phase::emergency:
      return "emergency";
    case Phase::post:
      return "post";
  }
  return "?";
}

PhaseKeyStats& PhaseKeyStats::operator+=(const PhaseKeyStats& o) {
  generated_mass += o.generated_mass;
  rejected_mass += o.rejected_mass;
  resolved_mass += o.resolved_mass;
  occupied_cell_rounds += o.occupied_cell_rounds;
  return *this;
}

PhaseKeyStats PhaseSummary::operator_total(Operator op) const {
  PhaseKeyStats total;
  for (ServiceKind s : all_services) total += at(op, s);
  return total;
}

PhaseKeyStats PhaseSummary::service_total(ServiceKind s) const {
  PhaseKeyStats total;
  for (Operator op : all_operators) total += at(op, s);
  return total;
}

PhaseKeyStats PhaseSummary::grand_total() const {
  PhaseKeyStats total;
  for (Operator op : all_operators) total += operator_total(op);
  return total;
}

std::optional<double> PhaseSummary::served_share(Operator op) const {
  const long long all = grand_total().embedded_mass();
  if (all == 0) return std::nullopt;
  return static_cast<double>(operator_total(op).embedded_mass()) / all;
}

std::optional<double> PhaseSummary::requested_share(Operator op) const {
  const long long all = grand_total().generated_mass;
  if (all == 0) return std::nullopt;
  return static_cast<double>(operator_total(op).generated_mass) / all;
}

std::optional<double> PhaseSummary::capacity_share(ServiceKind s) const {
  if (occupied_cell_rounds == 0) return std::nullopt;
  return static_cast<double>(service_total(s).occupied_cell_rounds) /
         occupied_cell_rounds;
}

Phase phase_of(int round, const Scenario& scenario) {
  if (round < scenario.emergency_start) return Phase::pre;
  if (round < scenario.emergency_end) return Phase::emergency;
  return Phase::post;
}

Summary phase_summary(const std::vector<RoundMetrics>& metrics,
                      const Scenario& scenario) {
  Summary summary;
  for (const RoundMetrics& rm : metrics) {
    PhaseSummary& ph =
        summary.phases[static_cast<int>(phase_of(rm.round, scenario))];
    ph.rounds += 1;
    for (Operator op : all_operators)
      for (ServiceKind s : all_services) {
        const KeyStats& ks = rm.at(op, s);
        PhaseKeyStats& agg = ph.keys[index_of(op)][index_of(s)];
        agg.generated_mass += ks.generated_mass;
        agg.rejected_mass += ks.rejected_mass;
        agg.resolved_mass += ks.resolved_mass;
        agg.occupied_cell_rounds += ks.occupied_cells;
      }
    ph.preempted_mass += rm.preempted_mass;
    ph.preempted_count += rm.preempted_count;
    ph.occupied_cell_rounds += rm.total_occupied_cells;
    ph.cell_rounds += rm.substrate_cells;
    summary.accepted_weighted_area += rm.accepted_weighted_area;
  }
  return summary;
}

namespace {

std::string fmt6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string fmt_opt(const std::optional<double>& value) {
  return value ? fmt6(*value) : std::string("absent");
}

}  // namespace

void write_metrics_csv(std::ostream& os,
                       const std::vector<RoundMetrics>& metrics,
                       const Scenario& scenario) {
  os << "round,mode,vo,service,rejected_mass,resolved_mass,rejection_rate,"
        "occupancy,buffer_depth\n";
  for (const RoundMetrics& rm : metrics) {
    for (Operator op : all_operators) {
      for (ServiceKind s : all_services) {
        const KeyStats& ks = rm.at(op, s);
        const auto rate = rejection_rate(ks.rejected_mass, ks.resolved_mass);
        const double occ =
            rm.substrate_cells == 0
                ? 0.0
                : static_cast<double>(ks.occupied_cells) / rm.substrate_cells;
        os << rm.round << ',' << to_string(rm.mode) << ','
           << scenario.name_of(op) << ',' << to_string(s) << ','
           << ks.rejected_mass << ',' << ks.resolved_mass << ','
           << (rate ? fmt6(*rate) : std::string()) << ',' << fmt6(occ) << ','
           << ks.buffer_depth << '\n';
      }
    }
  }
}

MetricsTable read_metrics_csv(std::istream& is) {
  MetricsTable table;
  std::string line;
  if (!std::getline(is, line))
    throw ParseError("metrics csv: missing header");
  if (line != "round,mode,vo,service,rejected_mass,resolved_mass,"
              "rejection_rate,occupancy,buffer_depth")
    throw ParseError("metrics csv: unexpected header: " + line);

  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (line.back() == ',') cols.push_back("");
    if (cols.size() != 9)
      throw ParseError("metrics csv line " + std::to_string(lineno) +
                       ": expected 9 columns");
    try {
      const int round = std::stoi(cols[0]);
      const auto mode = mode_from_string(cols[1]);
      const auto service = service_from_string(cols[3]);
      if (!mode || !service)
        throw ParseError("metrics csv line " + std::to_string(lineno) +
                         ": bad mode or service");
      if (table.rounds.empty() || table.rounds.back().round != round) {
        table.rounds.emplace_back();
        table.rounds.back().round = round;
        table.rounds.back().mode = *mode;
        // Occupancy survives as a fraction with 6 digits; keep it as
        // parts-per-million cells.
        table.rounds.back().substrate_cells = 1000000;
      }
      RoundMetrics& rm = table.rounds.back();
      Operator op = Operator::ps;
      if (table.operator_names[0].empty() ||
          table.operator_names[0] == cols[2]) {
        table.operator_names[0] = cols[2];
      } else {
        op = Operator::commercial;
        if (table.operator_names[1].empty())
          table.operator_names[1] = cols[2];
        else if (table.operator_names[1] != cols[2])
          throw ParseError("metrics csv line " + std::to_string(lineno) +
                           ": more than two operators");
      }
      KeyStats& ks = rm.at(op, *service);
      ks.rejected_mass = std::stoll(cols[4]);
      ks.resolved_mass = std::stoll(cols[5]);
      ks.occupied_cells =
          static_cast<int>(std::lround(std::stod(cols[7]) * 1000000));
      ks.buffer_depth = std::stoi(cols[8]);
      rm.total_occupied_cells += ks.occupied_cells;
    } catch (const std::invalid_argument&) {
      throw ParseError("metrics csv line " + std::to_string(lineno) +
                       ": malformed number");
    } catch (const std::out_of_range&) {
      throw ParseError("metrics csv line " + std::to_string(lineno) +
                       ": number out of range");
    }
  }
  return table;
}

void write_summary_text(std::ostream& os, const Summary& summary,
                        const Scenario& scenario) {
  os << "meta.algorithm=" << summary.algorithm << '\n';
  os << "meta.seed=" << summary.seed << '\n';
  os << "meta.smoothing_window=" << summary.smoothing_window << '\n';
  os << "meta.rejection_attribution=resolution_round\n";
  for (Phase p : all_phases) {
    const PhaseSummary& ph = summary.phase(p);
    const std::string base = std::string("phase.") + to_string(p);
    const PhaseKeyStats grand = ph.grand_total();
    os << base << ".rounds=" << ph.rounds << '\n';
    os << base << ".occupancy_mean=" << fmt6(ph.mean_occupancy()) << '\n';
    os << base << ".generated_mass=" << grand.generated_mass << '\n';
    os << base << ".embedded_mass=" << grand.embedded_mass() << '\n';
    os << base << ".rejected_mass=" << grand.rejected_mass << '\n';
    os << base << ".rejection_rate=" << fmt_opt(grand.rejection()) << '\n';
    os << base << ".preempted_count=" << ph.preempted_count << '\n';
    os << base << ".preempted_mass=" << ph.preempted_mass << '\n';
    for (Operator op : all_operators) {
      const std::string opbase = base + '.' + scenario.name_of(op);
      const PhaseKeyStats optotal = ph.operator_total(op);
      os << opbase << ".rejection_rate=" << fmt_opt(optotal.rejection())
         << '\n';
      os << opbase << ".served_share=" << fmt_opt(ph.served_share(op)) << '\n';
      os << opbase << ".requested_share=" << fmt_opt(ph.requested_share(op))
         << '\n';
      for (ServiceKind s : all_services) {
        os << opbase << '.' << to_string(s)
           << ".rejection_rate=" << fmt_opt(ph.at(op, s).rejection()) << '\n';
      }
    }
    for (ServiceKind s : all_services) {
      const std::string sbase = base + ".service." + to_string(s);
      os << sbase << ".rejection_rate=" << fmt_opt(ph.service_total(s).rejection())
         << '\n';
      os << sbase << ".capacity_share=" << fmt_opt(ph.capacity_share(s))
         << '\n';
    }
  }
  os << "run.accepted_weighted_area=" << summary.accepted_weighted_area
     << '\n';
  os << "run.still_active.count=" << summary.still_active_count << '\n';
  os << "run.still_active.remaining_mass="
     << summary.still_active_remaining_mass << '\n';
  os << "run.still_buffered.count=" << summary.still_buffered_count << '\n';
  os << "run.still_buffered.mass=" << summary.still_buffered_mass << '\n';
}

}  // namespace embedsim
