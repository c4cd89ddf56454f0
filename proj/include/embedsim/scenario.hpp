#pragma once

#include <array>
#include <optional>
#include <string>

#include "embedsim/requests.hpp"

namespace embedsim {

enum class EngineKind { static_km, dynamic_km, oracle };

const char* to_string(EngineKind e);
std::optional<EngineKind> engine_from_string(const std::string& name);

enum class DurationModel { exponential, fixed };
enum class ArrivalEligibility { same_round, next_round };

// Sensitivity switches; the defaults reproduce the reference experiment.
struct ScenarioOptions {
  bool edi_counts_border = false;
  DurationModel duration_model = DurationModel::exponential;
  ArrivalEligibility arrival_eligibility = ArrivalEligibility::same_round;

  bool operator==(const ScenarioOptions&) const = default;
};

// Mean request arrivals per round, per mode, operator and service.
struct RateTable {
  std::array<std::array<std::array<double, 3>, 2>, 2> rate{};

  double get(Mode m, Operator op, ServiceKind s) const {
    return rate[static_cast<int>(m)][index_of(op)][index_of(s)];
  }
  void set(Mode m, Operator op, ServiceKind s, double lambda) {
    rate[static_cast<int>(m)][index_of(op)][index_of(s)] = lambda;
  }

  bool operator==(const RateTable&) const = default;
};

// Complete experiment description. The defaults are the reference setup:
// a 20x20 substrate over 1000 rounds with an emergency spanning rounds
// 300..699, one public-safety and one commercial operator.
struct Scenario {
  int schema = 1;
  int freq_dim = 20;
  int time_dim = 20;
  int horizon = 1000;
  int emergency_start = 300;
  int emergency_end = 700;
  std::array<ServiceSpec, 3> services{};  // indexed by ServiceKind
  std::array<std::string, 2> operator_names{"public_safety", "commercial"};
  RateTable rates;
  PriorityPolicy policy = PriorityPolicy::defaults();
  EngineKind algorithm = EngineKind::dynamic_km;
  int smoothing_window = 25;
  ScenarioOptions options;

  static Scenario paper_defaults();

  const ServiceSpec& service(ServiceKind k) const {
    return services[index_of(k)];
  }
  const std::string& name_of(Operator op) const {
    return operator_names[index_of(op)];
  }

  bool operator==(const Scenario&) const = default;
};

}  // namespace embedsim
