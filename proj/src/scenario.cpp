#include "embedsim/scenario.hpp"

namespace embedsim {

const char* to_string(EngineKind e) {
  switch (e) {
    case EngineKind::static_km:
      return "static";
    case EngineKind::dynamic_km:
      return "dynamic";
    case EngineKind::oracle:
      return "oracle";
  }
  return "?";
}

std::optional<EngineKind> engine_from_string(const std::string& name) {
  if (name == "static") return EngineKind::static_km;
  if (name == "dynamic") return EngineKind::dynamic_km;
  if (name == "oracle") return EngineKind::oracle;
  return std::nullopt;
}

Scenario Scenario::paper_defaults() {
  Scenario sc;
  sc.services = {{{ServiceKind::voice, 30.0, 1, 2, 1},
                  {ServiceKind::video, 10.0, 8, 25, 2},
                  {ServiceKind::msg, 3.0, 1, 8, 4}}};

  auto& r = sc.rates;
  r.set(Mode::normal, Operator::ps, ServiceKind::voice, 0.14);
  r.set(Mode::normal, Operator::ps, ServiceKind::video, 0.14);
  r.set(Mode::normal, Operator::ps, ServiceKind::msg, 0.3);
  r.set(Mode::normal, Operator::commercial, ServiceKind::voice, 1.4);
  r.set(Mode::normal, Operator::commercial, ServiceKind::video, 1.4);
  r.set(Mode::normal, Operator::commercial, ServiceKind::msg, 3.0);
  // Emergency: PS rates are multiplied by 5; commercial voice and
  // messaging grow by 2.5, commercial video stays constant.
  r.set(Mode::emergency, Operator::ps, ServiceKind::voice, 0.7);
  r.set(Mode::emergency, Operator::ps, ServiceKind::video, 0.7);
  r.set(Mode::emergency, Operator::ps, ServiceKind::msg, 1.5);
  r.set(Mode::emergency, Operator::commercial, ServiceKind::voice, 3.5);
  r.set(Mode::emergency, Operator::commercial, ServiceKind::video, 1.4);
  r.set(Mode::emergency, Operator::commercial, ServiceKind::msg, 7.5);
  return sc;
}

}  // namespace embedsim
