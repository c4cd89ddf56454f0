#include "embedsim/requests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "embedsim/errors.hpp"

namespace embedsim {

const char* to_string(ServiceKind s) {
  switch (s) {
    case ServiceKind::voice:
      return "voice";
    case ServiceKind::video:
      return "video";
    case ServiceKind::msg:
      return "msg";
  }
  return "?";
}

const char* to_string(Operator o) {
  switch (o) {
    case Operator::ps:
      return "ps";
    case Operator::commercial:
      return "commercial";
  }
  return "?";
}

const char* to_string(Mode m) {
  return m == Mode::normal ? "normal" : "emergency";
}

std::optional<ServiceKind> service_from_string(const std::string& name) {
  for (ServiceKind s : all_services) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<Mode> mode_from_string(const std::string& name) {
  if (name == "normal") return Mode::normal;
  if (name == "emergency") return Mode::emergency;
  return std::nullopt;
}

PriorityPolicy PriorityPolicy::defaults() {
  PriorityPolicy p;
  // Normal operation: priority by service type only, identical for both
  // operators.
  for (Operator op : all_operators) {
    p.set_level(Mode::normal, op, ServiceKind::voice, 3);
    p.set_level(Mode::normal, op, ServiceKind::video, 2);
    p.set_level(Mode::normal, op, ServiceKind::msg, 1);
  }
  // Emergency: every PS level above every commercial level; PS keeps the
  // service order, commercial prefers messaging over video.
  p.set_level(Mode::emergency, Operator::ps, ServiceKind::voice, 6);
  p.set_level(Mode::emergency, Operator::ps, ServiceKind::video, 5);
  p.set_level(Mode::emergency, Operator::ps, ServiceKind::msg, 4);
  p.set_level(Mode::emergency, Operator::commercial, ServiceKind::voice, 3);
  p.set_level(Mode::emergency, Operator::commercial, ServiceKind::msg, 2);
  p.set_level(Mode::emergency, Operator::commercial, ServiceKind::video, 1);
  return p;
}

int min_shape_area(int prbs, int freq_dim, int time_dim) {
  if (prbs < 1) throw InfeasibleError("request size must be at least 1");
  if (prbs > freq_dim * time_dim)
    throw InfeasibleError("request for " + std::to_string(prbs) +
                          " blocks exceeds substrate capacity " +
                          std::to_string(freq_dim * time_dim));
  int best = freq_dim * time_dim;
  for (int f = 1; f <= freq_dim; ++f) {
    for (int t = 1; t <= time_dim; ++t) {
      int area = f * t;
      if (area >= prbs && area < best) best = area;
    }
  }
  return best;
}

std::vector<Shape> shape_candidates(int prbs, int freq_dim, int time_dim) {
  const int target = min_shape_area(prbs, freq_dim, time_dim);
  std::vector<Shape> shapes;
  for (int f = 1; f <= freq_dim; ++f) {
    for (int t = 1; t <= time_dim; ++t) {
      if (f * t == target) shapes.push_back({f, t});
    }
  }
  std::sort(shapes.begin(), shapes.end(), [](const Shape& a, const Shape& b) {
    int da = std::abs(a.f - a.t);
    int db = std::abs(b.f - b.t);
    if (da != db) return da < db;
    return a.f < b.f;
  });
  return shapes;
}

int priority_of(Operator owner, ServiceKind service, Mode mode,
                const PriorityPolicy& policy) {
  return policy.level(mode, owner, service);
}

}  // namespace embedsim
