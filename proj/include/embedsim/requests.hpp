#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace embedsim {

enum class ServiceKind { voice, video, msg };
enum class Operator { ps, commercial };
enum class Mode { normal, emergency };

inline constexpr std::array<ServiceKind, 3> all_services = {
    ServiceKind::voice, ServiceKind::video, ServiceKind::msg};
inline constexpr std::array<Operator, 2> all_operators = {Operator::ps,
                                                          Operator::commercial};

constexpr int index_of(ServiceKind s) { return static_cast<int>(s); }
constexpr int index_of(Operator o) { return static_cast<int>(o); }

const char* to_string(ServiceKind s);
const char* to_string(Operator o);
const char* to_string(Mode m);
std::optional<ServiceKind> service_from_string(const std::string& name);
std::optional<Mode> mode_from_string(const std::string& name);

// A candidate rectangle shape for a request: f columns (frequency) by
// t rows (time).
struct Shape {
  int f = 0;
  int t = 0;

  int area() const { return f * t; }
  bool operator==(const Shape&) const = default;
};

struct ServiceSpec {
  ServiceKind kind = ServiceKind::voice;
  double mean_duration = 1.0;  // exponential mean, in rounds
  int size_min = 1;
  int size_max = 1;
  int max_delay = 1;  // rounds a request may wait in the buffer

  bool operator==(const ServiceSpec&) const = default;
};

// A virtual resource request: r PRBs for d rounds on behalf of one
// operator's service. Priority is derived from (owner, service, mode)
// via the policy rather than stored.
struct VRR {
  std::uint64_t id = 0;
  Operator owner = Operator::ps;
  ServiceKind service = ServiceKind::voice;
  int prbs = 0;  // requested resource blocks (r)
  std::vector<Shape> shapes;
  int duration = 0;  // rounds (d)
  int arrival_round = 0;
  int waited = 0;  // completed rounds spent in the buffer
};

// Integer priority levels per (mode, operator, service); higher is
// served first. Only the relative order is meaningful.
class PriorityPolicy {
 public:
  static PriorityPolicy defaults();

  int level(Mode mode, Operator op, ServiceKind service) const {
    return levels_[static_cast<int>(mode)][index_of(op)][index_of(service)];
  }
  void set_level(Mode mode, Operator op, ServiceKind service, int level) {
    levels_[static_cast<int>(mode)][index_of(op)][index_of(service)] = level;
  }

  bool operator==(const PriorityPolicy&) const = default;

 private:
  std::array<std::array<std::array<int, 3>, 2>, 2> levels_{};
};

// Smallest rectangular area covering at least `prbs` blocks within the
// substrate dimensions, i.e. min {f*t : f <= F, t <= T, f*t >= prbs}.
// Throws InfeasibleError when prbs exceeds F*T.
int min_shape_area(int prbs, int freq_dim, int time_dim);

// All shapes of that minimal area that fit the substrate, ordered
// most-square first (|f-t| ascending), then f ascending.
std::vector<Shape> shape_candidates(int prbs, int freq_dim, int time_dim);

int priority_of(Operator owner, ServiceKind service, Mode mode,
                const PriorityPolicy& policy);

}  // namespace embedsim
