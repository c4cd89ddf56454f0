#include "embedsim/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "embedsim/errors.hpp"
#include "embedsim/hypervisor.hpp"
#include "json.hpp"

namespace embedsim {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](const char* k) { return item.key() == k; });
    if (!known)
      throw ValidationError(join(path, item.key()), "unknown key");
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(join(path, key), "missing required field");
  return *it;
}

const json& require_object(const json& obj, const char* key,
                           const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_object())
    throw ValidationError(join(path, key), "must be an object");
  return v;
}

int get_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer())
    throw ValidationError(join(path, key), "must be an integer");
  return v.get<int>();
}

double get_double(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number())
    throw ValidationError(join(path, key), "must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_boolean())
    throw ValidationError(join(path, key), "must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string())
    throw ValidationError(join(path, key), "must be a string");
  return v.get<std::string>();
}

void parse_services(const json& arr, Scenario& sc) {
  if (!arr.is_array())
    throw ValidationError("services", "must be an array");
  std::array<bool, 3> seen{};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "services[" + std::to_string(i) + "]";
    const json& e = arr[i];
    if (!e.is_object()) throw ValidationError(path, "must be an object");
    check_keys(e, path,
               {"kind", "mean_duration", "size_min", "size_max", "max_delay"});
    const std::string kind_name = get_string(e, "kind", path);
    const auto kind = service_from_string(kind_name);
    if (!kind)
      throw ValidationError(path + ".kind",
                            "unknown service '" + kind_name + "'");
    if (seen[index_of(*kind)])
      throw ValidationError(path + ".kind",
                            "service '" + kind_name + "' defined twice");
    seen[index_of(*kind)] = true;
    ServiceSpec& spec = sc.services[index_of(*kind)];
    spec.kind = *kind;
    spec.mean_duration = get_double(e, "mean_duration", path);
    spec.size_min = get_int(e, "size_min", path);
    spec.size_max = get_int(e, "size_max", path);
    spec.max_delay = get_int(e, "max_delay", path);
  }
  for (ServiceKind s : all_services)
    if (!seen[index_of(s)])
      throw ValidationError("services", std::string("service '") +
                                            to_string(s) + "' is missing");
}

void parse_operator_rates(const json& obj, const std::string& path,
                          Operator op, Scenario& sc) {
  if (!obj.is_object()) throw ValidationError(path, "must be an object");
  check_keys(obj, path, {"voice", "video", "msg"});
  for (ServiceKind s : all_services) {
    auto it = obj.find(to_string(s));
    if (it == obj.end())
      throw ValidationError(join(path, to_string(s)),
                            "missing required field");
    const std::string spath = join(path, to_string(s));
    if (!it->is_object()) throw ValidationError(spath, "must be an object");
    check_keys(*it, spath, {"normal", "emergency"});
    sc.rates.set(Mode::normal, op, s, get_double(*it, "normal", spath));
    sc.rates.set(Mode::emergency, op, s, get_double(*it, "emergency", spath));
  }
}

void parse_operators(const json& arr, Scenario& sc) {
  if (!arr.is_array() || arr.size() != 2)
    throw ValidationError("operators", "must be an array of two operators");
  int ps_index = -1;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string path = "operators[" + std::to_string(i) + "]";
    const json& e = arr[i];
    if (!e.is_object()) throw ValidationError(path, "must be an object");
    check_keys(e, path, {"name", "is_ps", "rates"});
    if (get_bool(e, "is_ps", path)) {
      if (ps_index >= 0)
        throw ValidationError(path + ".is_ps",
                              "only one operator may be public safety");
      ps_index = static_cast<int>(i);
    }
  }
  if (ps_index < 0)
    throw ValidationError("operators",
                          "exactly one operator must set is_ps");
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string path = "operators[" + std::to_string(i) + "]";
    const Operator op = static_cast<int>(i) == ps_index
                            ? Operator::ps
                            : Operator::commercial;
    sc.operator_names[index_of(op)] = get_string(arr[i], "name", path);
    parse_operator_rates(require_object(arr[i], "rates", path),
                         path + ".rates", op, sc);
  }
}

void parse_level_block(const json& obj, const std::string& path, Mode mode,
                       std::initializer_list<Operator> ops, Scenario& sc) {
  if (!obj.is_object()) throw ValidationError(path, "must be an object");
  check_keys(obj, path, {"voice", "video", "msg"});
  for (ServiceKind s : all_services) {
    const int level = get_int(obj, to_string(s), path);
    for (Operator op : ops) sc.policy.set_level(mode, op, s, level);
  }
}

void parse_policy(const json& obj, Scenario& sc) {
  if (!obj.is_object()) throw ValidationError("policy", "must be an object");
  check_keys(obj, "policy", {"normal", "emergency"});
  parse_level_block(require(obj, "normal", "policy"), "policy.normal",
                    Mode::normal, {Operator::ps, Operator::commercial}, sc);
  const json& emerg = require_object(obj, "emergency", "policy");
  check_keys(emerg, "policy.emergency",
             {sc.operator_names[0].c_str(), sc.operator_names[1].c_str()});
  for (Operator op : all_operators) {
    const std::string& name = sc.name_of(op);
    auto it = emerg.find(name);
    if (it == emerg.end())
      throw ValidationError("policy.emergency." + name,
                            "missing required field");
    parse_level_block(*it, "policy.emergency." + name, Mode::emergency, {op},
                      sc);
  }
}

void parse_options(const json& obj, Scenario& sc) {
  if (!obj.is_object()) throw ValidationError("options", "must be an object");
  check_keys(obj, "options",
             {"edi_counts_border", "duration_model", "arrival_eligibility"});
  if (obj.contains("edi_counts_border"))
    sc.options.edi_counts_border =
        get_bool(obj, "edi_counts_border", "options");
  if (obj.contains("duration_model")) {
    const std::string m = get_string(obj, "duration_model", "options");
    if (m == "exponential")
      sc.options.duration_model = DurationModel::exponential;
    else if (m == "fixed")
      sc.options.duration_model = DurationModel::fixed;
    else
      throw ValidationError("options.duration_model",
                            "unknown model '" + m + "'");
  }
  if (obj.contains("arrival_eligibility")) {
    const std::string e = get_string(obj, "arrival_eligibility", "options");
    if (e == "same_round")
      sc.options.arrival_eligibility = ArrivalEligibility::same_round;
    else if (e == "next_round")
      sc.options.arrival_eligibility = ArrivalEligibility::next_round;
    else
      throw ValidationError("options.arrival_eligibility",
                            "unknown rule '" + e + "'");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!j.is_object())
    throw ValidationError("", "scenario document must be an object");
  check_keys(j, "",
             {"schema", "substrate", "horizon", "emergency", "services",
              "operators", "policy", "algorithm", "smoothing_window",
              "options"});

  Scenario sc;
  sc.schema = get_int(j, "schema", "");

  const json& substrate = require_object(j, "substrate", "");
  check_keys(substrate, "substrate", {"F", "T"});
  sc.freq_dim = get_int(substrate, "F", "substrate");
  sc.time_dim = get_int(substrate, "T", "substrate");

  sc.horizon = get_int(j, "horizon", "");

  const json& emergency = require_object(j, "emergency", "");
  check_keys(emergency, "emergency", {"start", "end"});
  sc.emergency_start = get_int(emergency, "start", "emergency");
  sc.emergency_end = get_int(emergency, "end", "emergency");

  parse_services(require(j, "services", ""), sc);
  parse_operators(require(j, "operators", ""), sc);

  if (j.contains("policy")) parse_policy(j["policy"], sc);

  if (j.contains("algorithm")) {
    const std::string name = get_string(j, "algorithm", "");
    const auto engine = engine_from_string(name);
    if (!engine)
      throw ValidationError("algorithm", "unknown engine '" + name + "'");
    sc.algorithm = *engine;
  }

  if (j.contains("smoothing_window"))
    sc.smoothing_window = get_int(j, "smoothing_window", "");

  if (j.contains("options")) parse_options(j["options"], sc);

  validate_scenario(sc);
  return sc;
}

Scenario load_scenario(std::istream& is) {
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_scenario(buffer.str());
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  return load_scenario(in);
}

std::string serialize_scenario(const Scenario& sc) {
  json j;
  j["schema"] = sc.schema;
  j["substrate"] = {{"F", sc.freq_dim}, {"T", sc.time_dim}};
  j["horizon"] = sc.horizon;
  j["emergency"] = {{"start", sc.emergency_start},
                    {"end", sc.emergency_end}};
  j["services"] = json::array();
  for (ServiceKind s : all_services) {
    const ServiceSpec& spec = sc.service(s);
    j["services"].push_back({{"kind", to_string(s)},
                             {"mean_duration", spec.mean_duration},
                             {"size_min", spec.size_min},
                             {"size_max", spec.size_max},
                             {"max_delay", spec.max_delay}});
  }
  j["operators"] = json::array();
  for (Operator op : all_operators) {
    json rates;
    for (ServiceKind s : all_services) {
      rates[to_string(s)] = {
          {"normal", sc.rates.get(Mode::normal, op, s)},
          {"emergency", sc.rates.get(Mode::emergency, op, s)}};
    }
    j["operators"].push_back({{"name", sc.name_of(op)},
                              {"is_ps", op == Operator::ps},
                              {"rates", rates}});
  }
  json normal_levels;
  for (ServiceKind s : all_services)
    normal_levels[to_string(s)] =
        sc.policy.level(Mode::normal, Operator::ps, s);
  json emergency_levels;
  for (Operator op : all_operators) {
    json levels;
    for (ServiceKind s : all_services)
      levels[to_string(s)] = sc.policy.level(Mode::emergency, op, s);
    emergency_levels[sc.name_of(op)] = levels;
  }
  j["policy"] = {{"normal", normal_levels}, {"emergency", emergency_levels}};
  j["algorithm"] = to_string(sc.algorithm);
  j["smoothing_window"] = sc.smoothing_window;
  j["options"] = {
      {"edi_counts_border", sc.options.edi_counts_border},
      {"duration_model", sc.options.duration_model == DurationModel::fixed
                             ? "fixed"
                             : "exponential"},
      {"arrival_eligibility",
       sc.options.arrival_eligibility == ArrivalEligibility::next_round
           ? "next_round"
           : "same_round"}};
  return j.dump(2) + "\n";
}

}  // namespace embedsim
