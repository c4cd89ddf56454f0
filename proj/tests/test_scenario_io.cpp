#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "embedsim/errors.hpp"
#include "embedsim/scenario_io.hpp"
#include "json.hpp"

using namespace embedsim;

namespace {

const std::string kBundled =
    std::string(EMBEDSIM_SOURCE_DIR) + "/scenarios/paper.scenario";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string validation_field(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("the bundled scenario file is the built-in default setup") {
  const Scenario sc = load_scenario_file(kBundled);
  CHECK(sc == Scenario::paper_defaults());
}

TEST_CASE("serialization round trips byte for byte") {
  const std::string text = slurp(kBundled);
  const Scenario sc = parse_scenario(text);
  CHECK(serialize_scenario(sc) == text);

  Scenario tweaked = Scenario::paper_defaults();
  tweaked.algorithm = EngineKind::static_km;
  tweaked.smoothing_window = 7;
  tweaked.options.duration_model = DurationModel::fixed;
  tweaked.options.arrival_eligibility = ArrivalEligibility::next_round;
  tweaked.options.edi_counts_border = true;
  tweaked.operator_names = {"blue-light", "carrier_x"};
  tweaked.rates.set(Mode::emergency, Operator::commercial, ServiceKind::msg,
                    0.125);
  CHECK(parse_scenario(serialize_scenario(tweaked)) == tweaked);
}

TEST_CASE("operator order in the file does not matter") {
  const Scenario sc = Scenario::paper_defaults();
  auto j = nlohmann::ordered_json::parse(serialize_scenario(sc));
  std::swap(j["operators"][0], j["operators"][1]);
  const Scenario back = parse_scenario(j.dump(2));
  CHECK(back == sc);
}

TEST_CASE("unknown keys are rejected with their path") {
  Scenario sc = Scenario::paper_defaults();
  std::string text = serialize_scenario(sc);

  auto inject = [&](const std::string& anchor, const std::string& extra) {
    std::string copy = text;
    const auto pos = copy.find(anchor);
    REQUIRE(pos != std::string::npos);
    copy.insert(pos, extra);
    return copy;
  };

  CHECK(validation_field(inject("\"schema\"", "\"surprise\": 1, ")) ==
        "surprise");
  CHECK(validation_field(inject("\"F\"", "\"depth\": 2, ")) ==
        "substrate.depth");
  CHECK(validation_field(inject("\"kind\": \"voice\"", "\"color\": 3, ")) ==
        "services[0].color");
  CHECK(validation_field(inject("\"normal\": 0.14", "\"peak\": 9, ")) ==
        "operators[0].rates.voice.peak");
}

TEST_CASE("missing required fields are rejected with their path") {
  const auto base =
      nlohmann::ordered_json::parse(serialize_scenario(Scenario::paper_defaults()));

  auto j = base;
  j["operators"][1]["rates"].erase("msg");
  CHECK(validation_field(j.dump(2)) == "operators[1].rates.msg");

  j = base;
  j["operators"][1]["rates"]["voice"].erase("emergency");
  CHECK(validation_field(j.dump(2)) ==
        "operators[1].rates.voice.emergency");

  j = base;
  j.erase("horizon");
  CHECK(validation_field(j.dump(2)) == "horizon");

  j = base;
  j["services"].erase(1);
  CHECK(validation_field(j.dump(2)) == "services");
}

TEST_CASE("malformed documents raise parse errors") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[1, 2]"), ValidationError);
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/file.scenario"),
                  ParseError);
}

TEST_CASE("field values are type checked") {
  std::string text = serialize_scenario(Scenario::paper_defaults());
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string copy = text;
    const auto pos = copy.find(from);
    REQUIRE(pos != std::string::npos);
    copy.replace(pos, from.size(), to);
    return copy;
  };

  CHECK(validation_field(replace("\"F\": 20", "\"F\": \"20\"")) ==
        "substrate.F");
  CHECK(validation_field(replace("\"F\": 20", "\"F\": 20.5")) ==
        "substrate.F");
  CHECK(validation_field(replace("\"is_ps\": true", "\"is_ps\": 1")) ==
        "operators[0].is_ps");
  CHECK(validation_field(replace("\"algorithm\": \"dynamic\"",
                                 "\"algorithm\": \"greedy\"")) == "algorithm");
  CHECK(validation_field(replace("\"kind\": \"msg\"", "\"kind\": \"mail\"")) ==
        "services[2].kind");
  CHECK(validation_field(replace("\"kind\": \"video\"",
                                 "\"kind\": \"voice\"")) ==
        "services[1].kind");
  CHECK(validation_field(replace("\"duration_model\": \"exponential\"",
                                 "\"duration_model\": \"weibull\"")) ==
        "options.duration_model");
  CHECK(validation_field(replace("\"is_ps\": false", "\"is_ps\": true")) ==
        "operators[1].is_ps");
}

TEST_CASE("domain validation runs on load") {
  std::string text = serialize_scenario(Scenario::paper_defaults());
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string copy = text;
    const auto pos = copy.find(from);
    REQUIRE(pos != std::string::npos);
    copy.replace(pos, from.size(), to);
    return copy;
  };

  CHECK(validation_field(replace("\"end\": 700", "\"end\": 1400")) ==
        "emergency.end");
  CHECK(validation_field(replace("\"size_max\": 25", "\"size_max\": 500")) ==
        "services[video].size_max");
  CHECK(validation_field(replace("\"algorithm\": \"dynamic\"",
                                 "\"algorithm\": \"oracle\"")) == "algorithm");
  CHECK(validation_field(replace("\"smoothing_window\": 25",
                                 "\"smoothing_window\": 0")) ==
        "smoothing_window");
}

TEST_CASE("optional blocks fall back to defaults") {
  const std::string text = serialize_scenario(Scenario::paper_defaults());
  // Chop policy, algorithm, smoothing_window and options off the tail.
  const auto pos = text.find(",\n  \"policy\"");
  REQUIRE(pos != std::string::npos);
  const std::string trimmed = text.substr(0, pos) + "\n}\n";
  const Scenario sc = parse_scenario(trimmed);
  CHECK(sc == Scenario::paper_defaults());
}
