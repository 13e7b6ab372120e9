#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "spectra/config.hpp"
#include "spectra/errors.hpp"

using namespace spectra;
using nlohmann::json;

namespace {

std::string message_of(const json& doc) {
  try {
    potential_from_json(doc);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("JSON potential round trip") {
  const json doc = json::parse(R"({
    "plateau": [-1.5, 2.0],
    "left_wing": {"type": "power", "exponent": 2.0, "coefficient": 0.5},
    "right_wing": {"type": "custom-series", "terms": [{"coefficient": 1.0, "exponent": 4.0}, [0.25, 6.0]]}
  })");
  const auto pot = potential_from_json(doc);
  CHECK(pot.plateau_left() == -1.5);
  CHECK(pot.plateau_right() == 2.0);
  CHECK(pot.left_wing().exponent() == 2.0);
  CHECK(pot.right_wing().terms().size() == 2);
  const auto again = potential_from_json(potential_to_json(pot));
  CHECK(again.left_wing() == pot.left_wing());
  CHECK(again.right_wing() == pot.right_wing());
}

TEST_CASE("quadratic wings are given by curvature") {
  const auto pot = potential_from_json(json::parse(R"({
    "plateau": [0, 1], "left_wing": {"type": "quadratic", "curvature": 4},
    "right_wing": {"type": "quadratic", "curvature": 1}})"));
  CHECK(pot.kappa_left().value() == doctest::Approx(4.0));
  CHECK(pot.eval(2.0) == doctest::Approx(0.5));
}

TEST_CASE("errors name the offending field") {
  CHECK(message_of(json::parse(R"({"left_wing": {}, "right_wing": {}})")).find("plateau") != std::string::npos);
  const auto missing = message_of(json::parse(R"({"plateau": [0, 1],
    "left_wing": {"type": "power", "coefficient": 1},
    "right_wing": {"type": "quadratic", "curvature": 1}})"));
  CHECK(missing.find("left_wing.exponent") != std::string::npos);
  const auto unknown = message_of(json::parse(R"({"plateau": [0, 1],
    "left_wing": {"type": "quadratic", "curvature": 1},
    "right_wing": {"type": "cubic"}})"));
  CHECK(unknown.find("right_wing.type") != std::string::npos);
  const auto negative = message_of(json::parse(R"({"plateau": [0, 1],
    "left_wing": {"type": "quadratic", "curvature": -1},
    "right_wing": {"type": "quadratic", "curvature": 1}})"));
  CHECK(negative.find("left_wing") != std::string::npos);
}

TEST_CASE("TOML subset maps onto the JSON schema") {
  const auto doc = parse_toml(R"(
# counterexample written out
plateau = [-1.5707963267948966, 1.5707963267948966]

[left_wing]
type = "power"
exponent = 2.0
coefficient = 0.5

[right_wing]
type = "custom-series"
terms = [{coefficient = 0.5, exponent = 2}, {coefficient = 1e-1, exponent = 3}]
)");
  CHECK(doc["left_wing"]["coefficient"].get<double>() == 0.5);
  const auto pot = potential_from_json(doc);
  CHECK(pot.right_wing().terms().size() == 2);
  CHECK(pot.right_wing().terms()[1].coefficient == 0.1);
  CHECK_THROWS_AS(parse_toml("plateau = [1, 2"), InvalidInput);
}

TEST_CASE("built-in names and files") {
  CHECK(load_potential("counterexample").symmetric());
  CHECK(load_potential("gaussian").degenerate());
  CHECK(load_potential("quartic").left_wing().exponent() == 4.0);
  const auto asym = load_potential("asymmetric(1, 4)");
  CHECK(asym.kappa_right().value() == doctest::Approx(4.0));
  CHECK_THROWS_AS(load_potential("asymmetric(1, x)"), InvalidInput);
  CHECK_THROWS_AS(load_potential("/nonexistent/potential.toml"), InvalidInput);

  const std::string path = "test_config_potential.toml";
  {
    std::ofstream out(path);
    out << "plateau = [0.0, 2.0]\n"
           "left_wing = {type = \"quadratic\", curvature = 2.0}\n"
           "right_wing = {type = \"power\", exponent = 4, coefficient = 1}\n";
  }
  const auto pot = load_potential(path);
  CHECK(pot.width() == 2.0);
  CHECK(pot.right_wing().exponent() == 4.0);
  std::remove(path.c_str());
}
