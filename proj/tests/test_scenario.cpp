#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qfcs/error.hpp"
#include "qfcs/runner.hpp"
#include "qfcs/scenario.hpp"

using namespace qfcs;

namespace {

Scenario cyclic(double alpha, double xi) {
  Scenario s = default_scenario(ScenarioKind::cyclic_example);
  s = with_override(s, "cyclic.alpha", alpha);
  return with_override(s, "cyclic.xi", xi);
}

double number(const Json& j, const std::string& key) { return j.at(key).get<double>(); }

}  // namespace

TEST(Scenario, RejectsUnknownKeys) {
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"drvie", Json::object()}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"drive", {{"bogus", 1}}}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"drive", {{"params", {{"omega", 1.0}}}}}}), ValidationError);
}

TEST(Scenario, RejectsBadValues) {
  EXPECT_THROW(parse_scenario(Json{{"kind", "warp"}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"drive", {{"steps", "many"}}}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"drive", {{"duration", -1.0}}}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"grid", {{"points", 1}}}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "closed"}, {"state", {{"type", "squeezed"}}}}), ValidationError);
  EXPECT_THROW(parse_scenario(Json{{"kind", "open"}, {"environment", {{"preset", "bath"}}}}), ValidationError);
  try {
    parse_scenario(Json{{"kind", "closed"}, {"drive", {{"steps", 2.5}}}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("drive.steps"), std::string::npos);
  }
}

TEST(Scenario, YamlText) {
  const Json j = yaml_text_to_json(
      "kind: cyclic-example\n"
      "name: demo\n"
      "cyclic:\n"
      "  alpha: 0.5\n"
      "  xi: 0.25\n"
      "grid: {lambda_max: 2, points: 21}\n");
  const Scenario s = parse_scenario(j);
  EXPECT_EQ(s.kind, ScenarioKind::cyclic_example);
  EXPECT_EQ(s.name, "demo");
  EXPECT_DOUBLE_EQ(s.cyclic.alpha, 0.5);
  EXPECT_DOUBLE_EQ(s.cyclic.xi, 0.25);
  EXPECT_EQ(s.grid.points, 21);
  EXPECT_EQ(s.drive.protocol, "cyclic");
  EXPECT_EQ(s.state.type, "floquet");
}

TEST(Scenario, ResolvedRoundTrip) {
  for (const auto& name : scenario_kind_names()) {
    const Scenario s = default_scenario(parse_kind(name));
    const Json a = resolved(s);
    EXPECT_EQ(resolved(parse_scenario(a)), a) << name;
  }
}

TEST(Scenario, Overrides) {
  const Scenario s = default_scenario(ScenarioKind::closed);
  EXPECT_DOUBLE_EQ(with_override(s, "drive.params.omega0", 2.5).drive.params.at("omega0"), 2.5);
  EXPECT_EQ(with_override(s, "drive.steps", 64).drive.steps, 64);
  EXPECT_THROW(with_override(s, "drive", 1.0), ValidationError);
  EXPECT_THROW(with_override(s, "drive.params.nothing", 1.0), ValidationError);
  EXPECT_THROW(with_override(s, "drive.steps", 1.5), ValidationError);
}

TEST(Runner, DeterministicReports) {
  for (const auto& name : scenario_kind_names()) {
    const Scenario s = default_scenario(parse_kind(name));
    const RunResult a = run_scenario(s);
    const RunResult b = run_scenario(s);
    EXPECT_EQ(a.report(true), b.report(true)) << name;
    EXPECT_TRUE(a.passed()) << name;
  }
}

TEST(Runner, CyclicQuarterAngleVanishes) {
  const RunResult r = run_scenario(cyclic(0.7854, 0.6));
  EXPECT_LE(std::abs(number(r.headline, "first_moment")), 1e-10);
  EXPECT_LE(std::abs(number(r.headline, "tmp_average")), 1e-4);
  EXPECT_TRUE(r.passed());
}

TEST(Runner, CyclicThirdAngleNegativeWeight) {
  const RunResult r = run_scenario(cyclic(1.0472, 0.6283));
  EXPECT_LE(std::abs(number(r.headline, "first_moment")), 1e-10);
  EXPECT_LT(number(r.headline, "min_quasi_weight"), -1e-3);
  EXPECT_GT(std::abs(number(r.headline, "tmp_average")), 1e-2);
  EXPECT_GE(r.observations.at("dephased_min_weight").get<double>(), -1e-12);
}

TEST(Runner, OpenQubitExchangeLedger) {
  Scenario s = default_scenario(ScenarioKind::open);
  s = with_override(s, "environment.g", 0.1);
  const RunResult r = run_scenario(s);
  EXPECT_TRUE(r.passed());
  const Json& t = r.observations.at("totals");
  EXPECT_NEAR(number(t, "internal_energy_change"), number(t, "work_increments") + number(t, "heat"), 1e-10);
  EXPECT_NEAR(number(r.headline, "first_moment"), number(t, "work"), 1e-7);
  EXPECT_GT(std::abs(number(t, "heat")), 1e-6);
}

TEST(Sweep, CyclicAlphaZeros) {
  std::vector<double> alphas;
  for (int i = 0; i <= 16; ++i) alphas.push_back(i * std::numbers::pi / 32);
  const SweepResult sw = run_sweep(default_scenario(ScenarioKind::cyclic_example), "cyclic.alpha", alphas, 4);
  ASSERT_EQ(sw.runs.size(), alphas.size());
  EXPECT_TRUE(sw.passed());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double tmp = number(sw.runs[i].headline, "tmp_average");
    EXPECT_LE(std::abs(number(sw.runs[i].headline, "first_moment")), 1e-10);
    if (i == 0 || i == 8 || i == 16) {
      EXPECT_LE(std::abs(tmp), 1e-12) << alphas[i];
    } else {
      EXPECT_GT(std::abs(tmp), 1e-4) << alphas[i];
    }
    EXPECT_DOUBLE_EQ(sw.runs[i].scenario.cyclic.alpha, alphas[i]);
  }
  const Table t = sw.table();
  EXPECT_EQ(t.rows.size(), alphas.size());
}

TEST(Sweep, CyclicXiZeroAtStart) {
  const std::vector<double> xis{0.0, 0.3, 0.6, 0.9};
  const SweepResult sw = run_sweep(default_scenario(ScenarioKind::cyclic_example), "cyclic.xi", xis, 2);
  EXPECT_LE(std::abs(number(sw.runs[0].headline, "tmp_average")), 1e-12);
  for (std::size_t i = 1; i < xis.size(); ++i) EXPECT_GT(std::abs(number(sw.runs[i].headline, "tmp_average")), 1e-3);
}

TEST(Sweep, DualityDeviationHalves) {
  Json doc = {{"kind", "open"},
              {"drive", {{"protocol", "constant"}, {"duration", 2.0}, {"steps", 40}, {"params", {{"z", 0.5}}}}},
              {"state", {{"type", "superposition"}, {"amplitudes", {std::sqrt(0.5), std::sqrt(0.5)}}}},
              {"grid", {{"lambda_max", 3.0}, {"points", 61}}},
              {"environment", {{"preset", "qubit-exchange"}, {"frequency", 2.0}, {"state", "plus"}, {"duality", true}}}};
  const SweepResult sw = run_sweep(parse_scenario(doc), "environment.g", {0.1, 0.05, 0.025}, 3);
  ASSERT_TRUE(sw.passed());
  for (int i = 0; i < 2; ++i) {
    const double r = number(sw.runs[i].headline, "duality_deviation") / number(sw.runs[i + 1].headline, "duality_deviation");
    EXPECT_GE(r, 1.5);
    EXPECT_LE(r, 2.5);
  }
}
