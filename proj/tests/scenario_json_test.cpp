#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "dcfcoex/scenario_json.hpp"

namespace dcfcoex {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dcfcoex_" + name);
}

TEST(ScenarioJson, RoundTripsRandomScenarios) {
  std::mt19937_64 gen(42);
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen); };
  for (int i = 0; i < 200; ++i) {
    ScenarioConfig c;
    c.dcf.cw_min = static_cast<int>((1 << pick(1, 6)) - 1);
    c.dcf.cw_max = static_cast<int>(((c.dcf.cw_min + 1) << pick(0, 5)) - 1);
    c.dcf.retry_limit_R = static_cast<int>(pick(0, 12));
    c.dcf.slot_sigma = Micros{pick(1, 20)};
    c.dcf.ack_timeout = Micros{pick(0, 200)};
    c.dcf.difs = Micros{pick(1, 60)};
    c.interference = InterferencePattern{Micros{pick(0, 50000)}, Micros{pick(5000, 90000)}, Micros{pick(0, 9999)}};
    const auto nclasses = pick(1, 3);
    for (int k = 0; k < nclasses; ++k)
      c.classes.push_back(ClassSpec{static_cast<int>(pick(0, 30)), Micros{pick(100, 4000)}, pick(8, 20000)});
    c.classes[0].count_n = std::max(c.classes[0].count_n, 1);
    c.txop.limit = Micros{pick(0, 4000)};

    const auto back = scenario_from_json(json::parse(to_json(c).dump()));
    EXPECT_EQ(back, c);
    EXPECT_EQ(validate(back), validate(c));
  }
}

TEST(ScenarioJson, MissingKeysKeepDefaults) {
  const auto c = scenario_from_json(json::parse(R"({"interference": {"off_T": 20000}})"));
  auto expected = default_scenario();
  expected.interference.off_T = Micros{20000};
  EXPECT_EQ(c, expected);
}

TEST(ScenarioJson, RejectsUnknownKeys) {
  try {
    scenario_from_json(json::parse(R"({"dcf": {"cw_minn": 7}})"));
    FAIL();
  } catch (const InvalidParameter& e) {
    EXPECT_EQ(e.field(), "dcf.cw_minn");
  }
  EXPECT_THROW(scenario_from_json(json::parse(R"({"lte": {}})")), InvalidParameter);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"classes": [{"rate": 6}]})")), InvalidParameter);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"txop": {"limit": 1.5}})")), InvalidParameter);
  EXPECT_THROW(scenario_from_json(json::parse(R"([1, 2])")), InvalidParameter);
}

TEST(ScenarioFile, SaveLoadAndErrors) {
  const auto path = temp_file("scenario.json");
  auto c = default_scenario();
  c.interference.phase = Micros{1234};
  save_scenario(c, path.string());
  EXPECT_EQ(load_scenario(path.string()), c);

  {
    std::ofstream out(path);
    out << "{\"dcf\": {";
  }
  EXPECT_THROW(load_scenario(path.string()), InvalidParameter);
  std::filesystem::remove(path);

  EXPECT_THROW(load_scenario((temp_file("missing_dir") / "nope.json").string()), ScenarioIoError);
  EXPECT_THROW(save_scenario(c, (temp_file("missing_dir") / "nope.json").string()), ScenarioIoError);
}

TEST(Overrides, SetGroupAndClassFields) {
  auto c = apply_overrides(default_scenario(), {"interference.off_T=20000", "classes.1.count_n=9", "dcf.ack_timeout=100"});
  EXPECT_EQ(c.interference.off_T, Micros{20000});
  EXPECT_EQ(c.classes[1].count_n, 9);
  EXPECT_EQ(c.classes[0].count_n, 1);
  EXPECT_EQ(c.dcf.ack_timeout, Micros{100});
}

TEST(Overrides, RejectBadInput) {
  const auto base = default_scenario();
  for (const char* bad : {"interference.off_t=1", "classes.2.count_n=1", "classes.x.count_n=1", "dcf=3", "txop.limit=abc",
                          "txop.limit=1.5", "txop.limit", "=4", "classes.0=1"}) {
    EXPECT_THROW(apply_override(base, bad), InvalidParameter) << bad;
  }
}

}  // namespace
}  // namespace dcfcoex
