#include "ncm/suite.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace ncm;
using nlohmann::json;

namespace {

SuiteConfig quick(std::set<std::string> modules) {
  SuiteConfig c;
  c.modules = std::move(modules);
  return c;
}

}  // namespace

TEST(SuiteConfig, DefaultsAndParsing) {
  const SuiteConfig c = SuiteConfig::from_json(json::object());
  EXPECT_TRUE(c.modules.empty());
  EXPECT_EQ(c.p_grid.size(), 4u);
  const SuiteConfig d = SuiteConfig::from_json(json::parse(
      R"({"seed": 5, "modules": ["gadget-matrices"], "tolerances": {"gadget.compact": 1e-3},
          "dim_caps": {"gadget-matrices": 6}, "output": {"path": "r.csv", "format": "csv"}})"));
  EXPECT_EQ(d.seed, 5u);
  EXPECT_EQ(d.cap("gadget-matrices"), 6);
  EXPECT_EQ(d.format, ReportFormat::Csv);
  EXPECT_EQ(d.output, "r.csv");
  const SuiteConfig back = SuiteConfig::from_json(d.to_json());
  EXPECT_EQ(back.to_json(), d.to_json());
}

TEST(SuiteConfig, Rejects) {
  for (const char* text : {R"({"bogus": 1})", R"({"modules": ["nope"]})", R"({"tolerances": {"nope": 1}})",
                           R"({"tolerances": {"gadget.compact": -1}})", R"({"p_grid": []})",
                           R"({"p_grid": [0]})", R"({"dim_caps": {"gadget-matrices": 50}})",
                           R"({"seed": "x"})", R"({"output": {"format": "xml"}})"})
    EXPECT_THROW(SuiteConfig::from_json(json::parse(text)), ConfigError) << text;
}

TEST(Registry, AnchorsAndModules) {
  const auto modules = suite_modules();
  EXPECT_EQ(modules.size(), 7u);
  std::set<std::string> names;
  for (const auto& c : suite_checks()) {
    EXPECT_TRUE(known_anchors().count(c.anchor)) << c.name;
    EXPECT_TRUE(std::find(modules.begin(), modules.end(), c.module) != modules.end()) << c.name;
    EXPECT_TRUE(names.insert(c.name).second) << "duplicate " << c.name;
  }
}

TEST(RunSuite, DefaultConfigPasses) {
  const ReportDocument doc = run_suite(SuiteConfig{});
  EXPECT_EQ(doc.total, static_cast<int>(suite_checks().size()));
  for (const auto& r : doc.records) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
  EXPECT_EQ(doc.exit_status(), 0);
  EXPECT_EQ(doc.passed + doc.failed, doc.total);
  EXPECT_TRUE(std::is_sorted(doc.records.begin(), doc.records.end(),
                             [](const auto& a, const auto& b) { return a.name < b.name; }));
  for (const auto& r : doc.records) EXPECT_TRUE(known_anchors().count(r.anchor));
  EXPECT_EQ(doc.to_json()["config"]["seed"], doc.config["seed"]);
}

TEST(RunSuite, ModuleSelection) {
  const ReportDocument doc = run_suite(quick({"gadget-matrices"}));
  ASSERT_GT(doc.total, 0);
  for (const auto& r : doc.records) EXPECT_EQ(r.module, "gadget-matrices");
}

TEST(RunSuite, ZeroToleranceFails) {
  SuiteConfig c = quick({"corner-norms"});
  c.tolerances["psi.ode_residual"] = 0.0;
  const ReportDocument doc = run_suite(c);
  EXPECT_EQ(doc.exit_status(), 1);
  for (const auto& r : doc.records) EXPECT_EQ(r.pass, r.name != "psi.ode_residual") << r.name;
}

TEST(RunSuite, Deterministic) {
  SuiteConfig c = quick({"star-distribution", "even-p-expansion", "core-algebra"});
  c.seed = 99;
  const ReportDocument a = run_suite(c);
  const ReportDocument b = run_suite(c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].measured, b.records[i].measured);
}

TEST(RunSuite, CsvHasOneRowPerRecord) {
  const ReportDocument doc = run_suite(quick({"binomial-combinatorics"}));
  const std::string csv = doc.to_csv();
  EXPECT_EQ(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')), doc.total + 1);
}

TEST(Seed, Environment) {
  ::setenv(kSeedEnvVar, "123", 1);
  EXPECT_EQ(default_seed(), 123u);
  ::setenv(kSeedEnvVar, "12x", 1);
  EXPECT_THROW(default_seed(), ConfigError);
  ::unsetenv(kSeedEnvVar);
  EXPECT_EQ(default_seed(), kDefaultSeed);
}
