#include "commands.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "qsde/errors.hpp"

namespace qsde::cli {
namespace {

using nlohmann::json;

const std::string kData = QSDE_TEST_DATA_DIR;

Instance load(const std::string& name) { return parse_instance_file(kData + "/" + name); }

Complex entry(const json& doc, int image, int row, int col) {
  const auto& z = doc["entries"][image][row][col];
  return {z[0].get<double>(), z[1].get<double>()};
}

Options with_engine(const std::string& engine) {
  Options o;
  o.engine = engine;
  return o;
}

void expect_pass_iff_within_bound(const json& doc) {
  for (const auto& record : doc["checks"]) {
    if (record.contains("error")) {
      EXPECT_FALSE(record["pass"].get<bool>());
      continue;
    }
    EXPECT_EQ(record["pass"].get<bool>(),
              record["residual"].get<double>() <= record["bound"].get<double>())
        << record.dump();
  }
}

bool has_check(const json& doc, const std::string& prefix) {
  for (const auto& record : doc["checks"]) {
    if (record["name"].get<std::string>().rfind(prefix, 0) == 0) return true;
  }
  return false;
}

TEST(Solve, ScalarSemigroupIsClosedForm) {
  const auto out = run("solve", load("scalar.json"), with_engine("semigroup"));
  ASSERT_EQ(out.exit_code, kPass) << out.document.dump();
  EXPECT_TRUE(out.document["normalized"].get<bool>());
  EXPECT_NEAR(std::abs(entry(out.document, 0, 0, 0) - std::exp(-1.0)), 0.0, 1e-12);
}

TEST(Solve, ScalarGuichardetWithinTailBound) {
  Options o = with_engine("guichardet");
  const auto out = run("solve", load("scalar.json"), o);
  ASSERT_EQ(out.exit_code, kPass);
  EXPECT_EQ(out.document["truncation_level"], 18);
  EXPECT_LE(std::abs(entry(out.document, 0, 0, 0) - std::exp(-1.0)),
            out.document["tail_bound"].get<double>() + 1e-15);
  o.truncation = 3;
  const auto coarse = run("solve", load("scalar.json"), o);
  const double tail = coarse.document["tail_bound"].get<double>();
  EXPECT_NEAR(tail, 0.0516, 5e-5);
  EXPECT_LE(std::abs(entry(coarse.document, 0, 0, 0) - std::exp(-1.0)), tail);
}

TEST(Solve, ScalarToyFockWithinProductFormulaError) {
  const auto out = run("solve", load("scalar.json"), with_engine("toyfock"));
  ASSERT_EQ(out.exit_code, kPass);
  EXPECT_EQ(out.document["slots"], 64);
  EXPECT_LE(std::abs(entry(out.document, 0, 0, 0) - std::exp(-1.0)), 8e-3);
  // (1 - 1/64)^64 and (1 - 1/32)^32 differ by about e^-1 / 128.
  const double estimate = out.document["error_estimate"].get<double>();
  EXPECT_NEAR(estimate, std::pow(1.0 - 1.0 / 64, 64) - std::pow(1.0 - 1.0 / 32, 32), 1e-12);
}

TEST(Solve, RectangularKappaShape) {
  const auto out = run("solve", load("two_noise.json"), with_engine("semigroup"));
  ASSERT_EQ(out.exit_code, kPass);
  EXPECT_EQ(out.document["rows"], 2);
  EXPECT_EQ(out.document["cols"], 1);
  EXPECT_EQ(out.document["entries"].size(), 3u);
}

TEST(Solve, GuardViolationsExitTwo) {
  Options o = with_engine("guichardet");
  o.truncation = 0;
  o.t = 5.0;
  const auto series = run("solve", load("scalar.json"), o);
  EXPECT_EQ(series.exit_code, kConfigError);
  EXPECT_NE(series.document["error"].get<std::string>().find("truncation level too small"),
            std::string::npos);

  o = with_engine("toyfock");
  o.g = "bump";
  o.slots = {3};
  const auto toy = run("solve", load("scalar.json"), o);
  EXPECT_EQ(toy.exit_code, kConfigError);
  EXPECT_TRUE(toy.document.contains("error"));
}

TEST(Solve, ConfigurationErrorsExitTwo) {
  EXPECT_EQ(run("solve", load("scalar.json"), with_engine("euler")).exit_code, kConfigError);
  Options o;
  o.g = "nope";
  const auto out = run("solve", load("scalar.json"), o);
  EXPECT_EQ(out.exit_code, kConfigError);
  EXPECT_NE(out.document["error"].get<std::string>().find("bump"), std::string::npos);
  EXPECT_EQ(run("launch", load("scalar.json"), {}).exit_code, kConfigError);
}

TEST(Verify, ScalarAllPasses) {
  const auto out = run("verify", load("scalar.json"), {});
  EXPECT_EQ(out.exit_code, kPass) << out.document.dump(1);
  expect_pass_iff_within_bound(out.document);
  EXPECT_EQ(out.document["settings"]["seed"], 11);
  for (const char* name : {"cocycle_identity", "grid_refinement", "engine_agreement",
                           "reconstruction_roundtrip", "reconstruction_resolve", "conjugate_",
                           "lifting_n2", "lifting_n3", "composition_bound",
                           "tail_monotonicity", "fundamental_estimate", "hoelder",
                           "weak_residual"}) {
    EXPECT_TRUE(has_check(out.document, name)) << name;
  }
  EXPECT_EQ(out.document["skipped"], json::array({"coalg"}));
}

class VerifyInstance : public ::testing::TestWithParam<const char*> {};

TEST_P(VerifyInstance, AllPasses) {
  const auto out = run("verify", load(GetParam()), {});
  EXPECT_EQ(out.exit_code, kPass) << out.document.dump(1);
  expect_pass_iff_within_bound(out.document);
}

INSTANTIATE_TEST_SUITE_P(Instances, VerifyInstance,
                         ::testing::Values("noncommuting.json", "two_noise.json",
                                           "group_like.json", "divided_power.json"));

TEST(Verify, BrokenInvolutionIsStructuralError) {
  Options o;
  o.suite = "conjugate";
  const auto out = run("verify", load("broken_involution.json"), o);
  EXPECT_EQ(out.exit_code, kConfigError);
  ASSERT_FALSE(out.document["checks"].empty());
  for (const auto& record : out.document["checks"]) {
    EXPECT_FALSE(record["pass"].get<bool>());
    EXPECT_NE(record["error"].get<std::string>().find("not involutive"), std::string::npos);
  }
}

TEST(Verify, MissingSectionsAreErrorsOnlyWhenAskedFor) {
  Options o;
  o.suite = "coalg";
  EXPECT_EQ(run("verify", load("scalar.json"), o).exit_code, kConfigError);
  o.suite = "conjugate";
  EXPECT_EQ(run("verify", load("two_noise.json"), o).exit_code, kConfigError);
  o.suite = "all";
  const auto out = run("verify", load("two_noise.json"), o);
  EXPECT_EQ(out.exit_code, kPass);
  EXPECT_EQ(out.document["skipped"], json::array({"conjugate", "coalg"}));
  o.suite = "everything";
  EXPECT_EQ(run("verify", load("scalar.json"), o).exit_code, kConfigError);
}

TEST(Verify, BoundsSuiteContents) {
  Options o;
  o.suite = "bounds";
  const auto out = run("verify", load("noncommuting.json"), o);
  EXPECT_EQ(out.exit_code, kPass) << out.document.dump(1);
  std::set<std::string> seen;
  for (const auto& record : out.document["checks"]) {
    const auto name = record["name"].get<std::string>();
    seen.insert(name.substr(0, name.find(' ')));
  }
  EXPECT_EQ(seen, (std::set<std::string>{"composition_bound", "tail_monotonicity",
                                         "fundamental_estimate", "hoelder"}));
  // The instance plus its perturbations.
  EXPECT_EQ(out.document["checks"].size(), 4u * (kPerturbations + 1));
}

TEST(Verify, ToleranceOverrideReplacesFixedBoundsOnly) {
  Options o;
  o.suite = "lifting";
  o.tol = -1.0;
  const auto out = run("verify", load("scalar.json"), o);
  EXPECT_EQ(out.exit_code, kVerificationFailure);
  for (const auto& record : out.document["checks"]) EXPECT_EQ(record["bound"], -1.0);
  o.suite = "bounds";
  const auto bounds = run("verify", load("scalar.json"), o);
  EXPECT_EQ(bounds.exit_code, kPass);
}

TEST(Verify, ReportsAreReproducible) {
  Options o;
  o.timing = false;
  o.seed = 1234;
  const auto a = run("verify", load("noncommuting.json"), o);
  const auto b = run("verify", load("noncommuting.json"), o);
  EXPECT_EQ(a.document.dump(), b.document.dump());
  EXPECT_EQ(a.document["settings"]["seed"], 1234);
  o.seed = 1235;
  const auto c = run("verify", load("noncommuting.json"), o);
  EXPECT_NE(a.document.dump(), c.document.dump());
}

TEST(Reconstruct, ScalarTableAndResiduals) {
  const auto out = run("reconstruct", load("scalar.json"), {});
  EXPECT_EQ(out.exit_code, kPass) << out.document.dump(1);
  EXPECT_EQ(out.document["table"].size(), 4u);
  EXPECT_EQ(out.document["checks"].size(), 2u);
  const auto& theta00 = out.document["phi"][0][0][0][0];
  EXPECT_NEAR(theta00[0].get<double>(), -1.0, 1e-12);
}

TEST(Converge, ScalarRatiosNearTwo) {
  const auto out = run("converge", load("scalar.json"), {});
  EXPECT_EQ(out.exit_code, kPass);
  const auto& table = out.document["table"];
  ASSERT_EQ(table.size(), 4u);
  EXPECT_TRUE(table[0]["ratio"].is_null());
  for (std::size_t i = 1; i < table.size(); ++i) {
    EXPECT_NEAR(table[i]["ratio"].get<double>(), 2.0, 0.1);
  }
}

TEST(Converge, ZeroCoefficientHasZeroErrors) {
  auto instance = load("scalar.json");
  instance.phi = Coefficient(1, 1);
  const auto out = run("converge", instance, {});
  EXPECT_EQ(out.exit_code, kPass);
  for (const auto& row : out.document["table"]) EXPECT_EQ(row["error"], 0.0);
}

TEST(Converge, NonCommutingRatios) {
  const auto out = run("converge", load("noncommuting.json"), {});
  EXPECT_EQ(out.exit_code, kPass) << out.document.dump(1);
  for (std::size_t i = 1; i < out.document["table"].size(); ++i) {
    EXPECT_GE(out.document["table"][i]["ratio"].get<double>(), 1.3);
  }
}

TEST(Converge, SlotListValidation) {
  Options o;
  o.slots = {16, 8};
  EXPECT_EQ(run("converge", load("scalar.json"), o).exit_code, kConfigError);
  EXPECT_EQ(parse_slot_list("8,16,32"), (std::vector<int>{8, 16, 32}));
  EXPECT_THROW(parse_slot_list("8,x"), SchemaError);
  EXPECT_THROW(parse_slot_list("8,,16"), SchemaError);
  EXPECT_THROW(parse_slot_list("0"), SchemaError);
}

TEST(Coalg, DividedPowerReport) {
  const auto out = run("coalg", load("divided_power.json"), {});
  EXPECT_EQ(out.exit_code, kPass) << out.document.dump(1);
  EXPECT_EQ(out.document["l_t"].size(), 3u);
  for (const auto& record : out.document["checks"]) {
    if (record["name"].get<std::string>().rfind("localisation", 0) == 0) {
      EXPECT_EQ(record["detail"]["dims"], json::array({1, 2, 3}));
    }
  }
  EXPECT_EQ(run("coalg", load("scalar.json"), {}).exit_code, kConfigError);
}

}  // namespace
}  // namespace qsde::cli
