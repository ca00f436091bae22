#include "instance_io.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "qsde/errors.hpp"

namespace qsde::cli {
namespace {

using nlohmann::json;

const std::string kData = QSDE_TEST_DATA_DIR;

json minimal_scalar() {
  const json zero = json::array({json::array({json::array({0.0, 0.0})})});
  return {{"d", 1},
          {"m", 1},
          {"phi", json::array({json::array({json::array({json::array({json::array({-1.0, 0.0})})}), zero}),
                               json::array({zero, zero})})}};
}

std::string error_of(const json& doc) {
  try {
    parse_instance(doc);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseInstance, MinimalScalarLoads) {
  const auto instance = parse_instance(minimal_scalar());
  EXPECT_EQ(instance.d, 1);
  EXPECT_EQ(instance.m, 1);
  EXPECT_EQ(instance.p, 1);
  EXPECT_EQ(instance.p_prime, 1);
  EXPECT_EQ(instance.phi.theta(0, 0)(0, 0), Complex(-1.0));
  EXPECT_EQ(instance.kappa[0](0, 0), Complex(1.0));
  EXPECT_TRUE(instance.step_functions.count("zero"));
  EXPECT_FALSE(instance.involution.has_value());
  EXPECT_FALSE(instance.coalgebra.has_value());
}

TEST(ParseInstance, WrongInnerDimensionNamesField) {
  json doc = minimal_scalar();
  doc["phi"][0][1] = json::array({json::array({json::array({0.0, 0.0}), json::array({0.0, 0.0})})});
  const auto message = error_of(doc);
  EXPECT_NE(message.find("phi[0][1]"), std::string::npos) << message;
  EXPECT_NE(message.find("1x1"), std::string::npos) << message;
  EXPECT_NE(message.find("1x2"), std::string::npos) << message;
}

TEST(ParseInstance, MissingKappaDefaultsToDiagonalEmbedding) {
  json doc = minimal_scalar();
  doc["m"] = 2;
  const json z = json::array({0.0, 0.0});
  const json block = json::array({json::array({z, z}), json::array({z, z})});
  doc["phi"] = json::array({json::array({block, block}), json::array({block, block})});
  const auto instance = parse_instance(doc);
  EXPECT_EQ(instance.kappa, InitialMap::diagonal_embedding(2));
}

TEST(ParseInstance, MissingKappaWithOtherShapeIsAnError) {
  json doc = minimal_scalar();
  doc["p"] = 2;
  EXPECT_NE(error_of(doc).find("kappa"), std::string::npos);
}

TEST(ParseInstance, RejectsNonFiniteNumbers) {
  json doc = minimal_scalar();
  doc["phi"][0][0][0][0] = json::array({std::numeric_limits<double>::quiet_NaN(), 0.0});
  EXPECT_NE(error_of(doc).find("phi[0][0][0][0][0]"), std::string::npos);
  doc = minimal_scalar();
  doc["defaults"] = {{"t", std::numeric_limits<double>::infinity()}};
  EXPECT_NE(error_of(doc).find("defaults.t"), std::string::npos);
}

TEST(ParseInstance, ComplexNumbersArePairs) {
  json doc = minimal_scalar();
  doc["phi"][0][0][0][0] = -1.0;
  EXPECT_NE(error_of(doc).find("[re, im]"), std::string::npos);
}

TEST(ParseInstance, StepFunctionErrorsCarryPath) {
  json doc = minimal_scalar();
  doc["step_functions"] = {{"g", {{"breakpoints", {1.0, 0.5}},
                                  {"values", {{{1.0, 0.0}}, {{0.0, 0.0}}}}}}};
  EXPECT_NE(error_of(doc).find("step_functions.g"), std::string::npos);
  doc["step_functions"] = {{"g", {{"breakpoints", {1.0}}, {"values", {{{1.0, 0.0}, {0.0, 0.0}}}}}}};
  EXPECT_NE(error_of(doc).find("step_functions.g.values[0]"), std::string::npos);
}

TEST(ParseInstance, UnknownDefaultStepFunction) {
  json doc = minimal_scalar();
  doc["defaults"] = {{"g", "missing"}};
  EXPECT_NE(error_of(doc).find("defaults.g"), std::string::npos);
}

TEST(ParseInstance, MissingFieldsAreNamed) {
  json doc = minimal_scalar();
  doc.erase("phi");
  EXPECT_NE(error_of(doc).find("phi: missing"), std::string::npos);
  EXPECT_THROW(parse_instance(json::array()), SchemaError);
}

TEST(ParseInstance, CoalgebraShapesChecked) {
  json doc = minimal_scalar();
  const json one = json::array({json::array({json::array({1.0, 0.0})})});
  doc["coalgebra"] = {{"delta", json::array({one})},
                      {"counit", json::array({json::array({1.0, 0.0})})},
                      {"varphi", json::array({one})}};
  EXPECT_NE(error_of(doc).find("coalgebra.varphi[0]"), std::string::npos);
}

TEST(ParseInstance, FileErrors) {
  EXPECT_THROW(parse_instance_file(kData + "/does_not_exist.json"), SchemaError);
}

TEST(ParseInstance, FeConstantChoices) {
  json doc = minimal_scalar();
  doc["constants"] = {{"fe_constant", "linear"}};
  EXPECT_EQ(parse_instance(doc).fe_constant.kind, FockConstant::Kind::linear);
  doc["constants"] = {{"fe_constant", 2.5}};
  const auto fixed = parse_instance(doc).fe_constant;
  EXPECT_EQ(fixed.kind, FockConstant::Kind::fixed);
  EXPECT_EQ(fixed.value, 2.5);
  doc["constants"] = {{"fe_constant", "large"}};
  EXPECT_NE(error_of(doc).find("constants.fe_constant"), std::string::npos);
}

class DataFile : public ::testing::TestWithParam<const char*> {};

TEST_P(DataFile, RoundTripIsIdentity) {
  const auto first = parse_instance_file(kData + "/" + GetParam());
  const auto serialized = to_json(first);
  const auto second = parse_instance(serialized);
  EXPECT_TRUE(first == second);
  EXPECT_EQ(to_json(second).dump(), serialized.dump());
}

INSTANTIATE_TEST_SUITE_P(Instances, DataFile,
                         ::testing::Values("scalar.json", "noncommuting.json",
                                           "broken_involution.json", "two_noise.json",
                                           "group_like.json", "divided_power.json"));

TEST(RoundTrip, AwkwardDoublesSurvive) {
  json doc = minimal_scalar();
  doc["phi"][0][0][0][0] = json::array({0.1 + 0.2, -1.0 / 3.0});
  doc["constants"] = {{"fe_constant", 1.0 / 7.0}};
  const auto first = parse_instance(doc);
  EXPECT_TRUE(parse_instance(to_json(first)) == first);
}

TEST(RoundTrip, EqualityNoticesChanges) {
  const auto a = parse_instance_file(kData + "/noncommuting.json");
  auto b = a;
  b.phi.theta(1, 0)(0, 1) += 1e-15;
  EXPECT_FALSE(a == b);
  b = a;
  b.involution.reset();
  EXPECT_FALSE(a == b);
  b = a;
  b.defaults.slots = 32;
  EXPECT_FALSE(a == b);
}

}  // namespace
}  // namespace qsde::cli
