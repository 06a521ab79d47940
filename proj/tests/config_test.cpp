#include "gred/config.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

namespace {

std::string error_of(const std::string& text) {
  try {
    gred::parse_config(text);
  } catch (const gred::ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, EmptyObjectGivesDefaults) {
  const auto cfg = gred::parse_config("{}");
  EXPECT_EQ(cfg.model.system.connections, 1850.0);
  EXPECT_EQ(cfg.model.control.w, 0.15);
  EXPECT_EQ(cfg.transient, 500u);
  EXPECT_EQ(cfg.scan.points, 50u);
  EXPECT_FALSE(cfg.x0.has_value());
  EXPECT_FALSE(cfg.model.a1_override.has_value());
}

TEST(Config, AllSections) {
  const auto cfg = gred::parse_config(R"({
    "system": {"N": 1350, "C": 300000, "d": 0.01, "M": 1, "B": 1500, "K": 1.2},
    "control": {"p_max": 1, "x_min": 0.1, "x_max": 0.5, "w": 0.3, "alpha": 0.6, "beta": 0.4},
    "orbit": {"x0": 0.25, "transient": 100, "samples": 20, "lyapunov_samples": 300},
    "scan": {"w_lo": 0.05, "w_hi": 0.9, "points": 30, "tol": 1e-3, "delta": 1e-5,
             "transient": 200, "samples": 40}
  })");
  EXPECT_EQ(cfg.model.system.connections, 1350.0);
  EXPECT_EQ(cfg.model.system.buffer, 1500.0);
  EXPECT_EQ(cfg.model.system.k_const, 1.2);
  EXPECT_EQ(cfg.model.control.shape, gred::BetaShape(0.6, 0.4));
  EXPECT_EQ(cfg.model.control.x_max, 0.5);
  EXPECT_EQ(*cfg.x0, 0.25);
  EXPECT_EQ(cfg.samples, 20u);
  EXPECT_EQ(cfg.lyapunov_samples, 300u);
  EXPECT_EQ(cfg.scan.w_hi, 0.9);
  EXPECT_EQ(cfg.scan.delta, 1e-5);
  EXPECT_EQ(cfg.scan.transient, 200u);
}

TEST(Config, ConstantOverrides) {
  const auto cfg = gred::parse_config(R"({"system": {"A1": 1.1, "A2": 1.5}})");
  EXPECT_EQ(cfg.model.a1(), 1.1);
  EXPECT_EQ(cfg.model.a2(), 1.5);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_NE(error_of(R"({"control": {"gamma": 1}})").find("control.gamma"), std::string::npos);
  EXPECT_NE(error_of(R"({"plot": {}})").find("plot"), std::string::npos);
  EXPECT_NE(error_of(R"({"control": {"w": "high"}})").find("control.w"), std::string::npos);
  EXPECT_NE(error_of(R"({"control": {"alpha": -1}})").find("control.alpha"), std::string::npos);
  EXPECT_NE(error_of(R"({"orbit": {"samples": 2.5}})").find("orbit.samples"), std::string::npos);
  EXPECT_NE(error_of("{\"control\": ").find("JSON"), std::string::npos);
  EXPECT_FALSE(error_of("[1, 2]").empty());
  EXPECT_FALSE(error_of(R"({"control": 3})").empty());
}

TEST(Config, SetValueByQualifiedOrBareKey) {
  gred::RunConfig cfg;
  gred::set_config_value(cfg, "control.w", 0.4);
  gred::set_config_value(cfg, "alpha", 2.0);
  gred::set_config_value(cfg, "scan.samples", 25);
  gred::set_config_value(cfg, "N", 900);
  EXPECT_EQ(cfg.model.control.w, 0.4);
  EXPECT_EQ(cfg.model.control.shape.alpha(), 2.0);
  EXPECT_EQ(cfg.scan.samples, 25u);
  EXPECT_EQ(cfg.samples, 50u);
  EXPECT_EQ(cfg.model.system.connections, 900.0);
}

TEST(Config, SetValueErrors) {
  gred::RunConfig cfg;
  EXPECT_THROW(gred::set_config_value(cfg, "transient", 10), gred::ConfigError);
  EXPECT_THROW(gred::set_config_value(cfg, "control.gamma", 1), gred::ConfigError);
  EXPECT_THROW(gred::set_config_value(cfg, "beta", 0.0), gred::ConfigError);
  try {
    gred::set_config_value(cfg, "orbit.transient", -3);
    FAIL() << "expected ConfigError";
  } catch (const gred::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("orbit.transient"), std::string::npos);
  }
}

TEST(Config, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "gred_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"control": {"w": 0.2}})";
  }
  EXPECT_EQ(gred::load_config(path).model.control.w, 0.2);
  std::remove(path.c_str());
  EXPECT_THROW(gred::load_config(path), gred::ConfigError);
}

}  // namespace
