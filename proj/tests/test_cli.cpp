// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = pvbs::cli::run(args, o, e);
  return {c, o.str(), e.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pvbs_cli_test_" + name);
}

}  // namespace

TEST_CASE("gap on a box") {
  const auto r = run({"gap", "--dim", "2", "--lambda", "2,1", "--box", "2,2", "--sectors", "all"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("schema") == "pvbs-gap/1");
  CHECK(j.at("result").at("kernel_dim") == 2);
  CHECK(j.at("result").at("gap").get<double>() > 0.0);
}

TEST_CASE("gap on a single edge is one") {
  const auto r = run({"gap", "--dim", "1", "--lambda", "1", "--box", "2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("result").at("gap").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({"gap", "--lambda", "2,x", "--box", "2"}).code == 1);
  CHECK(run({"gap", "--dim", "3", "--lambda", "2,1", "--box", "2,2"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"certify", "--lambda", "2,1"}).code == 1);
  CHECK(run({"gap", "--lambda", "2,1", "--box", "2,2", "--caps", "{\"bogus\": 1}"}).code == 1);
}

TEST_CASE("size caps exit 2") {
  const auto r = run({"gap", "--lambda", "2,1", "--box", "6,6", "--caps", "{\"max_states\": 10}"});
  CHECK(r.code == 2);
  CHECK(r.err.find("SectorTooLarge") != std::string::npos);
}

TEST_CASE("certify") {
  const auto r = run({"certify", "--dim", "2", "--lambda", "2,1", "--m", "0,1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("certificate").at("lower_bound").get<double>() > 0.0);
  CHECK(j.at("variational").contains("rayleigh_quotient"));
}

TEST_CASE("aligned normal exits 4") {
  CHECK(run({"certify", "--dim", "2", "--lambda", "0.5,0.5", "--m", "0.7071,0.7071"}).code == 4);
}

TEST_CASE("infeasible width exits 5") {
  const auto r = run({"certify", "--lambda", "2,1.31950857", "--m", "1,0.4", "--caps", "{\"ell_max\": 100}"});
  CHECK(r.code == 5);
}

TEST_CASE("bulk") {
  const auto r = run({"bulk", "--dim", "3", "--lambda", "2,1,1"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("certificate").at("lower_bound").get<double>() > 0.0);
  CHECK(run({"bulk", "--lambda", "1,1"}).code == 7);
}

TEST_CASE("sweep-theta columns") {
  const auto r = run({"sweep-theta", "--lambda", "0.5,0.5", "--steps", "8", "--no-certificate"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta,closed_form_bound,trial_quotient_at_L,certificate_lower");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    REQUIRE(cells.size() == 4);
    const double theta = std::stod(cells[0]);
    CHECK(cells[3] == "NA");
    if (rows == 0) CHECK(std::stod(cells[1]) == 0.0);
    if (cells[1] != "NA") {
      // m(theta) = cos(theta) (1,1)/sqrt2 + sin(theta) (1,-1)/sqrt2; the bound carries 1/c(m).
      const double a = std::abs(std::cos(theta) + std::sin(theta)) / std::sqrt(2.0);
      const double b = std::abs(std::cos(theta) - std::sin(theta)) / std::sqrt(2.0);
      const double cm = b < 1e-12 ? a : std::min(a, b);
      const double expected = 8.0 * std::sqrt(2.0) * std::log(2.0) * std::abs(std::sin(theta)) / cm;
      CHECK(std::stod(cells[1]) == doctest::Approx(expected).epsilon(1e-12));
    }
    if (rows == 4) CHECK(std::stod(cells[1]) == doctest::Approx(8.0 * std::log(2.0)).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("epsilon-verify") {
  const auto r = run({"epsilon-verify", "--count", "5", "--seed", "3", "--include-disconnected"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("verified") == 5);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("skipped").size() >= 1);
  CHECK(j.at("skipped")[0].at("reason").get<std::string>().find("DisconnectedVolume") != std::string::npos);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"certify", "--lambda", "2,1", "--m", "0,1"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> eps{"epsilon-verify", "--count", "4"};
  CHECK(run(eps).out == run(eps).out);
}

TEST_CASE("config file with flag precedence and --out") {
  const auto cfg = temp_file("config.json");
  const auto dst = temp_file("out.json");
  {
    std::ofstream f(cfg);
    f << R"({"lambda": [2, 1], "box": [3, 1], "sectors": "all"})";
  }
  auto r = run({"gap", "--config", cfg.string(), "--out", dst.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(dst);
  const json a = json::parse(in);
  CHECK(a.at("region").at("sites") == 3);
  r = run({"gap", "--config", cfg.string(), "--box", "2,2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("region").at("sites") == 4);
  std::filesystem::remove(cfg);
  std::filesystem::remove(dst);
}

TEST_CASE("region spec argument") {
  const auto r = run({"gap", "--lambda", "2,2", "--m", "1,1", "--region-spec",
                      R"({"kind": "Parallelogram", "base": [0, 0], "lengths": [3, 2]})"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("region").at("sites") == 6);
}
