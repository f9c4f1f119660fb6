#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "ghc/harness.hpp"

using namespace ghc;
using nlohmann::json;

namespace {

json kg_config() {
  return json::parse(R"({"model": {"kind": "klein_gordon"},
                         "lattice": {"n_time": 24, "spatial_extents": [12], "margin": 3},
                         "slices": {"minus": 8, "sigma": 11, "plus": 14}})");
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  return std::filesystem::temp_directory_path() / ("ghc-test-" + tag + "-" + std::to_string(getpid()));
}

}  // namespace

TEST_CASE("config defaults and echo") {
  const RunConfig c = parse_config(json::parse(R"({"model": {"kind": "klein_gordon"}})"));
  CHECK(c.n_time == 24);
  CHECK(c.spatial_extents == std::vector<int>{12});
  CHECK(c.margin == 3);
  CHECK(c.sigma_minus == 8);
  CHECK(c.sigma == 11);
  CHECK(c.sigma_plus == 14);
  CHECK(c.other_slice() == 12);
  CHECK(c.suites == suite_names());
  CHECK(c.seed == 1);

  const RunConfig cs = parse_config(json::parse(R"({"model": {"kind": "chern_simons"}})"));
  CHECK(cs.model.m == 3);
  CHECK(cs.n_time == 12);
  CHECK(cs.spatial_extents == std::vector<int>{8, 8});

  json j = kg_config();
  j["model"]["mass"] = "2/4";
  j["seed"] = 77;
  const RunConfig r = parse_config(j);
  CHECK(r.model.mass == Q(1, 2));
  CHECK(to_json(parse_config(to_json(r))) == to_json(r));
}

TEST_CASE("config errors are rejected before any computation") {
  auto rejects = [](const json& j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };
  json j = kg_config();
  j["slices"] = {{"minus", 10}, {"sigma", 10}, {"plus", 10}};
  rejects(j);
  j = kg_config();
  j["lattice"]["margin"] = 0;
  rejects(j);
  j = kg_config();
  j["lattice"]["margin"] = 1;  // below the stencil radius
  rejects(j);
  j = kg_config();
  j["slices"] = {{"minus", 2}, {"sigma", 11}, {"plus", 14}};  // inside the margin
  rejects(j);
  j = kg_config();
  j["slices"] = {{"minus", 14}, {"sigma", 11}, {"plus", 8}};
  rejects(j);
  j = kg_config();
  j["slices"] = {{"minus", 8}, {"sigma", 9}, {"plus", 10}};  // no room for a second slice
  rejects(j);
  j = kg_config();
  j["model"]["kind"] = "yang_mills";
  rejects(j);
  j = kg_config();
  j["model"]["mass"] = "one half";
  rejects(j);
  j = kg_config();
  j["colour"] = "blue";
  rejects(j);
  j = kg_config();
  j["suites"] = {"witness", "flux"};
  rejects(j);
  j = kg_config();
  j["seed"] = -3;
  rejects(j);
  j = kg_config();
  j["lattice"]["spatial_extents"] = {12, 12};
  rejects(j);
  rejects(json::array());

  RunConfig c = parse_config(kg_config());
  CHECK_THROWS_AS(select_suites(c, {"nope"}), ConfigError);
  select_suites(c, {"dgcat", "witness", "dgcat"});
  CHECK(c.suites == std::vector<std::string>{"witness", "dgcat"});
  c.sigma_plus = c.sigma_minus;
  CHECK_THROWS_AS(verify(c), ConfigError);
}

TEST_CASE("without_timing drops every wall time") {
  const json j = json::parse(R"({"a": 1, "wall_time_s": 2, "b": [{"wall_time_s": 3, "c": 4}], "d": {"wall_time_s": 5}})");
  CHECK(without_timing(j) == json::parse(R"({"a": 1, "b": [{"c": 4}], "d": {}})"));
}

TEST_CASE("report schema and determinism") {
  json j = kg_config();
  j["suites"] = {"models", "witness", "dgcat"};
  const RunConfig c = parse_config(j);
  const json a = to_json(verify(c));
  CHECK(a["schema_version"] == 1);
  CHECK(a["pass"] == true);
  CHECK(a["config"] == to_json(c));
  CHECK(a["environment"].contains("compiler"));
  REQUIRE(a["suites"].size() == 3);
  CHECK(a["suites"][0]["name"] == "models");
  CHECK(a["suites"][2]["name"] == "dgcat");
  for (const json& s : a["suites"])
    for (const json& k : s["checks"]) {
      CHECK(k.contains("name"));
      CHECK_FALSE(k["anchor"].get<std::string>().empty());
      CHECK(k.contains("pass"));
      CHECK(k.contains("wall_time_s"));
      CHECK_FALSE(k.contains("witness"));
    }
  const json b = to_json(verify(c));
  CHECK(without_timing(a).dump() == without_timing(b).dump());

  RunConfig other = c;
  other.seed = 2;
  const json d = to_json(verify(other));
  CHECK(without_timing(d)["config"] != without_timing(a)["config"]);
}

TEST_CASE("geometry failures carry a witness and a remediation hint") {
  json j = json::parse(R"({"model": {"kind": "chern_simons"}, "suites": ["rma"],
                           "lattice": {"n_time": 12, "spatial_extents": [8, 8], "margin": 3},
                           "slices": {"minus": 4, "sigma": 5, "plus": 7}})");
  const Report r = verify(parse_config(j));
  CHECK_FALSE(r.ok());
  const json out = to_json(r);
  const json& first = out["suites"][0]["checks"][0];
  CHECK(first["pass"] == false);
  CHECK(first["witness"].get<std::string>().find("grow") != std::string::npos);
}

TEST_CASE("poisson suite is skipped without a differential pairing") {
  json j = kg_config();
  j["model"]["kind"] = "de_rham";
  const SuiteResult s = run_suite("poisson", parse_config(j));
  CHECK_FALSE(s.skipped.empty());
  CHECK(s.checks.empty());
  CHECK(s.ok());
}

TEST_CASE("green-dump: zero source, unit source and inadmissible sources") {
  const RunConfig c = parse_config(kg_config());
  GreenDumpOptions opt;
  std::ostringstream zero;
  green_dump(c, opt, zero);
  const auto rows = csv_rows(zero.str());
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"t", "x", "degree", "fiber", "numerator", "denominator"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][4] == "0");
    CHECK(rows[i][5] == "1");
  }

  for (Direction d : {Direction::Retarded, Direction::Advanced}) {
    opt.dir = d;
    opt.source = std::vector<int>{10, 5};
    std::ostringstream unit;
    green_dump(c, opt, unit);
    int nonzero = 0;
    const auto r = csv_rows(unit.str());
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (r[i][4] == "0") continue;
      ++nonzero;
      const int t = std::stoi(r[i][0]), x = std::stoi(r[i][1]);
      int dx = std::abs(x - 5);
      dx = std::min(dx, 12 - dx);
      // one spatial step per time step on either side of the source
      if (d == Direction::Retarded) CHECK(t > 10);
      else CHECK(t < 10);
      CHECK(dx <= std::abs(t - 10));
    }
    CHECK(nonzero > 10);
  }

  opt.source = std::vector<int>{1, 5};
  std::ostringstream sink;
  CHECK_THROWS_AS(green_dump(c, opt, sink), ConfigError);
  opt.source = std::vector<int>{10, 5, 2};
  CHECK_THROWS_AS(green_dump(c, opt, sink), ConfigError);
  opt.source = std::vector<int>{10, 5};
  opt.fiber = 3;
  CHECK_THROWS_AS(green_dump(c, opt, sink), ConfigError);
  opt.fiber = 0;
  opt.degree = 7;
  CHECK_THROWS_AS(green_dump(c, opt, sink), ConfigError);
}

TEST_CASE("green kernel cache round trip") {
  const auto dir = scratch_dir("cache");
  std::filesystem::remove_all(dir);
  RunConfig c = parse_config(kg_config());
  const Model a(c.model, make_lattice(c));
  std::mt19937_64 rng(3);
  const Field phi = random_admissible_field(a.lattice(), 0, rng, 4);
  const Field ga = a.green(0, Direction::Retarded).solve(phi);
  save_green_cache(a, dir.string());
  CHECK(std::filesystem::exists(dir / ("green-" + model_fingerprint(a) + ".json")));

  const Model b(c.model, make_lattice(c));
  load_green_cache(b, dir.string());
  CHECK_FALSE(b.green(0, Direction::Retarded).kernels().empty());
  const Field gb = b.green(0, Direction::Retarded).solve(phi);
  CHECK(ga.values == gb.values);

  RunConfig massive = c;
  massive.model.mass = 1;
  CHECK(model_fingerprint(Model(massive.model, make_lattice(massive))) != model_fingerprint(a));
  std::filesystem::remove_all(dir);
}

TEST_CASE("cohomology report for KG") {
  bool ok = false;
  const json j = cohomology_report(parse_config(kg_config()), ok);
  CHECK(ok);
  CHECK(j["j_plus"].size() == 10);
  CHECK(j["j_minus"].size() == 10);
  for (const auto& [n, d] : j["cone"]["cone_dims"].items()) CHECK(d == 0);
  CHECK(j["full_slab_dims"].is_object());
}

TEST_CASE("list-models describes every kind") {
  const json m = list_models();
  REQUIRE(m.size() == 4);
  CHECK(m[0]["kind"] == "klein_gordon");
  CHECK(m[2]["dimension"] == 3);
  CHECK(m[3]["poisson"] == true);
}
