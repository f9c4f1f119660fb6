#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghc/models.hpp"
#include "ghc/poisson.hpp"
#include "ghc/rma.hpp"

namespace ghc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelSpec model;
  int n_time = 24;
  std::vector<int> spatial_extents{12};
  int margin = 3;
  int sigma_minus = 8;
  int sigma = 11;
  int sigma_plus = 14;
  std::optional<int> sigma_prime;  // second slice for the Cauchy comparison
  std::vector<std::string> suites;  // canonical order, no repeats
  std::uint64_t seed = 1;
  std::string cache_dir;

  int other_slice() const;
};

const std::vector<std::string>& suite_names();

// Parses and validates; every violation is a ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
// Checks everything that needs a lattice: dimensions, margin registration, slice placement.
void validate_config(const RunConfig& c);
// Replaces the suite list; unknown names are a ConfigError.
void select_suites(RunConfig& c, const std::vector<std::string>& names);
nlohmann::json to_json(const RunConfig& c);

std::shared_ptr<const CausalLattice> make_lattice(const RunConfig& c);

struct CheckResult {
  std::string name;
  std::string anchor;
  bool pass = false;
  std::string witness;
  double wall_time = 0;
};

struct SuiteResult {
  std::string name;
  std::string skipped;  // reason, empty when the suite ran
  std::vector<CheckResult> checks;
  nlohmann::json info = nlohmann::json::object();
  double wall_time = 0;
  bool ok() const;
};

struct Report {
  RunConfig config;
  std::vector<SuiteResult> suites;
  double wall_time = 0;
  bool ok() const;
};

// Runs the selected suites concurrently, one model per suite; results keep the canonical order.
Report verify(const RunConfig& c);
SuiteResult run_suite(const std::string& name, const RunConfig& c);

nlohmann::json environment_fingerprint();
nlohmann::json to_json(const Report& r);
// Drops every "wall_time_s" key.
nlohmann::json without_timing(const nlohmann::json& j);

struct GreenDumpOptions {
  std::optional<std::vector<int>> source;  // (t, x, ...) site; nullopt for the zero source
  Direction dir = Direction::Retarded;
  std::optional<int> degree;  // all degrees when unset
  int fiber = 0;              // cell type slot of the source within its form
};

// CSV of G(delta) per degree: t, spatial coordinates, degree, fiber, numerator, denominator.
// Throws ConfigError for an inadmissible source and std::runtime_error if the support leaves the cone.
void green_dump(const RunConfig& c, const GreenDumpOptions& opt, std::ostream& out);

// J+-(K) cohomology over sampled K, cone(Lambda) dims and the unrestricted slab dims.
nlohmann::json cohomology_report(const RunConfig& c, bool& ok);

nlohmann::json list_models();

struct ClassicalReduction {
  Outcome lambda;  // Lambda = G+ - G-
  Outcome tau;     // tau = <<-, G(-)>>, only when a covariant structure is given
};

// KG only: every `stride`-th source column against G+ - G- from the dense solver.
ClassicalReduction kg_against_dense(const Model& model, const QuasiIsoCertificate& c, const CovariantPoisson* cp,
                                    int stride);

// Green kernels persisted under cache_dir, keyed by a hash of the model and lattice.
std::string model_fingerprint(const Model& m);
void load_green_cache(const Model& m, const std::string& dir);
void save_green_cache(const Model& m, const std::string& dir);

}  // namespace ghc
