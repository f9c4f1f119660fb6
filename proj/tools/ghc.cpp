#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghc/harness.hpp"

using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> suites;
  std::string report;
  std::string cache;
  std::string source = "zero";
  std::string variant = "retarded";
  std::optional<int> degree;
  int fiber = 0;
  std::string out;
};

ghc::RunConfig resolve(const Options& o) {
  if (o.config.empty()) throw ghc::ConfigError("--config is required");
  ghc::RunConfig c = ghc::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.suites.empty()) ghc::select_suites(c, o.suites);
  if (!o.cache.empty()) c.cache_dir = o.cache;
  ghc::validate_config(c);
  return c;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ghc::ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::vector<int> parse_site(const std::string& s) {
  std::vector<int> v;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ghc::ConfigError("--source: expected 'zero' or comma-separated integers, got '" + s + "'");
    }
  }
  return v;
}

int run_verify(const Options& o) {
  const ghc::RunConfig c = resolve(o);
  const ghc::Report r = ghc::verify(c);
  for (const auto& s : r.suites) {
    if (!s.skipped.empty()) {
      std::cout << "SKIP " << s.name << ": " << s.skipped << '\n';
      continue;
    }
    for (const auto& k : s.checks) {
      std::cout << (k.pass ? "PASS " : "FAIL ") << s.name << ": " << k.name << '\n';
      if (!k.pass) std::cout << "     witness: " << k.witness << '\n';
    }
  }
  std::cout << (r.ok() ? "all checks passed" : "some checks failed") << '\n';
  if (!o.report.empty()) emit(ghc::to_json(r), o.report);
  return r.ok() ? kPass : kFail;
}

int run_green_dump(const Options& o) {
  const ghc::RunConfig c = resolve(o);
  ghc::GreenDumpOptions g;
  if (o.source != "zero") g.source = parse_site(o.source);
  if (o.variant == "retarded") g.dir = ghc::Direction::Retarded;
  else if (o.variant == "advanced") g.dir = ghc::Direction::Advanced;
  else throw ghc::ConfigError("--variant: expected retarded or advanced");
  g.degree = o.degree;
  g.fiber = o.fiber;
  std::ostringstream buf;
  ghc::green_dump(c, g, buf);
  if (o.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream out(o.out);
    if (!out) throw ghc::ConfigError("cannot write '" + o.out + "'");
    out << buf.str();
  }
  return kPass;
}

int run_cohomology(const Options& o) {
  const ghc::RunConfig c = resolve(o);
  bool ok = false;
  emit(ghc::cohomology_report(c, ok), o.report);
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green's homotopies on causal lattices: checks and dumps"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--seed", o.seed, "Override the configured seed");
  app.add_option("--suite", o.suites, "Run only this suite (repeatable)")->allow_extra_args(false);
  app.add_option("--report", o.report, "Write the JSON report here");
  app.add_option("--cache", o.cache, "Directory for cached Green's kernels");

  CLI::App* verify = app.add_subcommand("verify", "Run the check suites");
  CLI::App* dump = app.add_subcommand("green-dump", "Write G(delta) as CSV");
  dump->add_option("--source", o.source, "Source site t,x[,y] or 'zero'");
  dump->add_option("--variant", o.variant, "retarded or advanced");
  dump->add_option("--degree", o.degree, "Only this degree");
  dump->add_option("--fiber", o.fiber, "Cell type slot of the source");
  dump->add_option("--out", o.out, "CSV path, stdout when omitted");
  CLI::App* coh = app.add_subcommand("cohomology", "Support-restricted and cone cohomology");
  CLI::App* list = app.add_subcommand("list-models", "Describe the available models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*verify) return run_verify(o);
    if (*dump) return run_green_dump(o);
    if (*coh) return run_cohomology(o);
    if (*list) {
      std::cout << ghc::list_models().dump(2) << '\n';
      return kPass;
    }
  } catch (const ghc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "check failure: " << e.what() << '\n';
    return kFail;
  }
  return kConfigError;
}
