#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ghc/dgcat.hpp"
#include "ghc/harness.hpp"
#include "ghc/poisson.hpp"

#ifndef GHC_CONFIG_DIR
#define GHC_CONFIG_DIR "configs"
#endif

using namespace ghc;

namespace {

struct Shipped {
  std::string label;
  ModelSpec spec;
  int n_time = 24;
  std::vector<int> extents{12};
  int margin = 3;

  Model build() const {
    return Model(spec, std::make_shared<const CausalLattice>(spec.m, n_time, extents, margin));
  }
};

std::vector<Shipped> shipped_models() {
  Shipped kg0{"klein_gordon mass 0", {}};
  Shipped kg1{"klein_gordon mass 1", {}};
  kg1.spec.mass = 1;
  Shipped dr{"de_rham m=2", {}};
  dr.spec.kind = ModelKind::DeRham;
  Shipped cs{"chern_simons m=3", {}, 12, {8, 8}, 3};
  cs.spec.kind = ModelKind::ChernSimons;
  cs.spec.m = 3;
  Shipped mx{"maxwell_p p=1 m=2", {}};
  mx.spec.kind = ModelKind::MaxwellP;
  return {kg0, kg1, dr, cs, mx};
}

// Collects failures of one criterion; details go to stderr.
struct Verdict {
  bool pass = true;
  std::string first;
  void require(bool ok, const std::string& what) {
    if (ok) return;
    std::cerr << "  failed: " << what << '\n';
    if (pass) first = what;
    pass = false;
  }
};

std::string dims_text(const std::map<int, int>& d) {
  std::string s;
  for (const auto& [n, k] : d) s += (s.empty() ? "" : " ") + std::to_string(n) + ":" + std::to_string(k);
  return "{" + s + "}";
}

bool all_zero(const std::map<int, int>& d) {
  return std::all_of(d.begin(), d.end(), [](const auto& kv) { return kv.second == 0; });
}

void witness_suite(Verdict& v) {
  std::mt19937_64 rng(101);
  for (const Shipped& s : shipped_models()) {
    const Model model = s.build();
    const WitnessReport w = validate_witness(model);
    const std::string why = w.failures.empty() ? "" : ": " + w.failures.front();
    v.require(w.q_squared_zero, s.label + ": Q o Q = 0" + why);
    v.require(w.certified, s.label + ": P certified causal" + why);
    const int samples = s.spec.m == 3 ? 3 : 6;
    for (Direction d : {Direction::Retarded, Direction::Advanced}) {
      const std::string tag = s.label + (d == Direction::Retarded ? " retarded: " : " advanced: ");
      const HomotopyReport h = check_green_homotopy(model, d, rng, samples);
      v.require(h.homotopy.pass && h.homotopy.cases > 0, tag + "d Lambda = id " + h.homotopy.witness);
      v.require(h.support.pass && h.support.cases > 0, tag + "support in J " + h.support.witness);
      v.require(h.two_homotopy.pass && h.two_homotopy.cases > 0, tag + "d lambda = Lambda~ - Lambda " +
                                                                       h.two_homotopy.witness);
    }
    std::cerr << "  " << s.label << " done\n";
  }
}

void quasi_isomorphism(Verdict& v) {
  std::mt19937_64 rng(202);
  for (const Shipped& s : shipped_models()) {
    if (s.label != "klein_gordon mass 0" && s.label != "maxwell_p p=1 m=2") continue;
    const Model model = s.build();
    const QuasiIsoCertificate c = build_certificate(model, {8}, {14}, rng, true);
    v.require(c.lambda_cochain.pass, s.label + ": Lambda cochain map " + c.lambda_cochain.witness);
    v.require(c.theta_cochain.pass, s.label + ": Theta cochain map " + c.theta_cochain.witness);
    v.require(c.xi_identity.pass, s.label + ": d Xi = id - Theta Lambda " + c.xi_identity.witness);
    v.require(c.upsilon_identity.pass, s.label + ": d Upsilon = id - Lambda Theta " + c.upsilon_identity.witness);
    v.require(!c.cone_dims.empty() && all_zero(c.cone_dims), s.label + ": cone dims " + dims_text(c.cone_dims));
    std::cerr << "  " << s.label << ": cone dims " << dims_text(c.cone_dims) << ", F_c[1] dims "
              << dims_text(c.fc1_dims) << ", F_sc dims " << dims_text(c.fsc_dims) << '\n';
  }
}

void classical_reduction(Verdict& v) {
  std::mt19937_64 rng(303);
  const Model model = shipped_models().front().build();
  const QuasiIsoCertificate c = build_certificate(model, {8}, {14}, rng, false);
  const CovariantPoisson cp = covariant_poisson(model, build_pairing(model), c, witness_images(model, c));
  const ClassicalReduction r = kg_against_dense(model, c, &cp, 1);
  const int columns = c.compact.at(1).dim();
  v.require(r.lambda.pass && r.lambda.cases == columns, "Lambda = G+ - G-: " + r.lambda.witness);
  v.require(r.tau.pass && r.tau.cases == columns, "tau = <<-, G(-)>>: " + r.tau.witness);
  std::cerr << "  compared " << columns << " columns entrywise\n";
}

void poisson_suite(Verdict& v) {
  std::mt19937_64 rng(404);
  for (const Shipped& s : shipped_models()) {
    if (s.spec.kind != ModelKind::KleinGordon && s.spec.kind != ModelKind::MaxwellP) continue;
    const Model model = s.build();
    PoissonOptions opt;
    opt.minus = {8};
    opt.plus = {14};
    opt.slice = 11;
    opt.other_slice = 12;
    const PoissonReport r = run_poisson_suite(model, opt, rng);
    std::set<std::string> names;
    for (const Check& k : r.checks) {
      names.insert(k.name);
      v.require(k.pass, s.label + ": " + k.name + " " + k.witness);
    }
    std::vector<std::string> required = {"tau antisymmetric",
                                         "tau+ antisymmetric",
                                         "tau- antisymmetric",
                                         "tau+ = tau",
                                         "tau- = tau",
                                         "d lambda_M = tau+ - tau",
                                         "slice 11: d lambda = sigma o Lambda^2 - tau",
                                         "slice 12: d lambda = sigma o Lambda^2 - tau",
                                         "d lambda_SS' = sigma_S - sigma_S'"};
    if (s.spec.kind == ModelKind::MaxwellP) {
      required.push_back("perturbed: d lambda_M = tau+ - tau");
      required.push_back("perturbed: tau+ - tau nonzero");
    }
    for (const std::string& n : required) v.require(names.count(n) > 0, s.label + ": missing check '" + n + "'");
    std::cerr << "  " << s.label << ": " << r.checks.size() << " checks\n";
  }
}

void dgcat_suite(Verdict& v) {
  std::mt19937_64 rng(505);
  const std::vector<Check> checks = run_dgcat_suite(rng, 20);
  for (const Check& k : checks) {
    v.require(k.pass, k.name + " " + k.witness);
    v.require(k.name.find("(20 cases)") != std::string::npos, k.name + ": fewer than 20 cases");
  }
  for (const char* n : {"delta^2 = 0", "hocolim d^2 = 0", "composition associative", "composition Leibniz",
                        "adjunction roundtrip", "map into acyclic diagram is acyclic"})
    v.require(std::any_of(checks.begin(), checks.end(),
                          [&](const Check& k) { return k.name.rfind(n, 0) == 0; }),
              std::string("missing check '") + n + "'");
}

void acyclicity(Verdict& v) {
  std::mt19937_64 rng(606);
  for (const Shipped& s : shipped_models()) {
    const Model model = s.build();
    for (Direction d : {Direction::Retarded, Direction::Advanced}) {
      for (int i = 0; i < 10; ++i) {
        const Region k = random_admissible_region(model.lattice(), rng, 3);
        const AcyclicityReport a = check_support_acyclicity(model, k, d, rng);
        const std::string tag = s.label + (d == Direction::Retarded ? " J+(K) #" : " J-(K) #") + std::to_string(i);
        v.require(a.acyclic.pass && all_zero(a.h_dims), tag + ": H dims " + dims_text(a.h_dims) + " " +
                                                              a.acyclic.witness);
        v.require(a.contraction.pass, tag + ": contraction " + a.contraction.witness);
        v.require(!all_zero(a.e_dims), tag + ": no sections to test");
      }
    }
    std::cerr << "  " << s.label << " done\n";
  }
}

void determinism(Verdict& v) {
  RunConfig c = load_config(std::string(GHC_CONFIG_DIR) + "/klein_gordon.json");
  const auto dir = std::filesystem::temp_directory_path() / ("ghc-acceptance-" + std::to_string(getpid()));
  c.cache_dir = dir.string();
  const std::string first = without_timing(to_json(verify(c))).dump();
  const std::string second = without_timing(to_json(verify(c))).dump();
  std::filesystem::remove_all(dir);
  v.require(first == second, "reports differ between runs");
  std::cerr << "  report of " << first.size() << " bytes reproduced, second run from the kernel cache\n";
}

struct Criterion {
  int id;
  std::string title;
  double budget;  // seconds, 0 when unbounded
  std::function<void(Verdict&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "witness suite on every shipped model", 300, witness_suite},
      {2, "quasi-isomorphism certificate and acyclic cone for KG and Maxwell", 600, quasi_isomorphism},
      {3, "KG classical reduction entrywise", 0, classical_reduction},
      {4, "Poisson suite for KG and Maxwell", 600, poisson_suite},
      {5, "dgcat randomized identities", 120, dgcat_suite},
      {6, "acyclicity of J+-(K) sections with Lambda+- as contraction", 300, acyclicity},
      {7, "deterministic reports for fixed config and seed", 0, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  bool ok = true;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    std::cerr << "criterion " << c.id << ": " << c.title << '\n';
    Verdict v;
    Stopwatch sw;
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double t = sw.elapsed();
    if (c.budget > 0) v.require(t <= c.budget, "took " + std::to_string(t) + " s");
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.1f s", t);
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << timing
              << (c.budget > 0 ? ", budget " + std::to_string(static_cast<int>(c.budget)) + " s" : std::string())
              << ")" << (v.pass ? "" : " -- " + v.first) << std::endl;
    ok = ok && v.pass;
  }
  return ok ? 0 : 1;
}
