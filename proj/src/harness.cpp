#include "ghc/harness.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <gmp.h>

#include "ghc/dgcat.hpp"
#include "ghc/green.hpp"

namespace ghc {

using nlohmann::json;

namespace {

std::string with_hint(const std::string& what) {
  if (what.find("grow") != std::string::npos) return what;
  return what + "; grow n_time or margin, or move the slices inward";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

const json& object_at(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
  return v;
}

int int_at(const json& j, const std::string& key, const std::string& where, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  const auto x = v.get<long long>();
  if (x < -1000000 || x > 1000000) throw ConfigError(where + ": out of range");
  return static_cast<int>(x);
}

Q rational_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) return Q(0);
  const json& v = j.at(key);
  if (v.is_number_integer()) return Q(static_cast<long>(v.get<long long>()));
  if (!v.is_string()) throw ConfigError(where + ": expected an integer or a string like \"1/2\"");
  try {
    Q q(v.get<std::string>(), 10);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ConfigError(where + ": cannot parse '" + v.get<std::string>() + "' as a rational");
  }
}

json dims_json(const std::map<int, int>& dims) {
  json j = json::object();
  for (const auto& [n, d] : dims) j[std::to_string(n)] = d;
  return j;
}

bool all_zero(const std::map<int, int>& dims) {
  return std::all_of(dims.begin(), dims.end(), [](const auto& kv) { return kv.second == 0; });
}

json site_json(const CausalLattice& lat, int site) {
  const Point p = lat.site(site);
  json j = json::array();
  for (int a = 0; a < lat.m(); ++a) j.push_back(p[static_cast<std::size_t>(a)]);
  return j;
}

const char* dir_name(Direction d) { return d == Direction::Retarded ? "retarded" : "advanced"; }

std::mt19937_64 suite_rng(const RunConfig& c, const std::string& name) {
  const std::uint64_t h = fnv1a(name);
  std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

void add(SuiteResult& s, const std::string& name, const std::string& anchor, bool pass, const std::string& witness,
         double seconds) {
  s.checks.push_back({name, anchor, pass, pass ? "" : witness, seconds});
}

void add(SuiteResult& s, const std::string& name, const std::string& anchor, const Outcome& o, double seconds) {
  add(s, name, anchor, o.pass, o.witness, seconds);
}

bool has_pairing(ModelKind k) { return k == ModelKind::KleinGordon || k == ModelKind::MaxwellP; }

std::mutex cache_mutex;

// ---- suites ----

void models_suite(SuiteResult& s, const Model& model, std::mt19937_64& rng) {
  Stopwatch sw;
  const LadderComplex slab = model.slab_complex();
  bool q2 = true;
  std::string where;
  for (int n : slab.space.degrees()) {
    if (!slab.space.dim(n) || !slab.space.dim(n + 1) || !slab.space.dim(n + 2)) continue;
    if (!(slab.Q.at(n + 1) * slab.Q.at(n)).is_zero()) {
      q2 = false;
      where = "slab Q o Q nonzero from degree " + std::to_string(n);
      break;
    }
  }
  add(s, "slab complex Q o Q = 0", "complex of difference operators", q2, where, sw.lap());
  json degrees = json::object();
  for (int n = model.deg_lo(); n <= model.deg_hi(); ++n)
    degrees[std::to_string(n)] = {{"form", model.form(n)}, {"slab_dim", slab.space.dim(n)}};
  s.info["degrees"] = degrees;

  if (!has_pairing(model.spec().kind)) return;
  const DifferentialPairing pr = build_pairing(model);
  const PairingReport pv = validate_pairing(model, pr, rng(), 10);
  const std::string pw = pv.failures.empty() ? "" : pv.failures.front();
  add(s, "pairing graded antisymmetric", "differential pairing", pv.antisymmetric, pw, 0);
  add(s, "pairing compatible with Q", "differential pairing", pv.compatible, pw, 0);
  add(s, "pairing agrees with stencil identities on random fields", "differential pairing", pv.evaluated, pw,
      sw.lap());
  const SelfAdjointReport sa = validate_self_adjoint_witness(model, pr);
  s.info["self_adjoint_witness"] = sa.ok();
  if (model.spec().perturbation == 0) {
    const std::string sw_ = sa.failures.empty() ? "" : sa.failures.front();
    add(s, "self-adjoint witness", "self-adjoint Green's witness", sa.ok(), sw_, sw.lap());
  }
}

void witness_suite(SuiteResult& s, const Model& model, std::mt19937_64& rng) {
  Stopwatch sw;
  const WitnessReport w = validate_witness(model);
  const std::string first = w.failures.empty() ? "" : w.failures.front();
  const double t = sw.lap();
  add(s, "Q o Q = 0", "complex of difference operators", w.q_squared_zero, first, t);
  add(s, "P = QW + WQ certified causal", "Green's witness", w.certified, first, 0);
  const int samples = model.lattice().m() == 3 ? 3 : 6;
  for (Direction d : {Direction::Retarded, Direction::Advanced}) {
    const std::string tag = std::string(dir_name(d)) + ": ";
    const HomotopyReport h = check_green_homotopy(model, d, rng, samples);
    const double th = sw.lap();
    add(s, tag + "d Lambda = id", "Green's homotopy", h.homotopy, th);
    add(s, tag + "supp Lambda phi inside J(supp phi)", "Green's homotopy support", h.support, 0);
    add(s, tag + "d lambda = Lambda~ - Lambda", "Green's 2-homotopy", h.two_homotopy, 0);
    s.info[tag + "cases"] = h.homotopy.cases;
  }
}

void green_suite(SuiteResult& s, const Model& model, std::mt19937_64& rng) {
  const CausalLattice& lat = model.lattice();
  const int samples = lat.m() == 3 ? 2 : 4;
  for (Direction d : {Direction::Retarded, Direction::Advanced}) {
    const std::string tag = std::string(dir_name(d)) + ": ";
    Stopwatch sw;
    Outcome sweep, dense, support, inverse, reflect;
    bool reflect_used = false;
    for (int n = model.deg_lo(); n <= model.deg_hi(); ++n) {
      const Stencil p = model.P(n);
      if (p.is_zero()) continue;
      const int form = model.form(n);
      const GreenSolver& g = model.green(n, d);
      const bool symmetric = reflect_time(p) == p;
      for (int i = 0; i < samples; ++i) {
        const Field phi = random_admissible_field(lat, form, rng, 3);
        const std::string w = "degree " + std::to_string(n) + ", source " + describe_field(phi, lat);
        const Field a = g.solve(phi);

        ++sweep.cases;
        const Field b = g.sweep(phi);
        if (auto k = first_difference(a, b, a.window.meet(b.window), lat))
          sweep.fail(w + ": differs at cell " + std::to_string(*k));

        if (lat.m() == 2) {
          ++dense.cases;
          const auto o = dense_green_solve(p, phi, lat, d);
          if (!o) dense.fail(w + ": dense system singular");
          else if (auto k = first_difference(a, *o, a.window, lat))
            dense.fail(w + ": differs at cell " + std::to_string(*k));
        }

        ++support.cases;
        const Region src = phi.support_sites(lat);
        const Region cone = d == Direction::Retarded ? causal_future(lat, src) : causal_past(lat, src);
        if (!a.support_sites(lat).subset_of(cone)) support.fail(w + ": solution leaves the causal cone");

        ++inverse.cases;
        const Field pa = apply(p, a, lat);
        if (auto k = first_difference(pa, phi, pa.window, lat))
          inverse.fail(w + ": P G phi differs at cell " + std::to_string(*k));

        if (symmetric) {
          reflect_used = true;
          ++reflect.cases;
          const Direction other = d == Direction::Retarded ? Direction::Advanced : Direction::Retarded;
          const Field r = reflect_time(model.green(n, other).solve(reflect_time(phi, lat)), lat);
          if (auto k = first_difference(a, r, a.window.meet(r.window), lat))
            reflect.fail(w + ": reflected solution differs at cell " + std::to_string(*k));
        }
      }
    }
    const double t = sw.lap();
    add(s, tag + "kernel solve agrees with forward sweep", "Green's operator", sweep, t);
    if (lat.m() == 2) add(s, tag + "agrees with dense exact solve", "Green's operator", dense, 0);
    add(s, tag + "support inside the causal cone", "Green's operator support", support, 0);
    add(s, tag + "P G = id on the validity window", "Green's operator", inverse, 0);
    if (reflect_used) add(s, tag + "time reflection of the opposite solver", "Green's operator", reflect, 0);
  }
}

void certificate_checks(SuiteResult& s, const Model& model, const RunConfig& c, std::mt19937_64& rng) {
  Stopwatch sw;
  QuasiIsoCertificate q;
  try {
    q = build_certificate(model, {c.sigma_minus}, {c.sigma_plus}, rng, true);
  } catch (const GeometryTooTight& e) {
    add(s, "quasi-isomorphism certificate fits the slab", "retarded-minus-advanced quasi-isomorphism", false,
        with_hint(e.what()), sw.lap());
    return;
  }
  const double t = sw.lap();
  const std::string anchor = "retarded-minus-advanced quasi-isomorphism";
  add(s, "Lambda is a cochain map", anchor, q.lambda_cochain, t);
  add(s, "Theta is a cochain map", anchor, q.theta_cochain, 0);
  add(s, "d Xi = id - Theta Lambda", anchor, q.xi_identity, 0);
  add(s, "d Upsilon = id - Lambda Theta", anchor, q.upsilon_identity, 0);
  add(s, "Theta branches agree", anchor, q.theta_branches, 0);
  add(s, "cone(Lambda) acyclic", anchor, q.cone_acyclic, 0);
  s.info["cone_dims"] = dims_json(q.cone_dims);
  s.info["fc1_dims"] = dims_json(q.fc1_dims);
  s.info["fsc_dims"] = dims_json(q.fsc_dims);
  if (model.spec().kind == ModelKind::KleinGordon)
    add(s, "Lambda = G+ - G- (sampled columns)", "classical reduction", kg_against_dense(model, q, nullptr, 5).lambda,
        sw.lap());
}

void acyclicity_checks(SuiteResult& s, const Model& model, std::mt19937_64& rng) {
  const CausalLattice& lat = model.lattice();
  for (Direction d : {Direction::Retarded, Direction::Advanced}) {
    const std::string tag = d == Direction::Retarded ? "J+(K): " : "J-(K): ";
    Stopwatch sw;
    Outcome acyclic, contraction;
    json samples = json::array();
    for (int i = 0; i < 10; ++i) {
      const Region k = random_admissible_region(lat, rng, 3);
      const AcyclicityReport a = check_support_acyclicity(model, k, d, rng);
      json sites = json::array();
      for (int site : a.k_sites) sites.push_back(site_json(lat, site));
      samples.push_back({{"k", sites}, {"h_dims", dims_json(a.h_dims)}});
      ++acyclic.cases;
      ++contraction.cases;
      if (!a.acyclic.pass) acyclic.fail("K = " + sites.dump() + ": " + a.acyclic.witness);
      if (!a.contraction.pass) contraction.fail("K = " + sites.dump() + ": " + a.contraction.witness);
    }
    const double t = sw.lap();
    add(s, tag + "sections supported in the cone are acyclic", "support acyclicity", acyclic, t);
    add(s, tag + "Green's homotopy contracts them", "support acyclicity", contraction, 0);
    s.info[tag + "samples"] = samples;
  }
}

void poisson_suite(SuiteResult& s, const Model& model, const RunConfig& c, std::mt19937_64& rng) {
  PoissonOptions opt;
  opt.slice = c.sigma;
  opt.other_slice = c.other_slice();
  opt.minus = {c.sigma_minus};
  opt.plus = {c.sigma_plus};
  const PoissonReport r = run_poisson_suite(model, opt, rng);
  for (const Check& k : r.checks) add(s, k.name, "covariant and Cauchy Poisson structures", k.pass, k.witness, k.wall_time);
  if (model.spec().kind == ModelKind::KleinGordon) {
    Stopwatch sw;
    const QuasiIsoCertificate q = build_certificate(model, opt.minus, opt.plus, rng, false);
    const CovariantPoisson cp = covariant_poisson(model, build_pairing(model), q, witness_images(model, q));
    add(s, "tau = <<-, G(-)>> (sampled columns)", "classical reduction", kg_against_dense(model, q, &cp, 5).tau,
        sw.lap());
  }
}

void dgcat_suite(SuiteResult& s, std::mt19937_64& rng) {
  for (const Check& k : run_dgcat_suite(rng, 20)) add(s, k.name, "dg-category of diagrams", k.pass, k.witness, k.wall_time);
}

}  // namespace

// ---- config ----

int RunConfig::other_slice() const {
  if (sigma_prime) return *sigma_prime;
  return sigma + 1 < sigma_plus ? sigma + 1 : sigma - 1;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"models", "witness", "green", "rma", "poisson", "dgcat"};
  return names;
}

void select_suites(RunConfig& c, const std::vector<std::string>& names) {
  for (const auto& n : names)
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
      throw ConfigError("suites: unknown suite '" + n + "'");
  c.suites.clear();
  for (const auto& n : suite_names())
    if (std::find(names.begin(), names.end(), n) != names.end()) c.suites.push_back(n);
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(j, "config", {"model", "lattice", "slices", "suites", "seed", "cache_dir"});
  RunConfig c;
  if (!j.contains("model")) throw ConfigError("model: missing");
  const json& m = object_at(j, "model", "model");
  reject_unknown(m, "model", {"kind", "mass", "m", "p", "perturbation"});
  if (!m.contains("kind") || !m.at("kind").is_string()) throw ConfigError("model.kind: expected a string");
  try {
    c.model.kind = parse_kind(m.at("kind").get<std::string>());
  } catch (const std::exception&) {
    throw ConfigError("model.kind: unknown kind '" + m.at("kind").get<std::string>() + "'");
  }
  c.model.m = int_at(m, "m", "model.m", c.model.kind == ModelKind::ChernSimons ? 3 : 2);
  c.model.p = int_at(m, "p", "model.p", 1);
  c.model.mass = rational_at(m, "mass", "model.mass");
  c.model.perturbation = rational_at(m, "perturbation", "model.perturbation");

  const bool three = c.model.m == 3;
  c.n_time = three ? 12 : 24;
  c.spatial_extents = three ? std::vector<int>{8, 8} : std::vector<int>{12};
  c.margin = 3;
  if (j.contains("lattice")) {
    const json& l = object_at(j, "lattice", "lattice");
    reject_unknown(l, "lattice", {"n_time", "spatial_extents", "margin"});
    c.n_time = int_at(l, "n_time", "lattice.n_time", c.n_time);
    c.margin = int_at(l, "margin", "lattice.margin", c.margin);
    if (l.contains("spatial_extents")) {
      const json& e = l.at("spatial_extents");
      if (!e.is_array()) throw ConfigError("lattice.spatial_extents: expected an array of integers");
      c.spatial_extents.clear();
      for (const json& x : e) {
        if (!x.is_number_integer() || x.get<long long>() < 0 || x.get<long long>() > 1000000)
          throw ConfigError("lattice.spatial_extents: expected an array of integers");
        c.spatial_extents.push_back(x.get<int>());
      }
    }
  }

  c.sigma_minus = c.n_time / 3;
  c.sigma_plus = c.n_time - 2 - c.n_time / 3;
  if (j.contains("slices")) {
    const json& s = object_at(j, "slices", "slices");
    reject_unknown(s, "slices", {"minus", "sigma", "plus", "sigma_prime"});
    c.sigma_minus = int_at(s, "minus", "slices.minus", c.sigma_minus);
    c.sigma_plus = int_at(s, "plus", "slices.plus", c.sigma_plus);
    c.sigma = int_at(s, "sigma", "slices.sigma", (c.sigma_minus + c.sigma_plus) / 2);
    if (s.contains("sigma_prime")) c.sigma_prime = int_at(s, "sigma_prime", "slices.sigma_prime", 0);
  } else {
    c.sigma = (c.sigma_minus + c.sigma_plus) / 2;
  }

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("cache_dir")) {
    if (!j.at("cache_dir").is_string()) throw ConfigError("cache_dir: expected a string");
    c.cache_dir = j.at("cache_dir").get<std::string>();
  }
  std::vector<std::string> suites = suite_names();
  if (j.contains("suites")) {
    const json& s = j.at("suites");
    if (!s.is_array()) throw ConfigError("suites: expected an array of names");
    suites.clear();
    for (const json& x : s) {
      if (!x.is_string()) throw ConfigError("suites: expected an array of names");
      suites.push_back(x.get<std::string>());
    }
  }
  select_suites(c, suites);
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

std::shared_ptr<const CausalLattice> make_lattice(const RunConfig& c) {
  return std::make_shared<const CausalLattice>(c.model.m, c.n_time, c.spatial_extents, c.margin);
}

void validate_config(const RunConfig& c) {
  if (c.margin <= 0) throw ConfigError("lattice.margin: must be positive");
  if (c.sigma_minus == c.sigma_plus) throw ConfigError("slices: Sigma+ equals Sigma-");
  std::shared_ptr<const CausalLattice> lat;
  try {
    lat = make_lattice(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("lattice: ") + e.what());
  }
  try {
    Model model(c.model, lat);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (!(c.sigma_minus < c.sigma && c.sigma < c.sigma_plus))
    throw ConfigError("slices: need minus < sigma < plus");
  const std::pair<const char*, int> slices[] = {
      {"slices.minus", c.sigma_minus}, {"slices.sigma", c.sigma}, {"slices.plus", c.sigma_plus}};
  for (const auto& [key, t] : slices) {
    try {
      check_slice(*lat, {t});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  }
  const bool poisson = has_pairing(c.model.kind) &&
                       std::find(c.suites.begin(), c.suites.end(), "poisson") != c.suites.end();
  const int o = c.other_slice();
  if ((c.sigma_prime || poisson) && (o == c.sigma || o <= c.sigma_minus || o >= c.sigma_plus))
    throw ConfigError("slices.sigma_prime: need a second slice strictly between minus and plus, distinct from sigma");
  if (c.suites.empty()) throw ConfigError("suites: nothing selected");
}

json to_json(const RunConfig& c) {
  json model = {{"kind", kind_name(c.model.kind)},
                {"m", c.model.m},
                {"p", c.model.p},
                {"mass", c.model.mass.get_str()},
                {"perturbation", c.model.perturbation.get_str()}};
  json slices = {{"minus", c.sigma_minus}, {"sigma", c.sigma}, {"plus", c.sigma_plus}, {"sigma_prime", c.other_slice()}};
  return {{"model", model},
          {"lattice", {{"n_time", c.n_time}, {"spatial_extents", c.spatial_extents}, {"margin", c.margin}}},
          {"slices", slices},
          {"suites", c.suites},
          {"seed", c.seed},
          {"cache_dir", c.cache_dir}};
}

// ---- runs ----

bool SuiteResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

bool Report::ok() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
}

SuiteResult run_suite(const std::string& name, const RunConfig& c) {
  SuiteResult s;
  s.name = name;
  Stopwatch sw;
  try {
    const Model model(c.model, make_lattice(c));
    if (name == "poisson" && !has_pairing(c.model.kind)) {
      s.skipped = "differential pairing is provided for klein_gordon and maxwell_p only";
      s.wall_time = sw.elapsed();
      return s;
    }
    if (!c.cache_dir.empty()) load_green_cache(model, c.cache_dir);
    std::mt19937_64 rng = suite_rng(c, name);
    if (name == "models") models_suite(s, model, rng);
    else if (name == "witness") witness_suite(s, model, rng);
    else if (name == "green") green_suite(s, model, rng);
    else if (name == "rma") {
      certificate_checks(s, model, c, rng);
      acyclicity_checks(s, model, rng);
    } else if (name == "poisson") poisson_suite(s, model, c, rng);
    else if (name == "dgcat") dgcat_suite(s, rng);
    else throw ConfigError("suites: unknown suite '" + name + "'");
    if (!c.cache_dir.empty()) save_green_cache(model, c.cache_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const GeometryTooTight& e) {
    add(s, "geometry fits the slab", "validity windows", false, with_hint(e.what()), 0);
  } catch (const std::exception& e) {
    add(s, "suite completed", "harness", false, e.what(), 0);
  }
  s.wall_time = sw.elapsed();
  return s;
}

Report verify(const RunConfig& c) {
  validate_config(c);
  Stopwatch sw;
  std::vector<std::future<SuiteResult>> running;
  for (const std::string& name : c.suites)
    running.push_back(std::async(std::launch::async, [&c, name] { return run_suite(name, c); }));
  Report r;
  r.config = c;
  for (auto& f : running) r.suites.push_back(f.get());
  r.wall_time = sw.elapsed();
  return r;
}

json environment_fingerprint() {
  json env = {{"compiler", __VERSION__},
              {"cplusplus", __cplusplus},
              {"gmp", gmp_version},
#ifdef NDEBUG
              {"assertions", false},
#else
              {"assertions", true},
#endif
              {"hardware_threads", std::thread::hardware_concurrency()}};
  utsname u{};
  if (uname(&u) == 0) {
    env["system"] = u.sysname;
    env["release"] = u.release;
    env["machine"] = u.machine;
  }
  return env;
}

json to_json(const Report& r) {
  json suites = json::array();
  for (const SuiteResult& s : r.suites) {
    json checks = json::array();
    for (const CheckResult& c : s.checks) {
      json k = {{"name", c.name}, {"anchor", c.anchor}, {"pass", c.pass}, {"wall_time_s", c.wall_time}};
      if (!c.pass) k["witness"] = c.witness;
      checks.push_back(k);
    }
    json j = {{"name", s.name}, {"pass", s.ok()}, {"checks", checks}, {"info", s.info}, {"wall_time_s", s.wall_time}};
    if (!s.skipped.empty()) j["skipped"] = s.skipped;
    suites.push_back(j);
  }
  return {{"schema_version", 1},
          {"tool", "ghc"},
          {"command", "verify"},
          {"environment", environment_fingerprint()},
          {"config", to_json(r.config)},
          {"suites", suites},
          {"pass", r.ok()},
          {"wall_time_s", r.wall_time}};
}

json without_timing(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items())
      if (k != "wall_time_s") out[k] = without_timing(v);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const json& v : j) out.push_back(without_timing(v));
    return out;
  }
  return j;
}

// ---- green-dump ----

void green_dump(const RunConfig& c, const GreenDumpOptions& opt, std::ostream& out) {
  validate_config(c);
  const auto lat = make_lattice(c);
  const Model model(c.model, lat);
  if (!c.cache_dir.empty()) load_green_cache(model, c.cache_dir);
  if (opt.degree && !model.has_degree(*opt.degree))
    throw ConfigError("degree " + std::to_string(*opt.degree) + " is outside the complex");
  if (opt.source && static_cast<int>(opt.source->size()) != lat->m())
    throw ConfigError("source: expected " + std::to_string(lat->m()) + " coordinates (t, x" +
                      std::string(lat->m() == 3 ? ", y)" : ")"));

  out << "t,x";
  if (lat->m() == 3) out << ",y";
  out << ",degree,fiber,numerator,denominator\n";
  const int lo = opt.degree ? *opt.degree : model.deg_lo();
  const int hi = opt.degree ? *opt.degree : model.deg_hi();
  for (int n = lo; n <= hi; ++n) {
    const int form = model.form(n);
    const auto& types = lat->types(form);
    if (opt.fiber < 0 || opt.fiber >= static_cast<int>(types.size()))
      throw ConfigError("fiber: degree " + std::to_string(n) + " has " + std::to_string(types.size()) + " fibers");
    Field phi = Field::zero(*lat, form);
    if (opt.source) {
      Cell cell{types[static_cast<std::size_t>(opt.fiber)], {0, 0, 0}};
      for (std::size_t a = 0; a < opt.source->size(); ++a) cell.base[a] = (*opt.source)[a];
      const Span span = span_of(cell);
      if (span.lo < lat->margin() || span.hi > lat->n_time() - 1 - lat->margin())
        throw ConfigError("source: cell spanning times " + std::to_string(span.lo) + ".." + std::to_string(span.hi) +
                          " leaves the admissible band [" + std::to_string(lat->margin()) + ", " +
                          std::to_string(lat->n_time() - 1 - lat->margin()) + "]");
      phi = Field::basis(*lat, form, lat->cell_index(cell));
    }
    const Field psi = model.green(n, opt.dir).solve(phi);
    if (opt.source) {
      const Region src = phi.support_sites(*lat);
      const Region cone = opt.dir == Direction::Retarded ? causal_future(*lat, src) : causal_past(*lat, src);
      if (!psi.support_sites(*lat).subset_of(cone))
        throw std::runtime_error("degree " + std::to_string(n) + ": Green's kernel leaves the causal cone");
    } else if (!psi.is_zero()) {
      throw std::runtime_error("degree " + std::to_string(n) + ": nonzero response to the zero source");
    }
    for (int i = 0; i < lat->cell_count(form); ++i) {
      if (!psi.valid(*lat, i)) continue;
      const Cell cell = lat->cell(form, i);
      const Q& v = psi.values[static_cast<std::size_t>(i)];
      for (int a = 0; a < lat->m(); ++a) out << cell.base[static_cast<std::size_t>(a)] << ',';
      out << n << ',' << lat->type_slot(cell.type) << ',' << v.get_num().get_str() << ','
          << v.get_den().get_str() << '\n';
    }
  }
  if (!c.cache_dir.empty()) save_green_cache(model, c.cache_dir);
}

// ---- cohomology ----

json cohomology_report(const RunConfig& c, bool& ok) {
  validate_config(c);
  const Model model(c.model, make_lattice(c));
  if (!c.cache_dir.empty()) load_green_cache(model, c.cache_dir);
  std::mt19937_64 rng = suite_rng(c, "cohomology");
  const CausalLattice& lat = model.lattice();
  ok = true;
  json j = {{"schema_version", 1}, {"tool", "ghc"}, {"command", "cohomology"}, {"config", to_json(c)}};
  for (Direction d : {Direction::Retarded, Direction::Advanced}) {
    json samples = json::array();
    for (int i = 0; i < 10; ++i) {
      const Region k = random_admissible_region(lat, rng, 3);
      const AcyclicityReport a = check_support_acyclicity(model, k, d, rng);
      json sites = json::array();
      for (int site : a.k_sites) sites.push_back(site_json(lat, site));
      samples.push_back({{"k", sites},
                         {"section_dims", dims_json(a.e_dims)},
                         {"cohomology_dims", dims_json(a.h_dims)},
                         {"acyclic", a.acyclic.pass && all_zero(a.h_dims)}});
      ok = ok && a.acyclic.pass && all_zero(a.h_dims);
    }
    j[d == Direction::Retarded ? "j_plus" : "j_minus"] = samples;
  }
  try {
    const QuasiIsoCertificate q = build_certificate(model, {c.sigma_minus}, {c.sigma_plus}, rng, true);
    j["cone"] = {{"cone_dims", dims_json(q.cone_dims)},
                 {"compact_shifted_dims", dims_json(q.fc1_dims)},
                 {"spacelike_compact_dims", dims_json(q.fsc_dims)},
                 {"acyclic", all_zero(q.cone_dims)}};
    ok = ok && all_zero(q.cone_dims);
  } catch (const GeometryTooTight& e) {
    j["cone"] = {{"error", with_hint(e.what())}};
    ok = false;
  }
  // Unrestricted sections need not be acyclic; reported only.
  j["full_slab_dims"] = dims_json(cohomology_dims(model.slab_complex()));
  j["pass"] = ok;
  if (!c.cache_dir.empty()) save_green_cache(model, c.cache_dir);
  return j;
}

// ---- list-models ----

json list_models() {
  json out = json::array();
  const std::vector<std::pair<ModelSpec, std::string>> entries = [] {
    std::vector<std::pair<ModelSpec, std::string>> e;
    ModelSpec kg;
    e.push_back({kg, "scalar field, Q = box + mass^2"});
    ModelSpec dr;
    dr.kind = ModelKind::DeRham;
    e.push_back({dr, "exterior derivative on forms"});
    ModelSpec cs;
    cs.kind = ModelKind::ChernSimons;
    cs.m = 3;
    e.push_back({cs, "abelian Chern-Simons, three dimensions"});
    ModelSpec mx;
    mx.kind = ModelKind::MaxwellP;
    e.push_back({mx, "p-form Maxwell with gauge symmetry"});
    return e;
  }();
  for (const auto& [spec, blurb] : entries) {
    RunConfig c;
    c.model = spec;
    if (spec.m == 3) {
      c.n_time = 12;
      c.spatial_extents = {8, 8};
      c.margin = 3;
    }
    const Model model(spec, make_lattice(c));
    json degrees = json::object();
    for (int n = model.deg_lo(); n <= model.deg_hi(); ++n) degrees[std::to_string(n)] = model.form(n);
    out.push_back({{"kind", kind_name(spec.kind)},
                   {"description", blurb},
                   {"example", describe(spec)},
                   {"dimension", spec.m},
                   {"degree_forms", degrees},
                   {"parameters", spec.kind == ModelKind::KleinGordon  ? json{"mass"}
                                  : spec.kind == ModelKind::MaxwellP ? json{"p", "perturbation"}
                                                                     : json::array()},
                   {"poisson", has_pairing(spec.kind)}});
  }
  return out;
}

// ---- KG oracles ----

ClassicalReduction kg_against_dense(const Model& model, const QuasiIsoCertificate& c, const CovariantPoisson* cp,
                                    int stride) {
  ClassicalReduction r;
  const CausalLattice& lat = model.lattice();
  const FiniteSpace& src = c.compact.at(1);
  const FiniteSpace& dst = c.sc.at(0);
  const SparseMatrix lam = c.lambda.at(0).transpose();
  const SparseMatrix tau = cp ? cp->tau.at(0) : SparseMatrix();
  const Stencil box = model.Q(0);
  for (int j = 0; j < src.dim(); j += stride) {
    const std::string col = "column " + std::to_string(j);
    const Field e = Field::basis(lat, src.form, src.cells[static_cast<std::size_t>(j)]);
    const auto gp = dense_green_solve(box, e, lat, Direction::Retarded);
    const auto gm = dense_green_solve(box, e, lat, Direction::Advanced);
    ++r.lambda.cases;
    if (cp) ++r.tau.cases;
    if (!gp || !gm) {
      r.lambda.fail(col + ": dense system singular");
      if (cp) r.tau.fail(col + ": dense system singular");
      continue;
    }
    const Field g = *gp - *gm;
    Vec column(static_cast<std::size_t>(dst.dim()));
    for (const auto& [row, v] : lam.row(j)) column[static_cast<std::size_t>(row)] = v;
    if (column != vector_of(dst, g, lat)) r.lambda.fail(col + " (" + describe_field(e, lat) + ") differs");
    if (!cp) continue;
    for (int i = 0; i < src.dim(); ++i) {
      if (tau.get(i, j) != g.values[static_cast<std::size_t>(src.cells[static_cast<std::size_t>(i)])]) {
        r.tau.fail("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") differs");
        break;
      }
    }
  }
  return r;
}

// ---- cache ----

std::string model_fingerprint(const Model& m) {
  const CausalLattice& lat = m.lattice();
  std::ostringstream s;
  s << describe(m.spec()) << '|' << lat.m() << '|' << lat.n_time() << '|' << lat.margin();
  for (int e : lat.extents()) s << ',' << e;
  for (int n = m.deg_lo(); n <= m.deg_hi(); ++n) s << '|' << n << ':' << m.P(n).describe();
  return hex(fnv1a(s.str()));
}

namespace {

std::filesystem::path cache_file(const Model& m, const std::string& dir) {
  return std::filesystem::path(dir) / ("green-" + model_fingerprint(m) + ".json");
}

json read_cache(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return json::object();
  try {
    json j;
    in >> j;
    return j.is_object() ? j : json::object();
  } catch (const json::exception&) {
    return json::object();
  }
}

std::string variant_key(int n, Direction d) { return std::to_string(n) + ":" + dir_name(d); }

}  // namespace

void load_green_cache(const Model& m, const std::string& dir) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  const json j = read_cache(cache_file(m, dir));
  if (!j.contains("kernels")) return;
  for (int n = m.deg_lo(); n <= m.deg_hi(); ++n) {
    if (m.P(n).is_zero()) continue;
    for (Direction d : {Direction::Retarded, Direction::Advanced}) {
      const std::string key = variant_key(n, d);
      if (!j["kernels"].contains(key)) continue;
      const GreenSolver& g = m.green(n, d);
      for (const auto& [type, entries] : j["kernels"][key].items()) {
        std::vector<std::pair<int, Q>> k;
        for (const json& e : entries) k.emplace_back(e[0].get<int>(), Q(e[1].get<std::string>(), 10));
        g.preload(std::stoi(type), std::move(k));
      }
    }
  }
}

void save_green_cache(const Model& m, const std::string& dir) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = cache_file(m, dir);
  json j = read_cache(p);
  j["fingerprint"] = model_fingerprint(m);
  j["model"] = describe(m.spec());
  if (!j.contains("kernels")) j["kernels"] = json::object();
  for (int n = m.deg_lo(); n <= m.deg_hi(); ++n) {
    if (m.P(n).is_zero()) continue;
    for (Direction d : {Direction::Retarded, Direction::Advanced}) {
      const std::string key = variant_key(n, d);
      for (const auto& [type, entries] : m.green(n, d).kernels()) {
        json k = json::array();
        for (const auto& [idx, v] : entries) k.push_back({idx, v.get_str()});
        j["kernels"][key][std::to_string(type)] = k;
      }
    }
  }
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace ghc
