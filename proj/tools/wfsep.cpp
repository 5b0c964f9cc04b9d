// wfsep: batch driver for separating-time classification, simulation,
// estimation and the verification harnesses.
//
// Exit codes: 0 ok, 2 usage or invalid configuration, 3 singular information,
// 4 other operation error, 1 anything unexpected.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wfsep/wfsep.hpp"

namespace fs = std::filesystem;
using namespace wfsep;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSingular = 3;
constexpr int kExitOperation = 4;
constexpr int kExitUnexpected = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Key {
  const char* name;
  const char* help;
};

// Every setting is a plain string on the top-level app so that a flat
// key=value file can carry any of them; subcommands resolve the ones they use.
const std::vector<Key> kKeys = {
    {"p", "parameters alpha,beta,s"},
    {"p0", "first parameter triple alpha,beta,s"},
    {"p1", "second parameter triple alpha,beta,s (the law the verdict is stated under)"},
    {"eta", "selection shape: genic | diploid:h | poly:c0,c1,..."},
    {"x0", "start point (verify-projection: allele frequencies, comma separated)"},
    {"T", "time horizon"},
    {"dt", "time step"},
    {"seeds", "number of seeded paths"},
    {"seed", "master seed"},
    {"path", "path CSV with columns t,x"},
    {"meta", "path metadata JSON (hit times, descent records)"},
    {"method", "estimate: full | joint | marginal | corrected"},
    {"which", "estimate --method marginal: alpha | beta | s"},
    {"known", "values alpha,beta,s held fixed by marginal, joint and corrected estimates"},
    {"horizons", "verify-consistency horizons, comma separated"},
    {"kappa", "verify-zero-one exponents, comma separated"},
    {"alpha-b", "verify-zero-one: second rate at 0, switches to the boundary-start check"},
    {"nu", "verify-projection mutation measure, comma separated"},
    {"subset", "verify-projection allele indices forming B, comma separated"},
    {"samples", "verify-projection samples per replication"},
    {"reps", "verify-projection replications"},
};

std::string quote(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return '"' + out + '"';
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    if (!std::isfinite(v)) throw std::invalid_argument("nonfinite");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + t + "' is not a finite number");
  }
}

class Settings {
 public:
  explicit Settings(CLI::App& app) {
    for (const auto& k : kKeys) {
      auto* o = app.add_option(std::string("--") + k.name, values_[k.name], k.help);
      o->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
      opts_[k.name] = o;
    }
    out_ = app.add_option("--out", out_dir_, "output directory")->envname("WFSEP_OUTPUT_DIR");
    app.add_option("--workers", workers_, "worker threads (does not change any output)");
  }

  bool given(const std::string& key) const { return opts_.at(key)->count() > 0; }

  std::string str(const std::string& key, const std::string& def) {
    const std::string v = given(key) ? trim(values_.at(key)) : def;
    record(key, v);
    return v;
  }

  std::string required(const std::string& key) {
    if (!given(key)) throw ConfigError("missing required setting '" + key + "'");
    return str(key, "");
  }

  double num(const std::string& key, double def) {
    const std::string v = given(key) ? values_.at(key) : io::fmt(def);
    const double x = to_double(key, v);
    record(key, io::fmt(x));
    return x;
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const double x = num(key, static_cast<double>(def));
    if (!(x >= 1.0) || x != std::floor(x) || x > 1e9) throw ConfigError(key + " must be a positive integer");
    return static_cast<std::size_t>(x);
  }

  std::uint64_t seed() {
    const std::string v = str("seed", "1");
    try {
      std::size_t used = 0;
      const auto s = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing");
      return s;
    } catch (const std::exception&) {
      throw ConfigError("seed: '" + v + "' is not a nonnegative integer");
    }
  }

  std::vector<double> list(const std::string& key, const std::string& def) {
    std::vector<double> out;
    for (const auto& part : split(str(key, def), ',')) out.push_back(to_double(key, part));
    if (out.empty()) throw ConfigError(key + " must not be empty");
    return out;
  }

  MutSelParams params(const std::string& key, const std::string& def) {
    const std::string text = def.empty() ? required(key) : str(key, def);
    std::vector<double> v;
    for (const auto& part : split(text, ',')) v.push_back(to_double(key, part));
    if (v.size() != 3) throw ConfigError(key + " needs three values alpha,beta,s");
    if (v[0] < 0.0) throw ConfigError(key + ": alpha = " + io::fmt(v[0]) + " violates the model assumption alpha >= 0 (mutation rates are nonnegative)");
    if (v[1] < 0.0) throw ConfigError(key + ": beta = " + io::fmt(v[1]) + " violates the model assumption beta >= 0 (mutation rates are nonnegative)");
    return {v[0], v[1], v[2]};
  }

  EtaSpec eta() {
    const std::string text = str("eta", "genic");
    if (text == "genic") return EtaSpec::genic();
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "diploid") return EtaSpec::diploid(to_double("eta", rest));
    if (kind == "poly") {
      std::vector<double> c;
      for (const auto& part : split(rest, ',')) c.push_back(to_double("eta", part));
      bool nonzero = false;
      for (double x : c) nonzero = nonzero || x != 0.0;
      if (!nonzero)
        throw ConfigError("eta: polynomial vanishes identically, violating the model assumption that eta is not identically zero on [0,1]");
      return EtaSpec::polynomial(c);
    }
    throw ConfigError("eta: expected genic, diploid:h or poly:c0,c1,...");
  }

  double x0() {
    const double x = num("x0", 0.5);
    if (x < 0.0 || x > 1.0)
      throw ConfigError("x0 = " + io::fmt(x) + " violates the model assumption x0 in [0,1] (the state space)");
    return x;
  }

  double positive(const std::string& key, double def) {
    const double x = num(key, def);
    if (!(x > 0.0)) throw ConfigError(key + " must be positive");
    return x;
  }

  unsigned workers() const { return workers_ > 0 ? workers_ : default_workers(); }

  fs::path out_dir() const { return fs::path(out_dir_); }

  // Resolved settings in the order they were first read, plus the output
  // directory; replayed with `wfsep <subcommand> --config manifest.txt`.
  std::string manifest(const std::string& subcommand) const {
    std::ostringstream os;
    os << "# wfsep " << subcommand << " --config manifest.txt\n";
    for (const auto& [k, v] : used_) os << k << "=" << quote(v) << '\n';
    os << "out=" << quote(out_dir_) << '\n';
    return os.str();
  }

 private:
  void record(const std::string& key, const std::string& v) {
    for (const auto& kv : used_)
      if (kv.first == key) return;
    used_.emplace_back(key, v);
  }

  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> opts_;
  CLI::Option* out_ = nullptr;
  std::string out_dir_ = "wfsep_out";
  unsigned workers_ = 0;
  std::vector<std::pair<std::string, std::string>> used_;
};

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f << content;
  }

 private:
  fs::path dir_;
};

std::string f(double v) { return io::fmt(v); }
std::string b(bool v) { return v ? "true" : "false"; }
std::string opt(const std::optional<double>& v) { return v ? f(*v) : ""; }

struct KeyValues {
  std::ostringstream os;
  KeyValues() { os << "key,value\n"; }
  void add(const std::string& k, const std::string& v) { os << k << ',' << v << '\n'; }
  void add(const std::string& k, double v) { add(k, f(v)); }
};

void record_params(KeyValues& kv, const std::string& prefix, const MutSelParams& p) {
  kv.add(prefix + "alpha", p.alpha);
  kv.add(prefix + "beta", p.beta);
  kv.add(prefix + "s", p.s);
}

std::string points_str(const SeparatingPoints& a) {
  if (a.zero && a.one) return "0,1";
  if (a.zero) return "0";
  if (a.one) return "1";
  return "none";
}

int run_classify(Settings& s) {
  const MutSelParams p0 = s.params("p0", ""), p1 = s.params("p1", "");
  const Output out(s.out_dir());
  const auto pts = separating_points(p0, p1);
  const auto v = separating_time(p0, p1);
  std::cout << "separating_points=" << points_str(pts) << " verdict=" << to_string(v.kind) << " bar=" << b(v.bar)
            << '\n';
  KeyValues kv;
  record_params(kv, "p0_", p0);
  record_params(kv, "p1_", p1);
  kv.add("separating_zero", b(pts.zero));
  kv.add("separating_one", b(pts.one));
  kv.add("verdict", to_string(v.kind));
  kv.add("bar", b(v.bar));
  out.write("classify.csv", kv.os.str());
  out.write("manifest.txt", s.manifest("classify"));
  return 0;
}

SimConfig sim_config(Settings& s) {
  SimConfig c;
  c.dt = s.positive("dt", 1e-3);
  return c;
}

int run_simulate(Settings& s) {
  const MutSelParams p = s.params("p", "1,1,0");
  const EtaSpec eta = s.eta();
  const double x0 = s.x0();
  const double T = s.positive("T", 1.0);
  SimConfig base = sim_config(s);
  const std::size_t N = s.count("seeds", 1);
  base.seed = s.seed();
  const Output out(s.out_dir());
  auto paths = parallel_map(
      N,
      [&](std::size_t i) {
        SimConfig c = base;
        c.stream = i;
        return simulate_wf(p, eta, x0, T, c);
      },
      s.workers());
  std::ostringstream summary;
  summary << "index,x_T,hit0,hit1,points\n";
  for (std::size_t i = 0; i < N; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%05zu", i);
    std::ostringstream csv;
    io::write_path_csv(csv, paths[i]);
    out.write(std::string(name) + ".csv", csv.str());
    out.write(std::string(name) + ".json", io::path_metadata(paths[i]).dump() + "\n");
    summary << i << ',' << f(paths[i].values.back()) << ',' << opt(paths[i].hit0) << ',' << opt(paths[i].hit1) << ','
            << paths[i].size() << '\n';
  }
  out.write("summary.csv", summary.str());
  out.write("manifest.txt", s.manifest("simulate"));
  std::cout << "paths=" << N << " out=" << s.out_dir().string() << '\n';
  return 0;
}

int run_estimate(Settings& s) {
  const std::string path_file = s.required("path");
  const std::string meta = s.str("meta", "");
  const EtaSpec eta = s.eta();
  const std::string method = s.str("method", "full");
  const SamplePath path = io::read_path_files(path_file, meta);
  const PathFunctionals fn = path_functionals(path, eta);
  KeyValues kv;
  kv.add("method", method);
  kv.add("T", fn.T);
  std::ostringstream line;
  if (method == "full") {
    const auto r = mle_full(fn, eta);
    const char* names[] = {"alpha", "beta", "s"};
    for (int k = 0; k < 3; ++k) {
      kv.add(names[k], r.estimate[static_cast<std::size_t>(k)]);
      line << (k ? " " : "") << names[k] << '=' << f(r.estimate[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) kv.add("information_" + std::to_string(i) + std::to_string(j), r.information(i, j));
  } else if (method == "joint" || method == "corrected") {
    const MutSelParams known = s.params("known", "0,0,0");
    kv.add("s_known", known.s);
    if (method == "joint") {
      const auto [a, bb] = mle_joint_mut(fn, known.s, eta);
      kv.add("alpha", a);
      kv.add("beta", bb);
      line << "alpha=" << f(a) << " beta=" << f(bb);
    } else {
      const auto r = corrected_estimator(path, eta, known.s);
      kv.add("alpha", r.estimate[0]);
      kv.add("beta", r.estimate[1]);
      kv.add("crystallized_alpha", b(r.crystallized[0]));
      kv.add("crystallized_beta", b(r.crystallized[1]));
      kv.add("used_horizon_alpha", r.used_horizon[0]);
      kv.add("used_horizon_beta", r.used_horizon[1]);
      line << "alpha=" << f(r.estimate[0]) << " beta=" << f(r.estimate[1]);
    }
  } else if (method == "marginal") {
    const std::string which = s.str("which", "alpha");
    const MutSelParams known = s.params("known", "0,0,0");
    Which w;
    if (which == "alpha")
      w = Which::Alpha;
    else if (which == "beta")
      w = Which::Beta;
    else if (which == "s")
      w = Which::S;
    else
      throw ConfigError("which must be alpha, beta or s");
    record_params(kv, "known_", known);
    const double v = mle_marginal(w, fn, eta, known);
    kv.add(which, v);
    line << which << '=' << f(v);
  } else {
    throw ConfigError("method must be full, joint, marginal or corrected");
  }
  const Output out(s.out_dir());
  out.write("estimate.csv", kv.os.str());
  out.write("manifest.txt", s.manifest("estimate"));
  std::cout << line.str() << '\n';
  return 0;
}

int run_consistency(Settings& s) {
  const MutSelParams p = s.params("p", "2,2,0");
  const EtaSpec eta = s.eta();
  const double x0 = s.x0();
  const auto horizons = s.list("horizons", "50,200,800");
  for (double T : horizons)
    if (!(T > 0.0)) throw ConfigError("horizons must be positive");
  const SimConfig sim = sim_config(s);
  const std::size_t N = s.count("seeds", 200);
  const std::uint64_t seed = s.seed();
  const Output out(s.out_dir());
  const auto rows = consistency_check(p, eta, x0, horizons, N, seed, sim, s.workers());
  std::ostringstream per, sum;
  per << "T,index,abs_error_alpha,abs_error_beta\n";
  sum << "T,median_abs_error_alpha,median_abs_error_beta,failed\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.per_seed.size(); ++i)
      per << f(r.T) << ',' << i << ',' << f(r.per_seed[i][0]) << ',' << f(r.per_seed[i][1]) << '\n';
    sum << f(r.T) << ',' << f(r.median_abs_alpha) << ',' << f(r.median_abs_beta) << ',' << r.failed << '\n';
    std::cout << "T=" << f(r.T) << " median_abs_error_alpha=" << f(r.median_abs_alpha)
              << " median_abs_error_beta=" << f(r.median_abs_beta) << " failed=" << r.failed << '\n';
  }
  out.write("per_seed.csv", per.str());
  out.write("summary.csv", sum.str());
  out.write("manifest.txt", s.manifest("verify-consistency"));
  return 0;
}

int run_clt(Settings& s) {
  const MutSelParams p = s.params("p", "2,2,0");
  const EtaSpec eta = s.eta();
  CltOptions o;
  o.x0 = s.x0();
  const double T = s.positive("T", 500.0);
  o.sim = sim_config(s);
  const std::size_t N = s.count("seeds", 2000);
  o.seed = s.seed();
  o.workers = s.workers();
  if (!(p.alpha > 1.0 && p.beta > 1.0))
    throw ConfigError("p: the normal limit assumes both mutation rates exceed 1; with alpha = " + f(p.alpha) +
                      ", beta = " + f(p.beta) + " the stationary information matrix is infinite");
  const Output out(s.out_dir());
  const auto r = clt_check(p, eta, T, N, o);
  std::ostringstream per;
  per << "index,z_alpha,z_beta,z_s\n";
  for (std::size_t i = 0; i < r.z.size(); ++i)
    per << i << ',' << f(r.z[i](0)) << ',' << f(r.z[i](1)) << ',' << f(r.z[i](2)) << '\n';
  KeyValues kv;
  const char* names[] = {"alpha", "beta", "s"};
  for (int k = 0; k < 3; ++k) kv.add(std::string("mean_") + names[k], r.mean(k));
  kv.add("mean_bound", 3.0 / std::sqrt(static_cast<double>(r.z.size())));
  kv.add("frobenius_rel", r.frobenius_rel);
  for (int k = 0; k < 3; ++k) kv.add(std::string("ks_p_") + names[k], r.ks_p(k));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) kv.add("sigma_" + std::to_string(i) + std::to_string(j), r.sigma(i, j));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) kv.add("covariance_" + std::to_string(i) + std::to_string(j), r.covariance(i, j));
  kv.add("failed", static_cast<double>(r.failed));
  out.write("per_seed.csv", per.str());
  out.write("summary.csv", kv.os.str());
  out.write("manifest.txt", s.manifest("verify-clt"));
  std::cout << "frobenius_rel=" << f(r.frobenius_rel) << " mean=" << f(r.mean(0)) << ',' << f(r.mean(1)) << ','
            << f(r.mean(2)) << " failed=" << r.failed << '\n';
  return 0;
}

int run_zero_one(Settings& s) {
  const MutSelParams p = s.params("p", "0.5,1,0");
  const EtaSpec eta = s.eta();
  const double T = s.positive("T", 5.0);
  const std::size_t N = s.count("seeds", 100);
  const std::uint64_t seed = s.seed();
  const Output out(s.out_dir());
  if (s.given("alpha-b")) {
    const double ab = s.num("alpha-b", 0.0);
    if (!(p.alpha > 0.0 && ab > 0.0) || ab == p.alpha)
      throw ConfigError("alpha-b: the boundary-start check needs two different positive rates at 0");
    if (!(eta.coefficients().size() == 1 && eta.coefficients()[0] == 1.0))
      throw ConfigError("eta: the boundary-start check is implemented for genic selection only");
    BoundaryStartOptions o;
    o.beta = p.beta;
    o.s = p.s;
    o.horizon = T;
    o.seed = seed;
    o.workers = s.workers();
    const auto r = boundary_start_singularity_check(p.alpha, ab, N, o);
    std::ostringstream per;
    per << "index,stat_a,stat_b\n";
    for (std::size_t i = 0; i < r.stat_a.size(); ++i) per << i << ',' << f(r.stat_a[i]) << ',' << f(r.stat_b[i]) << '\n';
    KeyValues kv;
    kv.add("regime", to_string(r.regime));
    kv.add("alpha_a", p.alpha);
    kv.add("alpha_b", ab);
    kv.add("kappa", r.kappa);
    kv.add("target_a", r.target_a);
    kv.add("target_b", r.target_b);
    kv.add("agree_a", r.agree_a);
    kv.add("agree_b", r.agree_b);
    kv.add("overlap", r.overlap);
    out.write("per_seed.csv", per.str());
    out.write("summary.csv", kv.os.str());
    out.write("manifest.txt", s.manifest("verify-zero-one"));
    std::cout << "regime=" << to_string(r.regime) << " overlap=" << f(r.overlap) << '\n';
    return 0;
  }
  if (!(p.alpha > 0.0 && p.alpha < 1.0))
    throw ConfigError("p: the zero-one law check needs alpha in (0,1), where 0 is a regular reflecting boundary");
  const auto kappas = s.list("kappa", "0.25,0.5,0.75");
  for (double k : kappas)
    if (k < 0.0) throw ConfigError("kappa must be nonnegative");
  auto diags = parallel_map(
      N,
      [&](std::size_t i) {
        const auto path = simulate_wf(p, eta, 0.0, T, germ_config(seed, i));
        std::vector<DivergenceDiagnostic> d;
        for (double k : kappas) d.push_back(kappa_integral_diagnostic(path, k));
        return d;
      },
      s.workers());
  std::ostringstream per, sum;
  per << "index,kappa,slope,total,verdict\n";
  sum << "kappa,finite,diverging,inconclusive\n";
  std::vector<std::array<std::size_t, 3>> counts(kappas.size(), {0, 0, 0});
  std::size_t monotone_violations = 0;
  for (std::size_t i = 0; i < N; ++i) {
    bool seen_div = false, bad = false;
    for (std::size_t k = 0; k < kappas.size(); ++k) {
      const auto& d = diags[i][k];
      per << i << ',' << f(kappas[k]) << ',' << f(d.slope) << ',' << f(d.partial_sums.back()) << ','
          << to_string(d.verdict) << '\n';
      ++counts[k][static_cast<std::size_t>(d.verdict)];
      if (seen_div && d.verdict == DivergenceVerdict::Finite) bad = true;
      seen_div = seen_div || d.verdict == DivergenceVerdict::Diverging;
    }
    monotone_violations += bad;
  }
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    sum << f(kappas[k]) << ',' << counts[k][0] << ',' << counts[k][1] << ',' << counts[k][2] << '\n';
    std::cout << "kappa=" << f(kappas[k]) << " finite=" << counts[k][0] << " diverging=" << counts[k][1]
              << " inconclusive=" << counts[k][2] << '\n';
  }
  std::cout << "monotone_violations=" << monotone_violations << '\n';
  out.write("per_seed.csv", per.str());
  out.write("summary.csv", sum.str());
  out.write("manifest.txt", s.manifest("verify-zero-one"));
  return 0;
}

int run_projection(Settings& s) {
  const auto nu = s.list("nu", "1,1,1");
  const auto x0 = s.list("x0", "0.3,0.3,0.4");
  std::vector<int> subset;
  for (double v : s.list("subset", "0")) {
    if (v != std::floor(v) || v < 0) throw ConfigError("subset entries must be allele indices");
    subset.push_back(static_cast<int>(v));
  }
  for (double v : nu)
    if (v < 0.0) throw ConfigError("nu: mutation measure weights must be nonnegative");
  for (double v : x0)
    if (v < 0.0 || v > 1.0) throw ConfigError("x0: allele frequencies must lie in [0,1]");
  if (nu.size() != x0.size()) throw ConfigError("nu and x0 must have the same number of alleles");
  const double T = s.positive("T", 1.0);
  const SimConfig sim = sim_config(s);
  const std::size_t N = s.count("samples", 5000);
  const std::size_t R = s.count("reps", 10);
  const std::uint64_t seed = s.seed();
  const Output out(s.out_dir());
  const auto r = projection_check(nu, x0, subset, T, N, R, seed, sim, s.workers());
  std::ostringstream per;
  per << "replication,p_value,passed\n";
  for (std::size_t i = 0; i < r.p_values.size(); ++i)
    per << i << ',' << f(r.p_values[i]) << ',' << b(r.p_values[i] > 0.01) << '\n';
  KeyValues kv;
  kv.add("implied_alpha", r.implied.alpha);
  kv.add("implied_beta", r.implied.beta);
  kv.add("replications", static_cast<double>(r.p_values.size()));
  kv.add("passed", static_cast<double>(r.passed));
  out.write("per_replication.csv", per.str());
  out.write("summary.csv", kv.os.str());
  out.write("manifest.txt", s.manifest("verify-projection"));
  std::cout << "passed=" << r.passed << " replications=" << r.p_values.size() << '\n';
  return 0;
}

void fail(int code, const char* kind, const std::string& msg) {
  std::cerr << "wfsep: error code=" << code << " kind=" << kind << " message=" << quote(msg) << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wright-Fisher separating times, simulation, estimation and verification"};
  app.set_config("--config", "", "flat key=value settings file; command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  Settings settings(app);

  struct Sub {
    const char* name;
    const char* about;
    const char* schema;
    int (*run)(Settings&);
  };
  const std::vector<Sub> subs = {
      {"classify", "separating points and symbolic separating time for --p0 --p1",
       "stdout: separating_points=<0|1|0,1|none> verdict=<kind> bar=<bool>\n"
       "classify.csv: key,value records (p0_*, p1_*, separating_zero, separating_one, verdict, bar)",
       run_classify},
      {"simulate", "seeded Wright-Fisher paths",
       "path_NNNNN.csv: t,x\npath_NNNNN.json: hit times and descent records\nsummary.csv: index,x_T,hit0,hit1,points",
       run_simulate},
      {"estimate", "closed-form estimates from a path file",
       "estimate.csv: key,value records (method, T, estimates, information_ij or crystallized_* flags)",
       run_estimate},
      {"verify-consistency", "median estimation error across horizons",
       "per_seed.csv: T,index,abs_error_alpha,abs_error_beta\n"
       "summary.csv: T,median_abs_error_alpha,median_abs_error_beta,failed",
       run_consistency},
      {"verify-clt", "whitened estimation errors against the normal limit",
       "per_seed.csv: index,z_alpha,z_beta,z_s\nsummary.csv: key,value records (means, frobenius_rel, ks_p_*, sigma_ij, "
       "covariance_ij, failed)",
       run_clt},
      {"verify-zero-one", "kappa integral verdicts from x0 = 0, or the boundary-start check with --alpha-b",
       "per_seed.csv: index,kappa,slope,total,verdict (with --alpha-b: index,stat_a,stat_b)\n"
       "summary.csv: kappa,finite,diverging,inconclusive (with --alpha-b: key,value records)",
       run_zero_one},
      {"verify-projection", "projected K-allele paths against the two-allele diffusion",
       "per_replication.csv: replication,p_value,passed\nsummary.csv: key,value records", run_projection},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> handles;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.about);
    sc->fallthrough();
    sc->footer(std::string("Outputs:\n") + s.schema);
    handles.emplace_back(sc, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail(kExitUsage, "Usage", e.what());
    return kExitUsage;
  }

  try {
    for (const auto& [sc, s] : handles)
      if (sc->parsed()) return s->run(settings);
    fail(kExitUsage, "Usage", "no subcommand");
    return kExitUsage;
  } catch (const ConfigError& e) {
    fail(kExitUsage, "InvalidConfig", e.what());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    fail(kExitUsage, "InvalidArgument", e.what());
    return kExitUsage;
  } catch (const SingularInformation& e) {
    fail(kExitSingular, "SingularInformation", e.what());
    return kExitSingular;
  } catch (const CrystallizeSignal& e) {
    fail(kExitOperation, "CrystallizeSignal", e.what());
    return kExitOperation;
  } catch (const DegeneratePath& e) {
    fail(kExitOperation, "DegeneratePath", e.what());
    return kExitOperation;
  } catch (const QuadratureError& e) {
    fail(kExitOperation, "QuadratureError", e.what());
    return kExitOperation;
  } catch (const Inconclusive& e) {
    fail(kExitOperation, "Inconclusive", e.what());
    return kExitOperation;
  } catch (const std::exception& e) {
    fail(kExitUnexpected, "Unexpected", e.what());
    return kExitUnexpected;
  }
}
