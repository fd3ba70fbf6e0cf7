#pragma once

#include <cmath>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isowalk/config.hpp"
#include "isowalk/errors.hpp"
#include "isowalk/parameters.hpp"
#include "isowalk/plancherel.hpp"
#include "isowalk/root_system.hpp"
#include "isowalk/spherical.hpp"
#include "isowalk/walk.hpp"

namespace isowalk {

using ojson = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kBudget = 3, kUsage = 64 };

inline std::string rat_string(const Rat& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline ojson rat_json(const RatVec& v) {
  ojson a = ojson::array();
  for (const Rat& r : v) a.push_back(rat_string(r));
  return a;
}

inline ojson root_system_json(const RootSystem& R) {
  ojson j;
  j["family"] = family_name(R.family());
  j["rank"] = R.rank();
  j["ambient_dim"] = R.ambient_dim();
  j["num_roots"] = R.num_roots();
  j["num_positive_roots"] = R.positive_roots().size();
  j["num_positive_R2"] = R.positive_R2().size();
  ojson simple = ojson::array();
  for (const RatVec& a : R.simple_roots()) simple.push_back(rat_json(a));
  j["simple_roots"] = simple;
  ojson fund = ojson::array();
  for (const RatVec& l : R.fundamental_coweights()) fund.push_back(rat_json(l));
  j["fundamental_coweights"] = fund;
  j["cartan"] = R.cartan();
  j["highest_root"] = R.root_coords()[R.highest_root()];
  j["marks"] = R.marks();
  j["good_types"] = R.good_types();
  j["weyl_order"] = R.weyl_order();
  j["index_P_over_Q"] = R.index_P_over_Q();
  ojson chars = ojson::array();
  for (const QuotientCharacter& u : R.quotient_characters()) {
    ojson c = ojson::array();
    for (const Rat& p : u.phase) c.push_back(rat_string(p));
    chars.push_back(c);
  }
  j["quotient_character_phases"] = chars;
  return j;
}

inline ojson config_json(const RunConfig& cfg) {
  ojson j;
  j["family"] = cfg.family;
  j["rank"] = cfg.rank;
  j["q"] = cfg.q;
  j["q_integral"] = std::all_of(cfg.q.begin(), cfg.q.end(), [](double x) { return x == std::round(x); });
  j["walk"] = cfg.walk_text;
  j["format"] = cfg.format;
  j["threads"] = cfg.threads;
  ojson k = ojson::object();
  for (const auto& [key, v] : cfg.knobs) k[key] = v;
  j["knobs"] = k;
  return j;
}

inline ojson cplx_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

inline ojson matrix_json(const std::vector<std::vector<double>>& m) {
  ojson a = ojson::array();
  for (const auto& row : m) a.push_back(row);
  return a;
}

inline std::string coweight_string(const Coweight& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + std::to_string(c[i]);
  return s;
}

// "re" or "re:im" per fundamental coweight
inline Character parse_character(const std::string& text, int rank) {
  Character z;
  for (const std::string& t : split(text, ',')) {
    auto colon = t.find(':');
    if (colon == std::string::npos) z.emplace_back(parse_double(t, "character value"), 0.0);
    else z.emplace_back(parse_double(trim(t.substr(0, colon)), "character value"),
                        parse_double(trim(t.substr(colon + 1)), "character value"));
  }
  if (static_cast<int>(z.size()) != rank) throw ValidationError("character needs one value per fundamental coweight");
  for (const cplx& x : z)
    if (std::abs(x) == 0.0) throw ValidationError("character values must be nonzero");
  return z;
}

// Dominant coweights with all coordinates ≤ bound.
inline std::vector<Coweight> dominant_box(int rank, int bound) {
  std::vector<Coweight> out;
  Coweight c(rank, 0);
  for (;;) {
    out.push_back(c);
    int j = rank - 1;
    while (j >= 0 && ++c[j] > bound) c[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

class Session {
 public:
  explicit Session(const RunConfig& cfg) : cfg_(cfg) {
    rs_ = std::make_shared<const RootSystem>(cfg.family_enum(), cfg.rank);
    ps_ = std::make_shared<const ParameterSystem>(rs_, cfg.q);
    sph_ = std::make_shared<const Spherical>(ps_);
  }
  const RootSystem& roots() const { return *rs_; }
  const ParameterSystem& params() const { return *ps_; }
  std::shared_ptr<const Spherical> spherical() const { return sph_; }
  WalkAnalysis walk() const {
    if (cfg_.walk_text.empty()) throw ValidationError("this command needs a walk (--walk or walk.term)");
    return WalkAnalysis(sph_, WalkSpec(*rs_, cfg_.walk_terms()));
  }
  Coweight lambda(const std::string& key = "lambda") const {
    if (!cfg_.has(key)) return Coweight(rs_->rank(), 0);
    Coweight c = parse_coweight(cfg_.get(key, ""));
    if (static_cast<int>(c.size()) != rs_->rank())
      throw ValidationError(key + " needs " + std::to_string(rs_->rank()) + " coordinates");
    if (!is_dominant(c)) throw ValidationError(key + " must be dominant");
    return c;
  }

 private:
  RunConfig cfg_;
  std::shared_ptr<const RootSystem> rs_;
  std::shared_ptr<const ParameterSystem> ps_;
  std::shared_ptr<const Spherical> sph_;
};

class Emitter {
 public:
  Emitter(std::ostream& out, const RunConfig& cfg) : out_(out), cfg_(cfg) {
    out_ << std::setprecision(15);
  }
  bool csv() const { return cfg_.format == "csv"; }

  void json(const std::string& command, ojson body) {
    ojson doc;
    doc["command"] = command;
    doc["config"] = config_json(cfg_);
    for (auto& [k, v] : body.items()) doc[k] = v;
    out_ << doc.dump(2) << "\n";
  }
  void csv_header(const std::string& command, const std::string& columns) {
    out_ << "# command: " << command << "\n# config: " << config_json(cfg_).dump() << "\n" << columns << "\n";
  }
  std::ostream& stream() { return out_; }

 private:
  std::ostream& out_;
  const RunConfig& cfg_;
};

inline void cmd_describe(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  const RootSystem& R = s.roots();
  const ParameterSystem& P = s.params();
  ojson par;
  par["q"] = P.q();
  par["exceptional"] = P.exceptional();
  par["integral_parameters"] = P.integral_parameters();
  if (R.family() == Family::BC) {
    par["a"] = P.a();
    par["b"] = P.b();
  }
  par["poincare_q_inverse"] = P.poincare();
  ojson tau = ojson::array();
  for (std::size_t a : R.positive_roots())
    tau.push_back({{"root", R.root_coords()[a]}, {"tau", P.tau(a)}});
  par["tau"] = tau;
  ojson fund = ojson::array();
  for (int i = 0; i < R.rank(); ++i) {
    Coweight e(R.rank(), 0);
    e[i] = 1;
    fund.push_back({{"coweight", e}, {"r", P.r(e)}, {"N", P.N(e)}});
  }
  par["fundamental"] = fund;
  if (cfg.knobs.count("fit")) {
    int box = static_cast<int>(parse_int(cfg.knobs.at("fit"), "fit"));
    if (box < 1) throw ValidationError("fit needs a positive box size");
    auto f = s.spherical()->value_polynomial_degree(box);
    ojson fit;
    fit["fitted_degree"] = f.degree;
    fit["degree_bound"] = f.bound;
    fit["relative_residual"] = f.residual;
    par["value_polynomial"] = fit;
  }
  std::vector<int> star;
  for (int j = 0; j < R.rank(); ++j) star.push_back(P.weyl().star_index(j) + 1);
  ojson body;
  body["root_system"] = root_system_json(R);
  body["root_system"]["star_index"] = star;
  body["parameters"] = par;
  if (em.csv()) {
    em.csv_header("describe", "key,value");
    em.stream() << "num_positive_roots," << R.positive_roots().size() << "\nweyl_order," << R.weyl_order()
                << "\nindex_P_over_Q," << R.index_P_over_Q() << "\npoincare_q_inverse," << P.poincare()
                << "\nexceptional," << P.exceptional() << "\n";
    return;
  }
  em.json("describe", body);
}

inline ojson laurent_json(const Laurent<double>& c) {
  ojson a = ojson::array();
  for (const auto& [mu, v] : c) a.push_back(ojson::array({mu, v, 0.0}));
  return a;
}

inline void cmd_spherical(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  Coweight lam = s.lambda();
  const Spherical& S = *s.spherical();
  const int n = s.roots().rank();
  if (!cfg.has("u") && !cfg.has("theta")) {
    auto c = S.coefficients(lam);
    if (em.csv()) {
      em.csv_header("spherical", "mu,re,im");
      for (const auto& [mu, v] : *c) em.stream() << coweight_string(mu) << "," << v << ",0\n";
      return;
    }
    em.json("spherical", {{"lambda", lam}, {"coefficients", laurent_json(*c)}});
    return;
  }
  Character z;
  if (cfg.has("u")) {
    z = parse_character(cfg.get("u", ""), n);
  } else {
    std::vector<double> th = parse_doubles(cfg.get("theta", ""), "theta");
    if (static_cast<int>(th.size()) != n) throw ValidationError("theta needs one angle per fundamental coweight");
    z = torus_point(th);
  }
  cplx v = S.eval(lam, z);
  bool bounded = S.is_bounded_character(z);
  if (em.csv()) {
    em.csv_header("spherical", "lambda,re,im,bounded");
    em.stream() << coweight_string(lam) << "," << v.real() << "," << v.imag() << "," << bounded << "\n";
    return;
  }
  ojson u = ojson::array();
  for (const cplx& x : z) u.push_back(cplx_json(x));
  em.json("spherical", {{"lambda", lam}, {"u", u}, {"value", cplx_json(v)}, {"bounded", bounded}});
}

inline void cmd_coeffs(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  Coweight lam = s.lambda();
  const Spherical& S = *s.spherical();
  ojson body;
  body["lambda"] = lam;
  std::vector<std::pair<std::string, std::map<Coweight, double>>> tables;
  if (cfg.has("mu")) {
    Coweight mu = s.lambda("mu");
    StructureConstants sc = S.structure_constants(lam, mu);
    body["mu"] = mu;
    body["structure_constants"] = laurent_json(sc.coefficients);
    body["clamped"] = sc.clamped;
    tables.emplace_back("structure", sc.coefficients);
  } else if (cfg.get("monomial", "0") == "1") {
    auto b = S.expand_monomial(lam);
    body["monomial_expansion"] = laurent_json(b);
    tables.emplace_back("monomial", b);
  } else {
    auto c = S.coefficients(lam);
    body["coefficients"] = laurent_json(*c);
    body["value_at_one"] = S.value_at_one(lam);
    tables.emplace_back("coefficient", std::map<Coweight, double>(c->begin(), c->end()));
  }
  if (em.csv()) {
    em.csv_header("coeffs", "kind,mu,value");
    for (const auto& [kind, t] : tables)
      for (const auto& [mu, v] : t) em.stream() << kind << "," << coweight_string(mu) << "," << v << "\n";
    return;
  }
  em.json("coeffs", body);
}

inline void cmd_plancherel(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  auto sph = s.spherical();
  const ParameterSystem& P = s.params();
  const bool with_exc = cfg.get("exceptional", "1") != "0";
  if (cfg.has("kmax")) {
    WalkAnalysis an = s.walk();
    const int kmax = static_cast<int>(cfg.get_int("kmax", 10));
    if (kmax < 0) throw ValidationError("kmax must be nonnegative");
    auto dp = an.radial_distribution(kmax);
    std::vector<Coweight> lams;
    for (const auto& [lam, p] : dp.back()) lams.push_back(lam);
    for (int k = 0; k < kmax; ++k)
      for (const auto& [lam, p] : dp[k]) lams.push_back(lam);
    std::sort(lams.begin(), lams.end());
    lams.erase(std::unique(lams.begin(), lams.end()), lams.end());
    int bw = 0;
    for (const Coweight& l : lams)
      for (const auto& [mu, c] : *sph->coefficients(l))
        for (int x : mu) bw = std::max(bw, std::abs(x));
    bw += kmax * walk_bandwidth(*sph, an.walk().terms());
    Plancherel pl(sph, static_cast<int>(cfg.get_int("grid", Plancherel::grid_size_for(bw, *sph))));
    auto table = pl.kstep_table(an.walk().terms(), lams, kmax);
    double worst = 0;
    ojson rows = ojson::array();
    if (em.csv()) em.csv_header("plancherel", "k,lambda,quadrature,dp,abs_diff");
    for (int k = 0; k <= kmax; ++k)
      for (std::size_t i = 0; i < lams.size(); ++i) {
        double exact = an.transition_from_radial(dp[k], lams[i]);
        double diff = std::abs(table[k][i] - exact);
        worst = std::max(worst, diff);
        if (em.csv())
          em.stream() << k << "," << coweight_string(lams[i]) << "," << table[k][i] << "," << exact << "," << diff
                      << "\n";
        else
          rows.push_back({{"k", k}, {"lambda", lams[i]}, {"quadrature", table[k][i]}, {"dp", exact}});
      }
    if (!em.csv()) em.json("plancherel", {{"grid", pl.grid().M}, {"max_abs_diff", worst}, {"kstep", rows}});
    return;
  }
  const int bound = static_cast<int>(cfg.get_int("max", 2));
  std::vector<Coweight> lams = dominant_box(s.roots().rank(), bound);
  int bw = 0;
  for (const Coweight& l : lams)
    for (const auto& [mu, c] : *sph->coefficients(l))
      for (int x : mu) bw = std::max(bw, std::abs(x));
  Plancherel pl(sph, static_cast<int>(cfg.get_int("grid", Plancherel::grid_size_for(2 * bw, *sph))));
  double worst = 0;
  ojson rows = ojson::array();
  if (em.csv()) em.csv_header("plancherel", "lambda,mu,re,im,expected");
  for (const Coweight& a : lams)
    for (const Coweight& b : lams) {
      cplx v = pl.inner(a, b, with_exc);
      double expected = a == b ? 1.0 / P.N(a) : 0.0;
      worst = std::max(worst, std::abs(v - expected));
      if (em.csv())
        em.stream() << coweight_string(a) << "," << coweight_string(b) << "," << v.real() << "," << v.imag() << ","
                    << expected << "\n";
      else
        rows.push_back({{"lambda", a}, {"mu", b}, {"value", cplx_json(v)}, {"expected", expected}});
    }
  if (!em.csv())
    em.json("plancherel", {{"grid", pl.grid().M},
                           {"exceptional", P.exceptional()},
                           {"includes_exceptional", with_exc && P.exceptional()},
                           {"max_abs_error", worst},
                           {"orthogonality", rows}});
}

inline void cmd_llt(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  WalkAnalysis an = s.walk();
  Coweight lam = s.lambda();
  const int kmax = static_cast<int>(cfg.get_int("kmax", 200));
  const int kmin = static_cast<int>(cfg.get_int("kmin", 1));
  const int step = static_cast<int>(cfg.get_int("step", 1));
  if (kmin < 1 || kmax < kmin || step < 1) throw ValidationError("need 1 <= kmin <= kmax and step >= 1");
  LltConstants c = an.llt_constants();
  auto dp = an.radial_distribution(kmax);
  ojson rows = ojson::array();
  if (em.csv()) em.csv_header("llt", "k,exact,asymptote,ratio");
  for (int k = kmin; k <= kmax; k += step) {
    double exact = an.transition_from_radial(dp[k], lam);
    double asym = an.llt_asymptote(lam, k, c);
    double ratio = asym > 0 ? exact / asym : std::nan("");
    if (em.csv()) em.stream() << k << "," << exact << "," << asym << "," << ratio << "\n";
    else rows.push_back({{"k", k}, {"exact", exact}, {"asymptote", asym}, {"ratio", asym > 0 ? ojson(ratio) : ojson()}});
  }
  if (!em.csv())
    em.json("llt", {{"lambda", lam},
                    {"constants", {{"K1", c.K1}, {"K2", c.K2}, {"K3", c.K3}, {"K", c.K}, {"exponent", c.exponent}}},
                    {"a_hat_one", an.a_hat_one()},
                    {"symmetry_group_size", an.symmetry_group().size()},
                    {"rows", rows}});
}

inline void cmd_drift(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  WalkAnalysis an = s.walk();
  ojson body;
  body["a_hat_one"] = an.a_hat_one();
  ojson ua = ojson::array();
  for (const QuotientCharacter& u : an.symmetry_group()) {
    ojson c = ojson::array();
    for (const Rat& p : u.phase) c.push_back(rat_string(p));
    ua.push_back(c);
  }
  body["symmetry_group"] = ua;
  body["period"] = an.period();
  body["irreducible"] = an.irreducible();
  body["gamma"] = an.drift();
  auto G = an.covariance();
  body["Gamma"] = matrix_json(G);
  Eigen::MatrixXd Gm(G.size(), G.size());
  for (std::size_t j = 0; j < G.size(); ++j)
    for (std::size_t k = 0; k < G.size(); ++k) Gm(j, k) = G[j][k];
  body["Gamma_positive_definite"] = Eigen::LLT<Eigen::MatrixXd>(Gm).info() == Eigen::Success;
  body["b_matrix"] = matrix_json(an.b_matrix());
  auto [b, res] = an.b_proportionality();
  body["b"] = b;
  body["b_residual"] = res;
  LltConstants c = an.llt_constants();
  body["llt"] = {{"K1", c.K1}, {"K2", c.K2}, {"K3", c.K3}, {"K", c.K}, {"exponent", c.exponent}, {"J", c.J}};
  if (auto jc = j_closed_form(s.roots())) body["llt"]["J_closed_form"] = *jc;
  if (em.csv()) {
    em.csv_header("drift", "j,gamma");
    auto g = an.drift();
    for (std::size_t j = 0; j < g.size(); ++j) em.stream() << j + 1 << "," << g[j] << "\n";
    return;
  }
  em.json("drift", body);
}

inline void cmd_clt(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  WalkAnalysis an = s.walk();
  const int k = static_cast<int>(cfg.get_int("k", 2000));
  const long long traj = cfg.get_int("trajectories", 100000);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  if (k < 1 || traj < 2) throw ValidationError("need k >= 1 and at least two trajectories");
  CltReport r = an.roe_clt_report(k, static_cast<std::size_t>(traj), seed, cfg.threads);
  ojson body = {{"k", r.k},
                {"trajectories", r.trajectories},
                {"seed", r.seed},
                {"gamma", r.gamma},
                {"Gamma", matrix_json(r.Gamma)},
                {"Gamma_positive_definite", r.cholesky_ok},
                {"escape_rate", r.escape_rate},
                {"escape_error", r.escape_error},
                {"z_mean", r.z_mean},
                {"z_mean_stderr", r.z_mean_stderr},
                {"variance_ratio", r.variance_ratio},
                {"correlation", matrix_json(r.correlation)},
                {"predicted_correlation", matrix_json(r.predicted_correlation)},
                {"mahalanobis_mean", r.mahalanobis_mean}};
  if (em.csv()) {
    em.csv_header("clt", "j,gamma,escape_rate,z_mean,z_mean_stderr,variance_ratio");
    for (int j = 0; j < static_cast<int>(r.gamma.size()); ++j)
      em.stream() << j + 1 << "," << r.gamma[j] << "," << r.escape_rate[j] << "," << r.z_mean[j] << ","
                  << r.z_mean_stderr[j] << "," << r.variance_ratio[j] << "\n";
    return;
  }
  em.json("clt", body);
}

inline void cmd_simulate(const RunConfig& cfg, Emitter& em) {
  Session s(cfg);
  WalkAnalysis an = s.walk();
  const int k = static_cast<int>(cfg.get_int("k", 100));
  const long long traj = cfg.get_int("trajectories", 1000);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  if (k < 0 || traj < 1) throw ValidationError("need k >= 0 and at least one trajectory");
  const bool radial = cfg.get("chain", "lattice") == "radial";
  std::vector<Coweight> ends;
  ojson body;
  if (radial) {
    ends = an.simulate_radial(k, static_cast<std::size_t>(traj), seed, cfg.threads);
  } else {
    LatticeSample smp = an.simulate_lattice(k, static_cast<std::size_t>(traj), seed, cfg.threads);
    ends = smp.endpoints;
    body["mean_over_k"] = smp.mean;
    body["covariance_over_k"] = matrix_json(smp.covariance);
  }
  if (em.csv()) {
    em.csv_header("simulate", "trajectory,endpoint");
    for (std::size_t t = 0; t < ends.size(); ++t) em.stream() << t << "," << coweight_string(ends[t]) << "\n";
    return;
  }
  body["chain"] = radial ? "radial" : "lattice";
  body["endpoints"] = ends;
  em.json("simulate", body);
}

// Parses argv, runs one subcommand, returns the exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Spherical harmonic analysis of isotropic random walks on affine buildings"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path, family, q, format;
  int rank = 0, threads = 0;
  std::vector<std::string> walk, sets;
  std::map<std::string, std::string> knob_flags;
  static const std::vector<std::pair<std::string, std::string>> kKnobs = {
      {"lambda", "dominant coweight, comma separated"},
      {"mu", "second dominant coweight (coeffs: structure constants)"},
      {"u", "character values per fundamental coweight, re or re:im"},
      {"theta", "torus angles per fundamental coweight"},
      {"k", "number of steps"},
      {"kmin", "first k of the table"},
      {"kmax", "last k of the table"},
      {"step", "k increment"},
      {"trajectories", "number of trajectories"},
      {"seed", "random seed"},
      {"max", "coordinate bound for the orthogonality box"},
      {"grid", "quadrature points per axis"},
      {"exceptional", "include the exceptional component (0 or 1)"},
      {"monomial", "expand the monomial symmetric function (0 or 1)"},
      {"chain", "lattice or radial"},
      {"fit", "describe: fit the degree of r^lambda P_lambda(1) on [0, fit]^n"}};

  struct Command {
    std::string name, help;
    void (*run)(const RunConfig&, Emitter&);
  };
  const std::vector<Command> commands = {
      {"describe", "root system and parameter summary", cmd_describe},
      {"spherical", "P_lambda(u) or its Laurent coefficients", cmd_spherical},
      {"coeffs", "coefficients, monomial expansion or structure constants", cmd_coeffs},
      {"plancherel", "orthogonality matrix or k-step table", cmd_plancherel},
      {"llt", "exact versus asymptotic return probabilities", cmd_llt},
      {"drift", "drift, covariance and local limit constants", cmd_drift},
      {"clt", "rate of escape and central limit report", cmd_clt},
      {"simulate", "trajectory endpoints", cmd_simulate}};
  std::vector<CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--family", family, "A B C D E F G or BC");
    sub->add_option("--rank", rank, "rank n");
    sub->add_option("--q", q, "q_0,...,q_n or a single value");
    sub->add_option("--walk", walk, "walk term 'c1,...,cn : weight' or 'l1:weight'; repeatable");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--format", format, "json or csv");
    sub->add_option("--set", sets, "extra key=value; repeatable");
    for (const auto& [name, help] : kKnobs) sub->add_option("--" + name, knob_flags[name], help);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    if (!family.empty()) cfg.set("family", family);
    if (rank) cfg.set("rank", std::to_string(rank));
    if (!q.empty()) cfg.set("q", q);
    for (const std::string& w : walk) cfg.set("walk.term", w);
    if (threads) cfg.set("threads", std::to_string(threads));
    if (!format.empty()) cfg.set("format", format);
    for (const std::string& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--set needs key=value");
      cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    for (const auto& [name, value] : knob_flags)
      if (!value.empty()) cfg.set(name, value);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) {
        Emitter em(out, cfg);
        commands[i].run(cfg, em);
        return kOk;
      }
    return kUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const SingularError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const BudgetError& e) {
    err << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace isowalk
