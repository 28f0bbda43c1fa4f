#include "hqlab/experiment.hpp"

#include "hqlab/asymptotics.hpp"
#include "hqlab/cohomology.hpp"
#include "hqlab/forms.hpp"
#include "hqlab/optimizer.hpp"
#include "hqlab/potentials.hpp"
#include "hqlab/regularization.hpp"
#include "hqlab/spectral.hpp"
#include "hqlab/volume.hpp"

#include <Eigen/Core>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/rational.hpp>
#include <boost/version.hpp>
#include <openssl/crypto.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#ifndef HQLAB_VERSION
#define HQLAB_VERSION "0.0.0"
#endif

namespace hqlab {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

namespace {

// ---------------------------------------------------------------------------
// value parsing

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& t) {
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + t + "' is not a number");
  }
}

long long to_int(const std::string& key, const std::string& t) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + t + "' is not an integer");
  }
}

std::vector<double> doubles(const std::string& key, const std::string& s) {
  std::vector<double> v;
  for (const auto& t : tokens(s)) v.push_back(to_double(key, t));
  return v;
}

// rows separated by ',' and entries by spaces
Eigen::MatrixXd matrix(const std::string& key, const std::string& s) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ',')) {
    std::vector<double> r;
    std::stringstream rs(row);
    std::string t;
    while (rs >> t) r.push_back(to_double(key, t));
    if (!r.empty()) rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError(key + ": empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError(key + ": ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

void only_keys(const ptree& sec, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : sec) {
    if (!v.empty()) throw ConfigError("[" + name + "] " + k + ": nested keys are not allowed");
    if (!allowed.count(k)) throw ConfigError("[" + name + "] unknown key '" + k + "'");
  }
}

const std::map<std::string, std::set<std::string>>& run_keys() {
  static const std::map<std::string, std::set<std::string>> m{
      {"oracle", {"kmax"}},
      {"asym", {"q", "kmax", "lambda", "twist", "twist_kmax", "lipschitz_to", "lipschitz_kmax"}},
      {"morse", {"q", "resolution", "samples", "basis_degree", "amplitude"}},
      {"volume", {"kmax"}},
      {"regularize", {"eps", "resolution", "morse_eps", "morse_resolutions"}},
      {"spectral", {"q", "kmax", "eps_factors", "validate", "validate_levels", "dioph_targets", "dioph_kmax"}},
      {"optimize", {"q", "resolution", "basis_degree", "budget", "restarts", "soft_width"}},
      {"conjecture", {"eps", "resolution", "samples", "amplitude", "tolerance"}},
  };
  return m;
}

// ---------------------------------------------------------------------------
// output helpers

// Numbers in summaries are rounded through a fixed decimal text.
Json num(double x) {
  if (!std::isfinite(x)) return fixed(x);
  return std::stod(fixed(x, 10));
}

struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  ModelManifold model;
  std::vector<Assertion> assertions;
  std::vector<std::string> outputs;
  Json summary = Json::object();

  void check(const std::string& name, bool ok, const std::string& detail) {
    assertions.push_back({name, ok, detail});
  }
  void csv(const std::string& file, const CsvTable& t) {
    t.write(out / file);
    outputs.push_back(file);
  }
  // expected scalar and tolerance: [expect] overrides the built-in values
  double expected(double fallback) const { return cfg.expect_value.value_or(fallback); }
  bool close(double value, double target, double rel_default) const {
    if (cfg.expect_absolute) return std::abs(value - target) <= *cfg.expect_absolute;
    const double rel = cfg.expect_tolerance.value_or(rel_default);
    return std::abs(value - target) <= rel * std::max(std::abs(target), 1e-300) ||
           (target == 0 && std::abs(value) <= rel);
  }
};

std::string describe(double value, double target) { return "value " + fixed(value, 6) + " target " + fixed(target, 6); }

int single_q(const ExperimentConfig& c, int fallback) {
  if (c.q.empty()) return fallback;
  return c.q.front();
}

ModelSpec parse_model(const ptree& sec) {
  only_keys(sec, "model", {"type", "factors", "lattice", "scale"});
  const auto type = sec.get<std::string>("type", "");
  if (type == "product") {
    std::vector<int> f;
    for (const auto& t : tokens(sec.get<std::string>("factors", ""))) {
      const long long v = to_int("model.factors", t);
      if (v < 1) throw ConfigError("model.factors: dimensions must be positive");
      f.push_back(static_cast<int>(v));
    }
    if (f.empty()) throw ConfigError("model.factors is required for products");
    return ModelSpec::proj_product(f);
  }
  if (type == "f1") {
    if (sec.size() != 1) throw ConfigError("[model] f1 takes no further keys");
    return ModelSpec::hirzebruch_f1();
  }
  if (type == "torus") {
    const auto lat = sec.get_optional<std::string>("lattice");
    if (!lat) throw ConfigError("model.lattice is required for tori");
    const double scale = to_double("model.scale", sec.get<std::string>("scale", "1"));
    if (!(scale > 0)) throw ConfigError("model.scale must be positive");
    return ModelSpec::flat_torus(matrix("model.lattice", *lat), scale);
  }
  throw ConfigError("model.type must be product, f1 or torus");
}

NSClass parse_class(const ptree& sec, const ModelSpec& spec) {
  if (spec.kind == ModelKind::FlatTorus) {
    only_keys(sec, "class", {"re", "im"});
    const auto re = sec.get_optional<std::string>("re");
    if (!re) throw ConfigError("class.re is required for tori");
    const Eigen::MatrixXd r = matrix("class.re", *re);
    Eigen::MatrixXd i = Eigen::MatrixXd::Zero(r.rows(), r.cols());
    if (auto im = sec.get_optional<std::string>("im")) i = matrix("class.im", *im);
    if (i.rows() != r.rows() || i.cols() != r.cols()) throw ConfigError("class.re and class.im differ in shape");
    Eigen::MatrixXcd h(r.rows(), r.cols());
    h.real() = r;
    h.imag() = i;
    return NSClass::torus(h);
  }
  only_keys(sec, "class", {"coeffs"});
  const auto c = doubles("class.coeffs", sec.get<std::string>("coeffs", ""));
  if (c.empty()) throw ConfigError("class.coeffs is required");
  if (spec.kind == ModelKind::HirzebruchF1) {
    if (c.size() != 2) throw ConfigError("class.coeffs on F1 takes two numbers a b for aH - bE");
    return NSClass::f1(c[0], c[1]);
  }
  return NSClass::product(c);
}

void validate_run(const ExperimentConfig& c, int dim) {
  only_keys(c.run, "run", run_keys().at(c.kind));
  for (const auto& [k, v] : c.run) {
    if (k == "q" || k == "twist" || k == "lipschitz_to") continue;  // classes, not schedules
    for (const auto& t : tokens(v.data())) {
      const double x = to_double("run." + k, t);
      const bool may_be_zero = k == "samples" || k == "validate" || k == "dioph_targets" || k == "soft_width";
      if (x < 0 || (x == 0 && !may_be_zero)) throw ConfigError("run." + k + ": schedule values must be positive");
    }
  }
  for (int q : c.q)
    if (q < 0 || q > dim) throw ConfigError("run.q = " + std::to_string(q) + " is outside 0.." + std::to_string(dim));
  const bool single = c.kind == "asym" || c.kind == "optimize";
  if (single && c.q.size() > 1) throw ConfigError("run.q takes one value for " + c.kind);
  if ((c.kind == "asym" || c.kind == "optimize" || c.kind == "spectral") && c.q.empty()) {
    throw ConfigError("run.q is required for " + c.kind);
  }
}

// ---------------------------------------------------------------------------
// experiment kinds

void run_oracle(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  const int kmax = ctx.cfg.get_int("kmax", 50);
  if (!is_integral(m, cls)) throw ConfigError("oracle needs an integral class");
  if (kmax < m.dim() + 1) throw ConfigError("run.kmax must be at least n + 1");
  const auto table = cohomology_table(m, cls, kmax);
  CsvTable t({"q", "k", "hq"});
  for (int q = 0; q <= m.dim(); ++q)
    for (int k = 1; k <= kmax; ++k) t.add({std::to_string(q), std::to_string(k), std::to_string(table.at(q, k))});
  ctx.csv("table.csv", t);

  bool exact = true;
  HilbertPolynomial poly;
  try {
    poly = hilbert_fit(table);
  } catch (const std::runtime_error&) {
    exact = false;
  }
  CsvTable e({"k", "euler", "hilbert"});
  for (int k = 1; k <= kmax; ++k) {
    e.add({std::to_string(k), std::to_string(table.euler(k)), exact ? poly(k).str() : "nan"});
  }
  ctx.csv("euler.csv", e);
  ctx.check("hilbert_exact", exact, exact ? "alternating sums interpolate exactly" : "no polynomial fits");
  if (exact) {
    Json coeffs = Json::array();
    for (const auto& c : poly.coeffs) coeffs.push_back(c.str());
    ctx.summary["hilbert_coefficients"] = coeffs;
    double nf = 1;
    for (int i = 2; i <= m.dim(); ++i) nf *= i;
    const double lead = poly.leading().convert_to<double>();
    const double target = intersection_power(m, cls) / nf;
    ctx.summary["leading"] = poly.leading().str();
    ctx.check("leading_coefficient", std::abs(lead - target) <= 1e-9 * std::max(1.0, std::abs(target)),
              describe(lead, target));
  }
  if (m.kind() == ModelKind::ProjProduct &&
      std::all_of(cls.coeffs.begin(), cls.coeffs.end(), [](double a) { return a >= 0; })) {
    // nef products: h^0 = prod C(k a_i + m_i, m_i), no higher cohomology
    bool ok = true;
    for (int k = 1; k <= kmax; ++k) {
      long long h0 = 1;
      for (std::size_t i = 0; i < cls.coeffs.size(); ++i) {
        const int mi = m.factors()[i];
        h0 *= binomial(static_cast<long long>(k * cls.coeffs[i]) + mi, mi);
      }
      ok = ok && table.at(0, k) == h0;
      for (int q = 1; q <= m.dim(); ++q) ok = ok && table.at(q, k) == 0;
    }
    ctx.check("closed_form", ok, "nef product h^0 = prod binomials, higher h^q = 0");
  }
}

void run_asym(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  const int q = single_q(ctx.cfg, 0);
  const int kmax = ctx.cfg.get_int("kmax", 100);
  if (kmax < 10) throw ConfigError("run.kmax must be at least 10");
  if (!is_integral(m, cls)) throw ConfigError("asym needs an integral class");
  const auto est = asym_hq(m, cls, q, kmax);
  CsvTable t({"k", "value"});
  for (const auto& [k, v] : est.values) t.add({std::to_string(k), fixed(v)});
  ctx.csv("sequence.csv", t);
  const double target = ctx.expected(hhat_closed_form(m, cls, q));
  ctx.summary["limit"] = num(est.limit);
  ctx.summary["diagnostic"] = num(est.diagnostic);
  ctx.summary["target"] = num(target);
  ctx.check("limit", ctx.close(est.limit, target, 0.01), describe(est.limit, target));

  if (ctx.cfg.has("lambda")) {
    const int lambda = ctx.cfg.get_int("lambda", 1);
    const auto h = homogeneity_check(m, cls, q, lambda, 1, std::max(10, kmax / lambda));
    double expect = 1;
    for (int i = 0; i < m.dim(); ++i) expect *= lambda;
    ctx.summary["homogeneity"] = {{"lambda", lambda},          {"ratio", num(h.ratio)},
                                  {"expected", num(h.expected)}, {"table_identity", h.table_identity}};
    const bool ratio_ok = std::abs(h.ratio - expect) <= 0.01 * expect;
    ctx.check("homogeneity", h.table_identity && ratio_ok,
              "ratio " + fixed(h.ratio, 6) + " vs lambda^n = " + fixed(expect, 0));
  }
  if (ctx.cfg.has("twist")) {
    const auto d = ctx.cfg.get_doubles("twist");
    const NSClass div = m.kind() == ModelKind::HirzebruchF1 ? NSClass::f1(d.at(0), d.at(1)) : NSClass::product(d);
    const auto r = twist_bound_check(m, cls, div, q, ctx.cfg.get_int("twist_kmax", 60));
    CsvTable tw({"k", "difference", "bound", "ratio"});
    for (std::size_t i = 0; i < r.k.size(); ++i)
      tw.add({std::to_string(r.k[i]), fixed(r.difference[i]), fixed(r.bound[i]), fixed(r.ratio[i])});
    ctx.csv("twist.csv", tw);
    ctx.summary["twist"] = {{"constant", num(r.constant)},
                            {"diff_slope", num(r.diff_slope)},
                            {"ratio_slope", num(r.ratio_slope)}};
    ctx.check("twist_bounded", r.bounded && std::isfinite(r.constant),
              "difference slope " + fixed(r.diff_slope, 4) + ", ratio slope " + fixed(r.ratio_slope, 4));
  }
  if (ctx.cfg.has("lipschitz_to")) {
    const auto b = ctx.cfg.get_doubles("lipschitz_to");
    const NSClass beta = m.kind() == ModelKind::HirzebruchF1 ? NSClass::f1(b.at(0), b.at(1)) : NSClass::product(b);
    const auto r = lipschitz_check(m, {{cls, beta}}, q, ctx.cfg.get_int("lipschitz_kmax", 60));
    CsvTable lp({"m", "ratio"});
    for (std::size_t i = 0; i < r.scaling_m.size(); ++i) lp.add({fixed(r.scaling_m[i], 0), fixed(r.scaling_ratio[i])});
    ctx.csv("lipschitz.csv", lp);
    ctx.summary["lipschitz"] = {{"constant", num(r.constant)}, {"scaling_slope", num(r.scaling_slope)}};
    ctx.check("lipschitz_bounded", r.bounded && std::abs(r.scaling_slope) <= 0.1,
              "scaling slope " + fixed(r.scaling_slope, 4));
  }
}

QuadratureGrid run_grid(const Context& ctx, int fallback) {
  GridOptions o;
  o.resolution = ctx.cfg.get_int("resolution", fallback);
  if (o.resolution < 4) throw ConfigError("run.resolution must be at least 4");
  return build_grid(ctx.model, o);
}

PotentialBasis run_basis(const Context& ctx) {
  BasisOptions bo;
  bo.degree = ctx.cfg.get_int("basis_degree", ctx.model.kind() == ModelKind::FlatTorus ? 1 : 2);
  return PotentialBasis(ctx.model, bo);
}

void run_morse(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  const auto grid = run_grid(ctx, m.kind() == ModelKind::FlatTorus ? 8 : 64);
  const auto u = reference_form(m, grid, cls);
  const auto prof = signature_profile(u);
  const auto all = morse_integrals(prof, grid);
  std::vector<int> qs = ctx.cfg.q;
  if (qs.empty())
    for (int q = 0; q <= m.dim(); ++q) qs.push_back(q);
  CsvTable t({"q", "value", "region_weight", "degenerate_weight"});
  for (int q = 0; q <= m.dim(); ++q) {
    t.add({std::to_string(q), fixed(all[q].value), fixed(all[q].region_weight), fixed(all[q].degenerate_weight)});
  }
  ctx.csv("morse.csv", t);
  Json vals = Json::object();
  const bool closed = m.kind() != ModelKind::HirzebruchF1 || ctx.cfg.expect_value;
  for (int q : qs) {
    vals[std::to_string(q)] = num(all[q].value);
    if (!closed) continue;
    // the reference forms of products and tori have constant signature
    const double target = ctx.expected(hhat_closed_form(m, cls, q));
    const double rel = m.kind() == ModelKind::FlatTorus ? 1e-6 : 0.005;
    bool ok = ctx.close(all[q].value, target, rel);
    if (m.kind() == ModelKind::FlatTorus && !ctx.cfg.expect_tolerance && !ctx.cfg.expect_absolute) {
      ok = std::abs(all[q].value - target) <= 1e-6;
    }
    ctx.check("morse_value_q" + std::to_string(q), ok, describe(all[q].value, target));
  }
  ctx.summary["morse"] = vals;
  ctx.summary["nodes"] = grid.nodes.size();

  const int samples = ctx.cfg.get_int("samples", 0);
  if (samples > 0) {
    const auto basis = run_basis(ctx);
    CsvTable st({"q", "sample", "value"});
    Json sw = Json::object();
    for (int q : qs) {
      const auto s = morse_sample_sweep(m, cls, q, basis, grid, static_cast<std::size_t>(samples), ctx.cfg.seed + q,
                                        ctx.cfg.get_double("amplitude", 0.1));
      for (std::size_t i = 0; i < s.values.size(); ++i) st.add({std::to_string(q), std::to_string(i), fixed(s.values[i])});
      sw[std::to_string(q)] = {{"hhat", num(s.hhat)},
                               {"min", num(s.min_value)},
                               {"violations", s.violations},
                               {"samples", s.samples}};
      ctx.check("morse_inequality_q" + std::to_string(q), s.violations == 0,
                std::to_string(s.violations) + " of " + std::to_string(s.samples) + " below hhat - " +
                    fixed(s.tolerance, 4) + ", min " + fixed(s.min_value, 6));
    }
    ctx.csv("samples.csv", st);
    ctx.summary["samples"] = sw;
    ctx.summary["basis"] = basis.names();
  }
}

void run_volume(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  const double vol = volume_class(m, cls);
  ctx.summary["volume"] = num(vol);
  if (m.dim() == 2 && m.kind() != ModelKind::FlatTorus && is_pseudoeffective(m, cls)) {
    const auto z = zariski(m, cls);
    ctx.summary["positive_part"] = z.positive.label();
    Json neg = Json::array();
    for (std::size_t i = 0; i < z.curves.size(); ++i)
      neg.push_back({{"curve", z.curves[i].label()}, {"coefficient", num(z.coefficients[i])}});
    ctx.summary["negative_part"] = neg;
  }
  if (ctx.cfg.expect_value) {
    ctx.check("volume", std::abs(vol - *ctx.cfg.expect_value) <= ctx.cfg.expect_absolute.value_or(1e-12),
              describe(vol, *ctx.cfg.expect_value));
  }
  if (m.kind() != ModelKind::FlatTorus && is_integral(m, cls)) {
    const auto env = toric_envelope(m, cls);
    ctx.summary["toric_volume"] = boost::lexical_cast<std::string>(env.volume);
    ctx.check("toric_volume_exact", boost::rational_cast<double>(env.volume) == vol,
              "polytope " + boost::lexical_cast<std::string>(env.volume) + " vs " + fixed(vol, 6));
    const int kmax = ctx.cfg.get_int("kmax", 100);
    const auto est = asym_hq(m, cls, 0, kmax);
    CsvTable t({"k", "value"});
    for (const auto& [k, v] : est.values) t.add({std::to_string(k), fixed(v)});
    ctx.csv("sections.csv", t);
    ctx.summary["hhat0"] = num(est.limit);
    ctx.check("hhat0_matches_volume", std::abs(est.limit - vol) <= 0.01 * std::max(vol, 1.0),
              describe(est.limit, vol));
  }
}

void run_regularize(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  if (m.kind() != ModelKind::HirzebruchF1) throw ConfigError("regularize runs on the f1 model");
  const auto z = zariski(m, cls);
  const double c = z.curves.empty() ? 0.0 : z.coefficients[0];
  const auto eps = ctx.cfg.get_doubles("eps", {1e-1, 1e-2, 1e-3});
  const int res = ctx.cfg.get_int("resolution", 32);
  if (c > 0) {
    const auto r = limit_measure_check(m, z.positive.coeffs[0], c, eps, res);
    CsvTable t({"eps", "resolution", "nodes", "tube", "complement", "total", "morse0", "morse1", "morse2"});
    for (const auto& row : r.rows) {
      t.add({fixed(row.eps, 12), std::to_string(row.resolution), std::to_string(row.nodes), fixed(row.tube_mass),
             fixed(row.complement_mass), fixed(row.total), fixed(row.morse0), fixed(row.morse1), fixed(row.morse2)});
    }
    ctx.csv("masses.csv", t);
    ctx.summary["expected"] = {{"total", num(r.expected_total)},
                               {"tube", num(r.expected_tube)},
                               {"complement", num(r.expected_complement)}};
    ctx.check("total_mass_constant", r.total_constant, "max relative error " + fixed(r.max_total_error, 6));
    ctx.check("mass_split", r.split_converges,
              "tube error " + fixed(r.tube_error, 4) + ", complement error " + fixed(r.complement_error, 4));
  }
  const auto meps = ctx.cfg.get_doubles("morse_eps", eps);
  auto mres = ctx.cfg.get_ints("morse_resolutions", std::vector<int>(meps.size(), res));
  if (mres.size() != meps.size()) throw ConfigError("run.morse_resolutions must pair with run.morse_eps");
  const auto mv = morse_vs_volume(m, cls, meps, mres);
  CsvTable t({"eps", "resolution", "value"});
  for (const auto& row : mv.rows) t.add({fixed(row.eps, 12), std::to_string(row.resolution), fixed(row.value)});
  ctx.csv("morse.csv", t);
  ctx.summary["volume"] = num(mv.volume);
  ctx.summary["finest"] = num(mv.rows.back().value);
  ctx.check("morse_lower_bound", mv.lower_bound_holds, "every value >= Vol - 1%");
  ctx.check("morse_converges", mv.converges, describe(mv.rows.back().value, mv.volume));
}

void run_spectral(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  if (m.kind() != ModelKind::FlatTorus) throw ConfigError("spectral runs on torus models");
  const int kmax = ctx.cfg.get_int("kmax", 20);
  const auto factors = ctx.cfg.get_doubles("eps_factors", {0.5, 0.25, 0.125, 0.0625});
  for (double f : factors)
    if (f >= 1) throw ConfigError("run.eps_factors must stay below the first Landau gap (< 1)");
  const double gap = landau_gap(m, cls.hermitian);
  const Eigen::MatrixXd a = torus_pairing(m, cls.hermitian);
  const auto seq = dioph_approx(m, a, kmax);

  CsvTable sp({"k", "q", "eigenvalue", "multiplicity"});
  CsvTable ct({"q", "k", "eps", "count", "scaled", "record"});
  Json counting = Json::object();
  for (int q : ctx.cfg.q) {
    const auto r = counting_convergence(m, cls.hermitian, q, kmax, factors);
    for (const auto& row : r.rows) {
      if (row.skipped) continue;
      ct.add({std::to_string(q), std::to_string(row.k), fixed(row.eps, 12), std::to_string(row.count),
              fixed(row.scaled), row.record ? "1" : "0"});
    }
    const auto spec = laplacian_spectrum(m, seq.at(r.best_k).m, r.best_k, q, 3 * r.best_k * gap);
    for (const auto& l : spec.levels)
      sp.add({std::to_string(r.best_k), std::to_string(q), fixed(l.eigenvalue), std::to_string(l.multiplicity)});
    const double target = ctx.expected(r.expected);
    const bool ok = ctx.cfg.expect_value ? ctx.close(r.estimate, target, 0.05) : r.converges;
    counting[std::to_string(q)] = {{"best_k", r.best_k},         {"estimate", num(r.estimate)},
                                   {"expected", num(target)},     {"plateau", r.plateau},
                                   {"max_scaled", num(r.max_scaled)}};
    ctx.check("counting_q" + std::to_string(q), ok && r.plateau, describe(r.estimate, target));
    if (is_integral(m, cls)) {
      // zero level at k = 1 against the index theorem
      const auto s1 = laplacian_spectrum(m, cls, 1, q, 0.5 * gap);
      long long index = 0;
      try {
        index = hq_torus_constant(cls.hermitian, m.lattice(), q);
      } catch (const std::invalid_argument&) {
        index = -1;
      }
      ctx.check("zero_level_q" + std::to_string(q), s1.count(0.5 * gap) == index,
                "multiplicity " + std::to_string(s1.count(0.5 * gap)) + " index " + std::to_string(index));
    }
  }
  ctx.csv("spectrum.csv", sp);
  ctx.csv("counting.csv", ct);
  ctx.summary["counting"] = counting;
  ctx.summary["gap"] = num(gap);

  if (ctx.cfg.get_int("validate", 0) > 0) {
    Json val = Json::object();
    const double levels = ctx.cfg.get_double("validate_levels", 2.5);
    for (int q = 0; q <= m.dim(); ++q) {
      const auto v = cross_validate(m, seq.at(1).m, q, levels * gap);
      val[std::to_string(q)] = {{"compared", v.compared},
                                {"max_error", num(v.max_error)},
                                {"tolerance", num(v.tolerance)},
                                {"grid", v.discretized.grid}};
      ctx.check("landau_validation_q" + std::to_string(q), v.agree,
                "max error " + fixed(v.max_error, 6) + " tolerance " + fixed(v.tolerance, 6));
    }
    ctx.summary["validation"] = val;
  }

  const int targets = ctx.cfg.get_int("dioph_targets", 0);
  if (targets > 0) {
    const int dk = ctx.cfg.get_int("dioph_kmax", 500);
    std::mt19937_64 rng(ctx.cfg.seed);
    std::normal_distribution<double> g;
    const auto n = static_cast<Eigen::Index>(m.dim());
    CsvTable dt({"target", "k", "error", "sup_error", "norm02", "record"});
    bool dirichlet = true, type_bound = true;
    double worst = 0;
    for (int t = 0; t < targets; ++t) {
      Eigen::MatrixXcd h(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) h(i, j) = cd(g(rng), g(rng));
      h = 0.5 * (h + h.adjoint()).eval();
      const auto s = dioph_approx(m, torus_pairing(m, h), dk);
      std::set<int> rec(s.subsequence.begin(), s.subsequence.end());
      for (const auto& e : s.entries) {
        type_bound = type_bound && e.norm02 <= e.error + 1e-12;
        if (rec.count(e.k))
          dt.add({std::to_string(t), std::to_string(e.k), fixed(e.error), fixed(e.sup_error), fixed(e.norm02), "1"});
      }
      for (int k : s.subsequence) dirichlet = dirichlet && s.at(k).error <= s.constant * std::pow(k, -1.0 / s.b2) * (1 + 1e-12);
      dirichlet = dirichlet && s.dirichlet_holds && std::isfinite(s.constant);
      worst = std::max(worst, s.constant);
    }
    ctx.csv("dioph.csv", dt);
    ctx.summary["dioph"] = {{"targets", targets}, {"kmax", dk}, {"max_constant", num(worst)}};
    ctx.check("dioph_dirichlet", dirichlet, "largest constant " + fixed(worst, 6));
    ctx.check("dioph_type_bound", type_bound, "(0,2) part never exceeds the rounding error");
  }
}

void run_optimize(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  const int q = single_q(ctx.cfg, 0);
  const auto grid = run_grid(ctx, m.kind() == ModelKind::FlatTorus ? 6 : 32);
  const auto basis = run_basis(ctx);
  OptimizerOptions opt;
  opt.budget = ctx.cfg.get_int("budget", 200);
  opt.restarts = ctx.cfg.get_int("restarts", 1);
  opt.seed = ctx.cfg.seed;
  opt.soft_width = ctx.cfg.get_double("soft_width", 0.0);
  if (opt.budget < 100) throw ConfigError("run.budget must be at least 100");
  const auto r = minimize_morse(m, cls, q, basis, grid, opt);
  CsvTable t({"index", "restart", "hash", "value"});
  for (const auto& e : r.trace) t.add({std::to_string(e.index), std::to_string(e.restart), e.hash, fixed(e.value)});
  ctx.csv("trace.csv", t);
  const auto gap = gap_report(m, cls, q, r);
  Json coeffs = Json::array();
  for (double c : r.coeffs) coeffs.push_back(num(c));
  Json rv = Json::array();
  for (double v : r.restart_values) rv.push_back(num(v));
  ctx.summary["coeffs"] = coeffs;
  ctx.summary["basis"] = basis.names();
  ctx.summary["value"] = num(r.value);
  ctx.summary["hhat"] = num(gap.hhat);
  ctx.summary["gap"] = num(gap.gap);
  ctx.summary["exhibit"] = gap.exhibit;
  ctx.summary["note"] = gap.note;
  ctx.summary["restart_values"] = rv;
  ctx.summary["converged"] = r.converged;
  ctx.summary["evaluations"] = r.trace.size();
  ctx.check("morse_guard", r.guard_violations == 0,
            std::to_string(r.guard_violations) + " evaluations below hhat - " + fixed(r.tolerance, 4));
  if (ctx.cfg.expect_tolerance) {
    ctx.check("gap", std::abs(gap.gap) <= *ctx.cfg.expect_tolerance, "gap " + fixed(gap.gap, 6));
  }
  if (r.restart_values.size() > 1) {
    const auto [lo, hi] = std::minmax_element(r.restart_values.begin(), r.restart_values.end());
    ctx.check("restart_invariance", *hi - *lo <= 0.01 * std::max(std::abs(*lo), 1e-12) + 1e-12,
              "spread " + fixed(*hi - *lo, 6));
  }
}

void run_conjecture(Context& ctx) {
  const auto& m = ctx.model;
  const auto& cls = ctx.cfg.cls;
  if (m.dim() != 2 || m.kind() == ModelKind::FlatTorus) throw ConfigError("conjecture runs on surface models");
  const int res = ctx.cfg.get_int("resolution", 32);
  const double tol = ctx.cfg.get_double("tolerance", 0.04);
  std::vector<QuadratureGrid> grids;
  std::vector<HermitianFormField> samples;
  // regularized currents first, then random potentials around the reference form
  if (m.kind() == ModelKind::HirzebruchF1 && is_pseudoeffective(m, cls)) {
    const auto z = zariski(m, cls);
    const double c = z.curves.empty() ? 0.0 : z.coefficients[0];
    const auto eps = ctx.cfg.get_doubles("eps", {1e-1, 1e-2, 1e-3});
    grids.reserve(eps.size() + 1);
    for (double e : eps) grids.push_back(build_grid(m, regularization_grid(e, res)));
    for (std::size_t i = 0; i < eps.size(); ++i) samples.push_back(u_epsilon(m, grids[i], z.positive, c, eps[i]));
  } else {
    grids.reserve(1);
  }
  GridOptions o;
  o.resolution = res;
  grids.push_back(build_grid(m, o));
  const auto& g = grids.back();
  const auto basis = PotentialBasis(m, {});
  const auto reference = reference_form(m, g, cls);
  const auto table = tabulate(basis, g);
  std::mt19937_64 rng(ctx.cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double scale = ctx.cfg.get_double("amplitude", 0.1) * std::max(ns_norm(m, cls), 1e-3);
  const int n = ctx.cfg.get_int("samples", 20);
  for (int i = 0; i < n; ++i) {
    std::vector<double> c(basis.size(), 0.0);
    if (i > 0)
      for (auto& v : c) v = scale * unit(rng);
    samples.push_back(hessian_form(reference, table, c));
  }
  const auto r = conjecture_check(m, cls, samples, tol);
  CsvTable t({"sample", "rhs"});
  for (std::size_t i = 0; i < r.rhs.size(); ++i) t.add({std::to_string(i), fixed(r.rhs[i])});
  ctx.csv("rhs.csv", t);
  ctx.summary["volume"] = num(r.volume);
  ctx.summary["max_rhs"] = num(r.max_rhs);
  ctx.summary["samples"] = r.samples;
  ctx.check("volume_bounds_union", r.violations == 0,
            std::to_string(r.violations) + " samples above Vol + " + fixed(tol, 4));
}

Json versions() {
  return {{"hqlab", HQLAB_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"openssl", OpenSSL_version(OPENSSL_VERSION)},
          {"compiler", __VERSION__}};
}

std::string q_label(const std::vector<int>& q) {
  if (q.empty()) return "all";
  std::string s;
  for (int x : q) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

bool ExperimentConfig::has(const std::string& key) const { return run.get_optional<std::string>(key).has_value(); }

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  auto v = run.get_optional<std::string>(key);
  if (!v) return fallback;
  return static_cast<int>(to_int("run." + key, *v));
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto v = run.get_optional<std::string>(key);
  if (!v) return fallback;
  return to_double("run." + key, *v);
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
  auto v = run.get_optional<std::string>(key);
  if (!v) return fallback;
  auto d = doubles("run." + key, *v);
  if (d.empty()) throw ConfigError("run." + key + " is empty");
  return d;
}

std::vector<int> ExperimentConfig::get_ints(const std::string& key, std::vector<int> fallback) const {
  auto v = run.get_optional<std::string>(key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& t : tokens(*v)) out.push_back(static_cast<int>(to_int("run." + key, t)));
  if (out.empty()) throw ConfigError("run." + key + " is empty");
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ptree pt;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [k, v] : pt) {
    if (k != "experiment" && k != "model" && k != "class" && k != "run" && k != "expect") {
      throw ConfigError("unknown section [" + k + "]");
    }
    if (v.empty()) throw ConfigError("top-level key '" + k + "' outside a section");
  }
  ExperimentConfig c;
  c.text = text;
  const auto exp = pt.get_child_optional("experiment");
  if (!exp) throw ConfigError("missing [experiment]");
  only_keys(*exp, "experiment", {"kind", "name", "seed", "threads"});
  c.kind = exp->get<std::string>("kind", "");
  if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind) == experiment_kinds().end()) {
    throw ConfigError("experiment.kind '" + c.kind + "' is not one of oracle, asym, morse, volume, regularize, "
                      "spectral, optimize, conjecture");
  }
  c.name = exp->get<std::string>("name", c.kind);
  if (auto s = exp->get_optional<std::string>("seed")) {
    const long long v = to_int("experiment.seed", *s);
    if (v < 0) throw ConfigError("experiment.seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(v);
  }
  if (auto s = exp->get_optional<std::string>("threads")) {
    c.threads = static_cast<int>(to_int("experiment.threads", *s));
    if (c.threads < 0) throw ConfigError("experiment.threads must be nonnegative");
  }
  const auto model = pt.get_child_optional("model");
  if (!model) throw ConfigError("missing [model]");
  c.model = parse_model(*model);
  const auto cls = pt.get_child_optional("class");
  if (!cls) throw ConfigError("missing [class]");
  c.cls = parse_class(*cls, c.model);
  ModelManifold mm = [&] {
    try {
      return build_model(c.model);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }();
  try {
    check_class(mm, c.cls);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("class: ") + e.what());
  }
  if (auto run = pt.get_child_optional("run")) c.run = *run;
  if (auto q = c.run.get_optional<std::string>("q")) {
    for (const auto& t : tokens(*q)) c.q.push_back(static_cast<int>(to_int("run.q", t)));
  }
  validate_run(c, mm.dim());
  if (auto ex = pt.get_child_optional("expect")) {
    only_keys(*ex, "expect", {"value", "tolerance", "absolute"});
    if (auto v = ex->get_optional<std::string>("value")) c.expect_value = to_double("expect.value", *v);
    if (auto v = ex->get_optional<std::string>("tolerance")) {
      c.expect_tolerance = to_double("expect.tolerance", *v);
      if (!(*c.expect_tolerance > 0)) throw ConfigError("expect.tolerance must be positive");
    }
    if (auto v = ex->get_optional<std::string>("absolute")) {
      c.expect_absolute = to_double("expect.absolute", *v);
      if (!(*c.expect_absolute >= 0)) throw ConfigError("expect.absolute must be nonnegative");
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  set_default_threads(cfg.threads);
  fs::create_directories(out);
  Context ctx{cfg, out, build_model(cfg.model), {}, {}, Json::object()};
  try {
    if (cfg.kind == "oracle") run_oracle(ctx);
    else if (cfg.kind == "asym") run_asym(ctx);
    else if (cfg.kind == "morse") run_morse(ctx);
    else if (cfg.kind == "volume") run_volume(ctx);
    else if (cfg.kind == "regularize") run_regularize(ctx);
    else if (cfg.kind == "spectral") run_spectral(ctx);
    else if (cfg.kind == "optimize") run_optimize(ctx);
    else if (cfg.kind == "conjecture") run_conjecture(ctx);
  } catch (const std::invalid_argument& e) {
    // preconditions of the numerical layer that the schema cannot see
    throw ConfigError(e.what());
  }

  RunOutcome res;
  res.assertions = ctx.assertions;
  res.status = std::all_of(ctx.assertions.begin(), ctx.assertions.end(), [](const Assertion& a) { return a.passed; })
                   ? 0
                   : 1;
  Json asserts = Json::object();
  for (const auto& a : ctx.assertions) asserts[a.name] = {{"passed", a.passed}, {"detail", a.detail}};
  Json summary = ctx.summary;
  summary["experiment"] = cfg.kind;
  summary["name"] = cfg.name;
  summary["model"] = ctx.model.label();
  summary["class"] = cfg.cls.label();
  summary["q"] = q_label(cfg.q);
  summary["seed"] = cfg.seed;
  summary["assertions"] = asserts;
  summary["passed"] = res.status == 0;
  write_json(out / "summary.json", summary);
  res.summary = summary;

  Json manifest;
  manifest["experiment"] = cfg.kind;
  manifest["name"] = cfg.name;
  manifest["model"] = ctx.model.label();
  manifest["class"] = cfg.cls.label();
  manifest["q"] = q_label(cfg.q);
  manifest["seed"] = cfg.seed;
  manifest["threads"] = cfg.threads;
  manifest["config"] = cfg.text;
  manifest["versions"] = versions();
  manifest["outputs"] = ctx.outputs;
  manifest["summary"] = "summary.json";
  manifest["summary_sha256"] = sha256_file(out / "summary.json");
  manifest["status"] = res.status == 0 ? "pass" : "fail";
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(out / "manifest.json", manifest);
  return res;
}

Json report_index(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> manifests;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "manifest.json") manifests.push_back(e.path());
  std::sort(manifests.begin(), manifests.end());

  Json entries = Json::object();
  Json warnings = Json::array();
  long long runs = 0, passed = 0, failed = 0, duplicates = 0;
  for (const auto& p : manifests) {
    const std::string rel = fs::relative(p, dir).generic_string();
    try {
      std::ifstream in(p, std::ios::binary);
      const Json man = Json::parse(in);
      const fs::path sp = p.parent_path() / man.at("summary").get<std::string>();
      std::ifstream sin(sp, std::ios::binary);
      if (!sin) throw std::runtime_error("missing summary");
      std::ostringstream ss;
      ss << sin.rdbuf();
      const std::string hash = sha256_hex(ss.str());
      if (hash != man.at("summary_sha256").get<std::string>()) throw std::runtime_error("summary hash mismatch");
      const Json summary = Json::parse(ss.str());
      const std::string key = man.at("experiment").get<std::string>() + "|" + man.at("model").get<std::string>() +
                              "|" + man.at("class").get<std::string>() + "|" + man.at("q").get<std::string>();
      Json& slot = entries[key];
      if (!slot.is_array()) slot = Json::array();
      bool seen = false;
      for (auto& e : slot) {
        if (e.at("hash") == hash) {
          e["paths"].push_back(rel);
          seen = true;
        }
      }
      ++runs;
      if (seen) {
        ++duplicates;
        continue;
      }
      const bool ok = summary.at("passed").get<bool>();
      ok ? ++passed : ++failed;
      Json failing = Json::array();
      for (const auto& [name, a] : summary.at("assertions").items())
        if (!a.at("passed").get<bool>()) failing.push_back(name);
      slot.push_back({{"hash", hash},
                      {"name", man.value("name", "")},
                      {"passed", ok},
                      {"failing", failing},
                      {"assertions", summary.at("assertions").size()},
                      {"paths", Json::array({rel})}});
    } catch (const std::exception& e) {
      warnings.push_back({{"path", rel}, {"error", e.what()}});
    }
  }
  Json index = {{"entries", entries},
                {"counts", {{"runs", runs}, {"unique", passed + failed}, {"passed", passed}, {"failed", failed},
                            {"duplicates", duplicates}}},
                {"warnings", warnings}};
  write_json(dir / "index.json", index);
  return index;
}

}  // namespace hqlab
