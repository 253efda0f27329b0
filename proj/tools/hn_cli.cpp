// hn: batch front end. Each subcommand reads JSON, runs checks and writes report.json and
// tables.csv into the output directory.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hn/hn.hpp"

using namespace hn;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string input, params, at, psi, ladder, zeta, split, radii, decompose;
  std::string output = ".";
  bool strict = false;
  double tol = kResidualTol;
  double box = 0.0;
  int points = 0;
  int z_points = 4;
  std::uint64_t seed = 42;
  int max_degree = 8;
  int free_count = 0;
  double scale = kPi;
};

class Report {
 public:
  explicit Report(std::string command) {
    j_["command"] = std::move(command);
    j_["status"] = "ok";
  }

  ojson& root() { return j_; }
  void add(const std::string& key, ojson value) { j_["results"][key] = std::move(value); }
  void verdict(const std::string& key, const Verdict& v) {
    add(key, verdict_to_json(v));
    for (auto& r : v.residuals) row(key, r.id, r.value, r.tol);
    if (v.outcome == Outcome::NotNevanlinna || v.outcome == Outcome::NotRP) negative_ = true;
  }
  void error(const std::string& stage, const Error& e) { error(stage, to_string(e.code()), e.what()); }
  void error(const std::string& stage, const std::string& code, const std::string& message) {
    j_["errors"].push_back({{"stage", stage}, {"code", code}, {"message", message}});
    j_["status"] = "error";
  }
  bool failed() const { return j_["status"] == "error"; }
  bool negative() const { return negative_; }

  // Runs one criterion; library errors become report entries.
  void stage(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      error(name, e);
    } catch (const std::exception& e) {
      error(name, "Internal", e.what());
    }
  }

  void table_header(std::string h) { header_ = std::move(h); }
  void line(const std::string& l) { csv_ += l + "\n"; }
  void row(const std::string& check, const std::string& id, double value, double tol) {
    if (header_.empty()) header_ = "check,id,value,tol";
    line(check + "," + id + "," + num(value) + "," + num(tol));
  }

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  void write(const std::string& dir) const {
    fs::create_directories(dir);
    std::ofstream r(fs::path(dir) / "report.json");
    if (!r) throw Error(ErrorCode::Io, "cannot write report.json in '" + dir + "'");
    r << j_.dump(2) << "\n";
    std::ofstream t(fs::path(dir) / "tables.csv");
    if (!t) throw Error(ErrorCode::Io, "cannot write tables.csv in '" + dir + "'");
    t << (header_.empty() ? "check,id,value,tol" : header_) << "\n" << csv_;
  }

 private:
  ojson j_;
  std::string header_;
  std::string csv_;
  bool negative_ = false;
};

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, "'" + text + "'"));
  return out;
}

QuadConfig quad_from(const Options& o, const json* doc) {
  QuadConfig q;
  if (doc && doc->is_object() && doc->contains("quad")) apply_quad_overrides((*doc)["quad"], q);
  if (o.box > 0) q.box_halfwidth = o.box;
  if (o.points > 0) q.points_per_axis = o.points;
  q.validate();
  return q;
}

// Accepts the object itself or a wrapper {"<key>": ..., "quad": ...}.
const json& unwrap(const json& doc, const char* key) { return doc.is_object() && doc.contains(key) ? doc[key] : doc; }

TestFunction psi_from(const Options& o, int n) {
  TestFunction f;
  if (!o.psi.empty()) {
    f.psi = Expr::parse(o.psi);
  } else {
    std::string s;
    for (int j = 1; j <= n; ++j) s += (j > 1 ? "*" : "") + std::string("1/(1+t") + std::to_string(j) + "^2)";
    f.psi = Expr::parse(s);
  }
  return f;
}

std::vector<double> ladder_from(const Options& o) { return o.ladder.empty() ? default_ladder() : parse_doubles(o.ladder); }

std::string point_str(const UpperPoint& z) {
  std::string s;
  for (size_t k = 0; k < z.size(); ++k) s += (k ? "," : "") + format_complex(z[k]);
  return s;
}

void run_classify(const Options& o, Report& rep) {
  json doc = load_json(o.input);
  QuadConfig q = quad_from(o, &doc);
  rep.root()["quad"] = quad_to_json(q);
  MeasureSpec mu = measure_from_json(unwrap(doc, "measure"));
  mu.validate(q);
  rep.stage("nevanlinna_condition", [&] { rep.verdict("nevanlinna_condition", classify_by_residual(mu, q, o.z_points, o.seed, o.tol)); });
  if (mu.terms.size() == 1)
    if (auto* pl = std::get_if<PowerLaw2D>(&mu.terms[0]))
      rep.stage("powerlaw_rule", [&] { rep.verdict("powerlaw_rule", classify_powerlaw(*pl)); });
  if (mu.dim >= 2)
    rep.stage("finiteness", [&] { rep.verdict("finiteness", finiteness_check(mu, {16, 32, 64, 128}, q)); });
}

void run_eval(const Options& o, Report& rep) {
  json doc = load_json(o.params);
  QuadConfig q = quad_from(o, &doc);
  HerglotzParams p = params_from_json(unwrap(doc, "params"));
  p.validate(q);
  UpperPoint z = parse_point(o.at);
  require(static_cast<int>(z.size()) == p.dim(), ErrorCode::Invalid, "--at has the wrong number of coordinates");
  rep.table_header("z,value");
  rep.stage("eval", [&] {
    cplx v = eval_representation(p, z, q);
    rep.add("eval", {{"z", point_str(z)}, {"value", format_complex(v)}});
    rep.line("\"" + point_str(z) + "\"," + format_complex(v));
  });
}

void run_invert(const Options& o, Report& rep) {
  json doc = load_json(o.params);
  QuadConfig q = quad_from(o, &doc);
  HerglotzParams p = params_from_json(unwrap(doc, "params"));
  p.validate(q);
  TestFunction psi = psi_from(o, p.dim());
  rep.table_header("y,value");
  rep.stage("stieltjes", [&] {
    StieltjesResult s = stieltjes_pair(p, psi, ladder_from(o), q);
    rep.add("stieltjes", {{"psi", psi.psi.str()}, {"value", s.value}, {"spread", s.spread}});
    for (size_t k = 0; k < s.ladder_y.size(); ++k) rep.line(Report::num(s.ladder_y[k]) + "," + Report::num(s.ladder_values[k]));
  });
  rep.stage("direct_pairing", [&] {
    rep.add("direct_pairing", {{"value", p.mu.empty() ? 0.0 : pair(p.mu, psi, q).value}});
  });
}

Poly2 poly_from_doc(const json& doc) {
  if (doc.contains("a")) return hyperplane_from_json(doc).p;
  return poly2_from_json(detail::field(doc, "poly", "input"), detail::get_int(doc, "dim", "input"), "input.poly");
}

void run_hyperplane(const Options& o, Report& rep) {
  rep.table_header("part,polynomial");
  if (!o.decompose.empty()) {
    json doc = load_json(o.decompose);
    Poly2 p = poly_from_doc(unwrap(doc, "hyperplane"));
    rep.stage("decompose", [&] {
      auto parts = decompose_extremal(p);
      ojson arr = ojson::array();
      for (size_t k = 0; k < parts.size(); ++k) {
        arr.push_back(parts[k].str());
        rep.line(std::to_string(k + 1) + ",\"" + parts[k].str() + "\"");
      }
      rep.add("decompose", {{"polynomial", p.str()},
                            {"extremal", is_extremal(p, p.vars())},
                            {"parts", arr},
                            {"sum_verified", verify_decomposition(p, parts)}});
    });
    if (o.input.empty()) return;
  }
  json doc = load_json(o.input);
  QuadConfig q = quad_from(o, &doc);
  HyperplaneData h = hyperplane_from_json(unwrap(doc, "hyperplane"));
  rep.stage("validate", [&] { rep.verdict("validate", validate(h, q)); });
  rep.stage("extremal", [&] { rep.add("extremal", is_extremal(h.p, h.dim())); });
  rep.stage("measure", [&] { rep.add("measure", measure_to_json(to_measure(h, o.scale, q))); });
}

void run_polydisc(const Options& o, Report& rep) {
  TorusMeasureSpec nu;
  QuadConfig q;
  if (!o.params.empty()) {
    json doc = load_json(o.params);
    q = quad_from(o, &doc);
    HerglotzParams p = params_from_json(unwrap(doc, "params"));
    p.validate(q);
    RPParams r = params_to_rp(p);
    rep.add("rp_params", {{"A", r.A}, {"nu", torus_to_json(r.nu)}});
    nu = r.nu;
  } else {
    json doc = load_json(o.input);
    q = quad_from(o, &doc);
    nu = torus_from_json(unwrap(doc, "torus"));
  }
  nu.validate(q);
  rep.table_header("index,re,im");
  rep.stage("rp_condition", [&] {
    std::vector<CoefficientRow> table;
    rep.verdict("rp_condition", rp_check(nu, o.max_degree, q, o.tol, &table));
    for (auto& r : table)
      rep.line("\"" + index_str(r.j) + "\"," + Report::num(r.value.real()) + "," + Report::num(r.value.imag()));
  });
}

void run_fixedvar(const Options& o, Report& rep) {
  json doc = load_json(o.params);
  QuadConfig q = quad_from(o, &doc);
  FixedSlice s;
  s.base = params_from_json(unwrap(doc, "params"));
  s.base.validate(q);
  s.zeta = parse_point(o.zeta.empty() ? "i" : o.zeta);
  s.free_count = o.free_count > 0 ? o.free_count : s.base.dim() - s.m();
  s.validate();
  TestFunction psi = psi_from(o, s.free_count);
  rep.stage("slice_ab", [&] {
    SliceAB ab = slice_ab(s);
    rep.add("slice_ab", {{"a_tilde", ab.a_tilde}, {"b_tilde", ab.b_tilde}});
  });
  rep.table_header("check,id,value,tol");
  rep.stage("cross_check", [&] {
    CrossCheck c = slice_stieltjes_cross_check(s, psi, ladder_from(o), q);
    rep.add("cross_check", {{"psi", psi.psi.str()}, {"slice_pair", c.lhs}, {"stieltjes", c.rhs}, {"gap", c.gap}});
    rep.row("cross_check", "gap", c.gap, 1e-4);
  });
  if (!o.split.empty()) {
    rep.stage("singular_split", [&] {
      std::vector<cplx> zetas = parse_point(o.split);
      SplitReport r = singular_split_check(s, zetas, psi, q);
      ojson rows = ojson::array();
      for (auto& row : r.rows)
        rows.push_back({{"zeta", format_complex(row.zeta)}, {"singular", row.singular}, {"ac", row.ac}});
      rep.add("singular_split_rows", rows);
      rep.verdict("singular_split", r.verdict);
    });
  }
}

void run_growth(const Options& o, Report& rep) {
  json doc = load_json(o.input);
  QuadConfig q = quad_from(o, &doc);
  MeasureSpec mu = measure_from_json(unwrap(doc, "measure"));
  mu.validate(q);
  std::vector<double> radii = o.radii.empty() ? std::vector<double>{1, 2, 4, 8, 16, 32, 64} : parse_doubles(o.radii);
  if (mu.dim == 2) {
    rep.stage("lower_growth", [&] {
      GrowthReport g = lower_growth(mu, radii, q);
      rep.add("lower_growth", {{"outcome", to_string(g.lower)}, {"upper_M_fit", g.upper_M_fit}, {"notes", g.notes}});
      std::string csv = g.csv(2);
      rep.table_header(csv.substr(0, csv.find('\n')));
      rep.line(csv.substr(csv.find('\n') + 1, csv.size() - csv.find('\n') - 2));
    });
  } else {
    rep.table_header("R,ratio");
    rep.stage("conjecture_probe", [&] {
      auto ratios = conjecture_probe(mu, radii, q);
      rep.add("conjecture_probe", ratios);
      for (size_t k = 0; k < radii.size(); ++k) rep.line(Report::num(radii[k]) + "," + Report::num(ratios[k]));
    });
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Herglotz-Nevanlinna measure toolkit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--output", o.output, "Directory for report.json and tables.csv");
  app.add_flag("--strict", o.strict, "Exit 2 when a negative verdict is reported");
  app.add_option("--tol", o.tol, "Residual tolerance");
  app.add_option("--box", o.box, "Quadrature box halfwidth");
  app.add_option("--points", o.points, "Quadrature points per axis");
  app.add_option("--seed", o.seed, "Seed for random evaluation points");

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const Options&, Report&);
  };
  const Sub subs[] = {
      {"classify", "Nevanlinna-condition classification of a measure", run_classify},
      {"eval", "Evaluate the integral representation", run_eval},
      {"invert", "Stieltjes inversion against a test function", run_invert},
      {"hyperplane", "Validate and decompose hyperplane measures", run_hyperplane},
      {"polydisc", "Fourier-support check on the torus", run_polydisc},
      {"fixedvar", "Slices with frozen variables", run_fixedvar},
      {"growth", "Cube-mass growth ladders", run_growth},
  };
  std::vector<CLI::App*> apps;
  for (auto& s : subs) {
    CLI::App* c = app.add_subcommand(s.name, s.help);
    c->add_option("--input", o.input, "Input JSON");
    c->add_option("--params", o.params, "Representation parameters JSON");
    c->add_option("--at", o.at, "Evaluation point, e.g. \"i,1+2i\"");
    c->add_option("--psi", o.psi, "Test function expression in t1..tn");
    c->add_option("--ladder", o.ladder, "Decreasing y values, comma separated");
    c->add_option("--zeta", o.zeta, "Frozen values, comma separated");
    c->add_option("--free", o.free_count, "Number of free variables");
    c->add_option("--split", o.split, "Frozen values for the singular split check");
    c->add_option("--radii", o.radii, "Doubling radii, comma separated");
    c->add_option("--decompose", o.decompose, "Polynomial JSON to decompose into squares");
    c->add_option("--max-degree", o.max_degree, "Largest Fourier index");
    c->add_option("--scale", o.scale, "Hyperplane measure scale");
    c->add_option("--points-z", o.z_points, "Number of evaluation points for the residual");
    c->add_option("--output", o.output, "Directory for report.json and tables.csv");
    c->add_flag("--strict", o.strict, "Exit 2 when a negative verdict is reported");
    c->add_option("--tol", o.tol, "Residual tolerance");
    c->add_option("--box", o.box, "Quadrature box halfwidth");
    c->add_option("--points", o.points, "Quadrature points per axis");
    c->add_option("--seed", o.seed, "Seed for random evaluation points");
    apps.push_back(c);
  }
  CLI11_PARSE(app, argc, argv);

  for (size_t k = 0; k < apps.size(); ++k) {
    if (!apps[k]->parsed()) continue;
    Report rep(subs[k].name);
    rep.root()["seed"] = o.seed;
    rep.stage("input", [&] { subs[k].run(o, rep); });
    try {
      rep.write(o.output);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
    std::cout << rep.root().dump(2) << "\n";
    if (rep.failed()) return 1;
    if (o.strict && rep.negative()) return 2;
    return 0;
  }
  return 1;
}
