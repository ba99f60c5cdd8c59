#include "spectral_lab/cli_reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace spectral_lab {

using nlohmann::json;

ConvexDomain DomainSpec::build() const {
  if (kind == "halfplane") return ConvexDomain::half_plane();
  if (kind == "hyperbola") return ConvexDomain::hyperbola(a, b);
  if (kind == "parabola") return ConvexDomain::parabola(p);
  if (kind == "sector-approx") return ConvexDomain::sector_approx(alpha, a);
  throw Error(ErrorKind::Config, "unknown domain kind '" + kind + "'");
}

namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw Error(ErrorKind::Config, "not a number: '" + std::string(item) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

DomainSpec parse_domain_spec(std::string_view text) {
  const auto colon = text.find(':');
  DomainSpec d;
  d.kind = std::string(text.substr(0, colon));
  const std::vector<double> args =
      colon == std::string_view::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1));
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw Error(ErrorKind::Config, "wrong number of parameters for domain '" + d.kind + "'");
  };
  if (d.kind == "halfplane") {
    want(0, 0);
  } else if (d.kind == "hyperbola") {
    want(2, 2);
    d.a = args[0];
    d.b = args[1];
  } else if (d.kind == "parabola") {
    want(1, 1);
    d.p = args[0];
  } else if (d.kind == "sector-approx") {
    want(1, 2);
    d.alpha = args[0];
    d.a = args.size() == 2 ? args[1] : 1e-3;
  } else {
    throw Error(ErrorKind::Config, "unknown domain kind '" + d.kind + "'");
  }
  d.build();
  return d;
}

CampaignDesign CampaignConfig::design() const {
  CampaignDesign d;
  for (const DomainSpec& s : domains) d.domains.push_back(s.build());
  d.ensembles = ensembles;
  d.functions = functions;
  d.quad_tol = quad_tol;
  d.slack_factor = slack_factor;
  d.n_angles = n_angles;
  d.lemma1_samples = lemma1_samples;
  d.damping_eps = damping_eps;
  d.seed = seed;
  d.regularization = regularization;
  return d;
}

bool operator==(const EnsembleSpec& x, const EnsembleSpec& y) {
  return x.kind == y.kind && x.n == y.n && x.count == y.count && x.margin == y.margin;
}

bool operator==(const NamedFunction& x, const NamedFunction& y) { return x.id == y.id && x.f == y.f; }

bool operator==(const CampaignConfig& x, const CampaignConfig& y) {
  return x.domains == y.domains && x.ensembles == y.ensembles && x.functions == y.functions &&
         x.quad_tol == y.quad_tol && x.slack_factor == y.slack_factor && x.n_angles == y.n_angles &&
         x.lemma1_samples == y.lemma1_samples && x.damping_eps == y.damping_eps &&
         x.seed == y.seed && x.regularization == y.regularization && x.outputs == y.outputs;
}

RationalFunction random_partial_fraction(int n_poles, std::uint64_t seed) {
  if (n_poles < 1) throw Error(ErrorKind::InvalidArgument, "need at least one pole");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<PoleTerm> terms;
  for (int k = 0; k < n_poles; ++k) {
    Complex p(normal(rng), normal(rng));
    if (p.real() > 0) p = -std::conj(p);
    p -= 0.2;
    const Complex c(normal(rng), normal(rng));
    terms.push_back(PoleTerm{p, {c}});
  }
  return RationalFunction(std::move(terms), 0.0);
}

std::vector<DomainSpec> default_domains() {
  DomainSpec half;
  DomainSpec hyp;
  hyp.kind = "hyperbola";
  hyp.a = 1.0;
  hyp.b = 1.0;
  DomainSpec par;
  par.kind = "parabola";
  par.p = 1.0;
  return {half, hyp, par};
}

std::vector<EnsembleSpec> default_ensembles() {
  return {{EnsembleKind::Ginibre, 8, 60, 0.1},
          {EnsembleKind::Jordan, 6, 20, 0.1},
          {EnsembleKind::Normal, 8, 20, 0.1}};
}

std::vector<NamedFunction> default_functions() {
  const RationalFunction cayley({PoleTerm{-1.0, {-2.0}}}, 1.0);
  return {{"resolvent", RationalFunction::pole(-1.0)},
          {"cayley", cayley},
          {"resolvent2", RationalFunction::pole(-1.0, 1.0, 2)},
          {"random3", random_partial_fraction(3, 7)}};
}

CampaignConfig default_config() {
  CampaignConfig c;
  c.domains = default_domains();
  c.ensembles = default_ensembles();
  c.functions = default_functions();
  return c;
}

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw Error(ErrorKind::Config, (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

void allow_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(ptr, "expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(keys.begin(), keys.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) fail(ptr + "/" + item.key(), "unknown field");
  }
}

double number_at(const json& j, const std::string& ptr, const char* key, double fallback,
                 bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(ptr + "/" + key, "required field missing");
    return fallback;
  }
  const json& v = j.at(key);
  if (!v.is_number()) fail(ptr + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(ptr + "/" + key, "must be finite");
  return x;
}

long long integer_at(const json& j, const std::string& ptr, const char* key, long long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(ptr + "/" + key, "expected an integer");
  return v.get<long long>();
}

std::string string_at(const json& j, const std::string& ptr, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
  return v.get<std::string>();
}

DomainSpec domain_from_json(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) fail(ptr + "/kind", "expected a domain kind");
  DomainSpec d;
  d.kind = j.at("kind").get<std::string>();
  if (d.kind == "halfplane") {
    allow_keys(j, ptr, {"kind"});
  } else if (d.kind == "hyperbola") {
    allow_keys(j, ptr, {"kind", "a", "b"});
    d.a = number_at(j, ptr, "a", 0, true);
    d.b = number_at(j, ptr, "b", 0, true);
    if (!(d.a > 0)) fail(ptr + "/a", "must be positive");
    if (!(d.b > 0)) fail(ptr + "/b", "must be positive");
  } else if (d.kind == "parabola") {
    allow_keys(j, ptr, {"kind", "p"});
    d.p = number_at(j, ptr, "p", 0, true);
    if (!(d.p > 0)) fail(ptr + "/p", "must be positive");
  } else if (d.kind == "sector-approx") {
    allow_keys(j, ptr, {"kind", "alpha", "a"});
    d.alpha = number_at(j, ptr, "alpha", 0, true);
    d.a = number_at(j, ptr, "a", 1e-3);
    if (!(d.alpha > 0 && d.alpha < kPi / 2)) fail(ptr + "/alpha", "must lie in (0, pi/2)");
    if (!(d.a > 0)) fail(ptr + "/a", "must be positive");
  } else {
    fail(ptr + "/kind", "unknown domain kind '" + d.kind + "'");
  }
  return d;
}

EnsembleSpec ensemble_from_json(const json& j, const std::string& ptr) {
  allow_keys(j, ptr, {"kind", "n", "count", "margin"});
  EnsembleSpec e;
  const std::string kind = j.contains("kind") ? string_at(j, ptr, "kind") : "ginibre";
  try {
    e.kind = ensemble_kind_from_string(kind);
  } catch (const Error&) {
    fail(ptr + "/kind", "unknown ensemble kind '" + kind + "'");
  }
  const long long n = integer_at(j, ptr, "n", 8);
  if (n < 1 || n > MatrixOperator::kMaxDimension) fail(ptr + "/n", "must lie in [1, 512]");
  e.n = static_cast<int>(n);
  const long long count = integer_at(j, ptr, "count", 1);
  if (count < 1 || count > 1000000) fail(ptr + "/count", "must be >= 1");
  e.count = static_cast<int>(count);
  e.margin = number_at(j, ptr, "margin", 0.1);
  if (!(e.margin > 0)) fail(ptr + "/margin", "must be positive");
  return e;
}

NamedFunction function_from_json(const json& j, const std::string& ptr) {
  allow_keys(j, ptr, {"id", "poles", "terms", "inf"});
  NamedFunction nf;
  nf.id = string_at(j, ptr, "id");
  if (nf.id.empty()) fail(ptr + "/id", "a non-empty id is required");
  try {
    nf.f = rational_from_json(j);
  } catch (const Error& e) {
    const std::string what = e.what();
    throw Error(ErrorKind::Config, ptr + (what.starts_with("/") ? "" : ": ") + what);
  }
  return nf;
}

}  // namespace

CampaignConfig config_from_json(const json& j) {
  try {
    allow_keys(j, "", {"domains", "ensembles", "functions", "tolerances", "n_angles",
                       "lemma1_samples", "damping_eps", "seed", "regularization", "outputs"});
    CampaignConfig c = default_config();

    if (j.contains("domains")) {
      const json& arr = j.at("domains");
      if (!arr.is_array()) fail("/domains", "expected an array");
      c.domains.clear();
      for (std::size_t i = 0; i < arr.size(); ++i)
        c.domains.push_back(domain_from_json(arr[i], "/domains/" + std::to_string(i)));
    }
    if (j.contains("ensembles")) {
      const json& arr = j.at("ensembles");
      if (!arr.is_array()) fail("/ensembles", "expected an array");
      c.ensembles.clear();
      for (std::size_t i = 0; i < arr.size(); ++i)
        c.ensembles.push_back(ensemble_from_json(arr[i], "/ensembles/" + std::to_string(i)));
    }
    if (j.contains("functions")) {
      const json& arr = j.at("functions");
      if (!arr.is_array()) fail("/functions", "expected an array");
      c.functions.clear();
      std::set<std::string> ids;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string ptr = "/functions/" + std::to_string(i);
        c.functions.push_back(function_from_json(arr[i], ptr));
        if (!ids.insert(c.functions.back().id).second) fail(ptr + "/id", "duplicate function id");
      }
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      allow_keys(t, "/tolerances", {"quad", "bound_slack_factor"});
      c.quad_tol = number_at(t, "/tolerances", "quad", c.quad_tol);
      c.slack_factor = number_at(t, "/tolerances", "bound_slack_factor", c.slack_factor);
      if (!(c.quad_tol >= 1e-12 && c.quad_tol <= 1e-2))
        fail("/tolerances/quad", "must lie in [1e-12, 1e-2]");
      if (!(c.slack_factor > 0)) fail("/tolerances/bound_slack_factor", "must be positive");
    }
    const long long n_angles = integer_at(j, "", "n_angles", c.n_angles);
    if (n_angles < 16 || n_angles > 65536) fail("/n_angles", "must lie in [16, 65536]");
    c.n_angles = static_cast<int>(n_angles);
    const long long samples = integer_at(j, "", "lemma1_samples", c.lemma1_samples);
    if (samples < 2 || samples > 100000) fail("/lemma1_samples", "must be >= 2");
    c.lemma1_samples = static_cast<int>(samples);
    c.damping_eps = number_at(j, "", "damping_eps", c.damping_eps);
    if (!(c.damping_eps > 0)) fail("/damping_eps", "must be positive");
    if (j.contains("seed")) {
      const json& s = j.at("seed");
      if (!s.is_number_unsigned()) fail("/seed", "expected a non-negative integer");
      c.seed = s.get<std::uint64_t>();
    }
    if (j.contains("regularization")) {
      if (!j.at("regularization").is_boolean()) fail("/regularization", "expected a boolean");
      c.regularization = j.at("regularization").get<bool>();
    }
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      allow_keys(o, "/outputs", {"csv", "json", "svg"});
      c.outputs.csv_path = string_at(o, "/outputs", "csv");
      c.outputs.json_path = string_at(o, "/outputs", "json");
      c.outputs.svg_path = string_at(o, "/outputs", "svg");
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("/: ") + e.what());
  }
}

CampaignConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const CampaignConfig& c) {
  json domains = json::array();
  for (const DomainSpec& d : c.domains) {
    json o = {{"kind", d.kind}};
    if (d.kind == "hyperbola") o["a"] = d.a, o["b"] = d.b;
    if (d.kind == "parabola") o["p"] = d.p;
    if (d.kind == "sector-approx") o["alpha"] = d.alpha, o["a"] = d.a;
    domains.push_back(o);
  }
  json ensembles = json::array();
  for (const EnsembleSpec& e : c.ensembles)
    ensembles.push_back({{"kind", to_string(e.kind)}, {"n", e.n}, {"count", e.count}, {"margin", e.margin}});
  json functions = json::array();
  for (const NamedFunction& nf : c.functions) {
    json o = to_json(nf.f);
    o["id"] = nf.id;
    functions.push_back(o);
  }
  json outputs = json::object();
  if (!c.outputs.csv_path.empty()) outputs["csv"] = c.outputs.csv_path;
  if (!c.outputs.json_path.empty()) outputs["json"] = c.outputs.json_path;
  if (!c.outputs.svg_path.empty()) outputs["svg"] = c.outputs.svg_path;
  return {{"domains", domains},
          {"ensembles", ensembles},
          {"functions", functions},
          {"tolerances", {{"quad", c.quad_tol}, {"bound_slack_factor", c.slack_factor}}},
          {"n_angles", c.n_angles},
          {"lemma1_samples", c.lemma1_samples},
          {"damping_eps", c.damping_eps},
          {"seed", c.seed},
          {"regularization", c.regularization},
          {"outputs", outputs}};
}

std::string serialize_config(const CampaignConfig& config) { return config_to_json(config).dump(2) + "\n"; }

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorKind::Numerical, "number formatting failed");
  return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json aggregate_json(const Aggregate& a) {
  return {{"trials", a.trials},
          {"violations", a.violations},
          {"failures", a.failures},
          {"max_ratio", a.max_ratio},
          {"max_ratio_over_k", a.max_ratio_over_k},
          {"min_margin_lemma1", a.min_margin_lemma1},
          {"min_margin_lemma2", a.min_margin_lemma2},
          {"max_schwenninger_residual", a.max_schwenninger_residual},
          {"max_adjoint_residual", a.max_adjoint_residual},
          {"max_quad_error", a.max_quad_error}};
}

}  // namespace

std::string report_csv(const CampaignReport& report) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const BoundReport& br : report.domains)
    for (const TrialRecord& r : br.trials) {
      const double fields[] = {r.sup_norm_f,          r.norm_fa,          r.ratio,
                               br.k_alpha,            r.ratio / br.k_alpha, r.lemma1_margin,
                               r.lemma2_margin,       r.schwenninger_residual,
                               r.adjoint_residual,    r.quad_error};
      out += std::to_string(r.trial_id) + ',' + std::to_string(r.seed) + ',' +
             to_string(br.domain.kind()) + ',' + format_number(br.alpha) + ',' +
             std::to_string(r.n) + ',' + to_string(r.ensemble) + ',' + csv_field(r.function_id);
      for (double v : fields) out += ',' + format_number(v);
      out += '\n';
    }
  return out;
}

json domain_to_json(const ConvexDomain& d) {
  json o = {{"kind", to_string(d.kind())}, {"alpha", d.alpha()}};
  if (d.kind() == DomainKind::Hyperbola) o["a"] = d.a(), o["b"] = d.b();
  if (d.kind() == DomainKind::Parabola) o["p"] = d.p();
  return o;
}

json report_json(const CampaignReport& report, const CampaignConfig& config) {
  json reports = json::array();
  for (const BoundReport& br : report.domains) {
    json trials = json::array();
    for (const TrialRecord& r : br.trials) {
      json t = {{"trial_id", r.trial_id},
                {"seed", r.seed},
                {"n", r.n},
                {"ensemble", to_string(r.ensemble)},
                {"function_id", r.function_id},
                {"sup_norm_f", r.sup_norm_f},
                {"norm_fA", r.norm_fa},
                {"ratio", r.ratio},
                {"ratio_over_k", r.ratio / br.k_alpha},
                {"lemma1_margin", r.lemma1_margin},
                {"lemma2_margin", r.lemma2_margin},
                {"schwenninger_residual", r.schwenninger_residual},
                {"adjoint_residual", r.adjoint_residual},
                {"quad_error", r.quad_error},
                {"failed", r.failed}};
      if (r.failed) t["error"] = r.error;
      trials.push_back(std::move(t));
    }
    reports.push_back({{"domain", domain_to_json(br.domain)},
                       {"alpha", br.alpha},
                       {"k_alpha", br.k_alpha},
                       {"aggregate", aggregate_json(br.aggregate)},
                       {"trials", std::move(trials)}});
  }
  json reg = json::array();
  for (const RegularizationSummary& s : report.regularization)
    reg.push_back({{"matrix", s.matrix_id},
                   {"slope", s.slope},
                   {"apriori_ok", s.apriori_ok},
                   {"max_identity_residual", s.max_identity_residual}});
  return {{"config", config_to_json(config)},
          {"declared_tolerance", report.declared_tolerance},
          {"exit_code", exit_code(report)},
          {"overall", aggregate_json(report.overall)},
          {"regularization", std::move(reg)},
          {"reports", std::move(reports)}};
}

namespace {

struct View {
  double x0, x1, y0, y1;
  static constexpr double kSize = 600.0;

  double px(Complex z) const { return (z.real() - x0) / (x1 - x0) * kSize; }
  double py(Complex z) const { return (y1 - z.imag()) / (y1 - y0) * kSize; }
  bool visible(Complex z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

std::string point(const View& v, Complex z) {
  return format_number(std::round(v.px(z) * 100) / 100) + "," +
         format_number(std::round(v.py(z) * 100) / 100);
}

double param_reach(const ConvexDomain& d, double half_height) {
  return d.kind() == DomainKind::Hyperbola ? std::asinh(2 * half_height / d.b()) : 2 * half_height;
}

}  // namespace

std::string report_svg(const CampaignReport& report, const CampaignConfig& config) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"720\" "
         "viewBox=\"0 0 600 720\">\n<rect width=\"600\" height=\"720\" fill=\"white\"/>\n";
  if (report.domains.empty() && config.domains.empty()) {
    svg << "<text x=\"20\" y=\"40\">no domains</text>\n</svg>\n";
    return svg.str();
  }

  const TrialRecord* worst = nullptr;
  const BoundReport* worst_domain = report.domains.empty() ? nullptr : &report.domains.front();
  for (const BoundReport& br : report.domains)
    for (const TrialRecord& r : br.trials) {
      if (r.failed) continue;
      if (!worst || r.ratio / br.k_alpha > worst->ratio / worst_domain->k_alpha) {
        worst = &r;
        worst_domain = &br;
      }
    }
  const ConvexDomain domain = worst_domain ? worst_domain->domain : config.domains.front().build();

  std::vector<Complex> polygon;
  std::vector<BoundaryPoint> nodes;
  if (worst) {
    const MatrixOperator a = random_matrix_in_domain(domain, worst->n, worst->ensemble_margin,
                                                     worst->seed, worst->ensemble, config.n_angles);
    polygon = numrange_boundary(a, 128);
    for (const NamedFunction& nf : config.functions)
      if (nf.id == worst->function_id) {
        const RationalFunction h = lemma_normalized(nf.f, domain, config.damping_eps);
        nodes = build_matrix_quadrature(domain, matrix_focus(a), h, config.quad_tol).nodes;
      }
  }

  double xmax = std::max(4.0, domain.boundary_point(0).sigma.real() + 3.0);
  double ymax = 3.0;
  for (const Complex& z : polygon) {
    xmax = std::max(xmax, z.real() + 2.0);
    ymax = std::max(ymax, std::abs(z.imag()) + 2.0);
  }
  const double half = std::max(ymax, 0.5 * (xmax + 1.0));
  const View view{-1.0, 2 * half - 1.0, -half, half};

  svg << "<g fill=\"none\" stroke-width=\"1.5\">\n";
  svg << "<polyline stroke=\"#999\" points=\"" << point(view, Complex(view.x0, 0)) << ' '
      << point(view, Complex(view.x1, 0)) << "\"/>\n";
  const double reach = param_reach(domain, half);
  svg << "<polyline stroke=\"black\" points=\"";
  for (int i = 0; i <= 400; ++i) {
    const Complex s = domain.boundary_point(-reach + 2 * reach * i / 400).sigma;
    svg << point(view, s) << ' ';
  }
  svg << "\"/>\n";
  if (!polygon.empty()) {
    svg << "<polygon stroke=\"#c03\" fill=\"#c031\" points=\"";
    for (const Complex& z : polygon) svg << point(view, z) << ' ';
    svg << "\"/>\n";
  }
  svg << "</g>\n<g fill=\"#06c\">\n";
  for (const BoundaryPoint& bp : nodes)
    if (view.visible(bp.sigma))
      svg << "<circle cx=\"" << format_number(std::round(view.px(bp.sigma) * 100) / 100) << "\" cy=\""
          << format_number(std::round(view.py(bp.sigma) * 100) / 100) << "\" r=\"1.5\"/>\n";
  svg << "</g>\n";

  // Node density over asinh(t), which keeps the far tails on one strip.
  if (!nodes.empty()) {
    constexpr int kBins = 60;
    const double umax = std::asinh(nodes.back().param) + 1e-9;
    std::vector<int> counts(kBins, 0);
    for (const BoundaryPoint& bp : nodes) {
      const int b = static_cast<int>((std::asinh(bp.param) + umax) / (2 * umax) * kBins);
      ++counts[std::clamp(b, 0, kBins - 1)];
    }
    const int peak = *std::max_element(counts.begin(), counts.end());
    svg << "<g fill=\"#06c\">\n";
    for (int b = 0; b < kBins; ++b) {
      const double h = 90.0 * counts[b] / peak;
      svg << "<rect x=\"" << b * 10 << "\" y=\"" << format_number(710.0 - h) << "\" width=\"9\" height=\""
          << format_number(h) << "\"/>\n";
    }
    svg << "</g>\n";
  }
  svg << "<text x=\"10\" y=\"20\" font-size=\"13\">" << domain.describe();
  if (worst)
    svg << " worst trial " << worst->trial_id << " ratio/K " << format_number(worst->ratio / worst_domain->k_alpha)
        << " nodes " << nodes.size();
  svg << "</text>\n</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

void check_outputs_writable(const OutputSpec& outputs) {
  for (const std::string* p : {&outputs.csv_path, &outputs.json_path, &outputs.svg_path}) {
    if (p->empty()) continue;
    std::ofstream probe(*p, std::ios::binary | std::ios::app);
    if (!probe) throw Error(ErrorKind::Io, "output path '" + *p + "' is not writable");
  }
}

void emit_report(const CampaignReport& report, const CampaignConfig& config) {
  const OutputSpec& o = config.outputs;
  if (!o.csv_path.empty()) write_text_file(o.csv_path, report_csv(report));
  if (!o.json_path.empty()) write_text_file(o.json_path, report_json(report, config).dump(2) + "\n");
  if (!o.svg_path.empty()) write_text_file(o.svg_path, report_svg(report, config));
}

ConvexDomain sweep_domain(double alpha) {
  if (!(alpha >= 0 && alpha <= kPi / 2)) throw Error(ErrorKind::InvalidArgument, "alpha outside [0, pi/2]");
  if (alpha == 0.0) return ConvexDomain::parabola(1.0);
  if (alpha == kPi / 2) return ConvexDomain::half_plane();
  return ConvexDomain::hyperbola(1.0, std::tan(alpha));
}

std::vector<SweepRow> sweep_alpha(const CampaignConfig& base, int points, int count,
                                  std::size_t threads) {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "sweep needs at least two points");
  CampaignDesign design = base.design();
  design.regularization = false;
  if (count > 0)
    for (EnsembleSpec& e : design.ensembles) e.count = count;
  std::vector<SweepRow> rows;
  for (int i = 0; i < points; ++i) {
    const double alpha = i == points - 1 ? kPi / 2 : kPi / 2 * i / (points - 1);
    design.domains = {sweep_domain(alpha)};
    const CampaignReport rep = run_campaign(design, threads);
    SweepRow row;
    row.alpha = design.domains[0].alpha();
    row.k_alpha = k_of_alpha(row.alpha);
    row.max_ratio = rep.overall.max_ratio;
    row.max_ratio_over_k = rep.overall.max_ratio_over_k;
    row.trials = rep.overall.trials;
    row.violations = rep.overall.violations;
    row.failures = rep.overall.failures;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spectral_lab
