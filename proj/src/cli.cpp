#include "neumax/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "neumax/bounds.hpp"
#include "neumax/caps.hpp"
#include "neumax/directions.hpp"
#include "neumax/errors.hpp"
#include "neumax/fem.hpp"
#include "neumax/measures.hpp"
#include "neumax/moebius.hpp"
#include "neumax/specfun.hpp"

namespace neumax::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;
constexpr double kFemTolerance = 0.02;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, path + ": " + e.what());
  }
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json inequality(const std::string& tag, double value, double bound, double slack) {
  return {{"tag", tag}, {"value", value}, {"bound", bound}, {"slack", slack},
          {"holds", value <= bound * (1.0 + slack)}};
}

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, path + ":" + std::to_string(number) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

struct Context {
  RunConfig config;
  std::ostream& out;
  std::ostream& err;

  void emit(nlohmann::json doc) const {
    doc["schema"] = 1;
    doc["config"] = config.to_json();
    write(doc.dump(2) + "\n");
  }

  void write(const std::string& text) const {
    if (config.output.empty()) {
      out << text;
      return;
    }
    std::ofstream file(config.output);
    if (!file) throw Error(ErrorKind::Io, "cannot write " + config.output);
    file << text;
  }

  RenormOptions renorm() const {
    RenormOptions o;
    o.tol = config.tol;
    o.seed = config.seed;
    return o;
  }
};

int cmd_constants(const Context& ctx, std::optional<int> n) {
  const double zeta = specfun::find_zeta();
  nlohmann::json doc{{"zeta", zeta},
                     {"mu1_disk", specfun::mu1_disk()},
                     {"radial_l2_integral", specfun::radial_l2_integral()},
                     {"bounds",
                      {{{"tag", "szego"}, {"value", specfun::szego_bound()}},
                       {{"tag", "thm1.1"}, {"value", specfun::planar_bound()}},
                       {{"tag", "polya-k2"}, {"value", 8.0 * std::numbers::pi}}}}};
  int code = kExitOk;
  if (n) {
    const auto c = specfun::bound_constants(*n);
    const bool in_interval = c.ratio > 1.0 && c.ratio < 1.04;
    doc["sphere"] = {{"n", c.n},
                     {"k_n", specfun::k_n(c.n)},
                     {"theorem_constant", c.theorem_constant},
                     {"conjecture_constant", c.conjecture_constant},
                     {"ratio", c.ratio},
                     {"ratio_in_interval", in_interval},
                     {"tag", "thm1.2"},
                     {"even_dimension_warning", c.even_dimension_warning}};
    if (!in_interval) code = kExitViolation;
  }
  ctx.emit(doc);
  return code;
}

int cmd_renormalize(const Context& ctx, const std::string& path) {
  const DiscreteMeasure m = measure_from_json(read_json(path));
  const RenormResult r = renormalize(m, ctx.renorm());
  nlohmann::json xi = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.xi.xi.size(); ++i) xi.push_back(r.xi.xi(i));
  ctx.emit({{"xi", xi}, {"residual", r.residual}, {"iterations", r.iterations}});
  return kExitOk;
}

int cmd_rearrange(const Context& ctx, const std::string& path, double r, double angle) {
  const DiscreteMeasure m = measure_from_json(read_json(path));
  if (!m.space().is_disk()) throw Error(ErrorKind::SpaceMismatch, "rearrange expects a disk measure");
  const Cap a = Cap::disk(r, angle);
  const Rearrangement re = rearrange(m, a, ctx.renorm());
  const auto& t = re.trace;
  nlohmann::json trace{{"xi_a", complex_json(t.xi_a)},
                       {"b", {{"r", t.b.r}, {"angle", std::arg(t.b.p_complex())}}},
                       {"eta_a", complex_json(t.eta_a)},
                       {"zeta_a_predicted", complex_json(t.zeta_a_predicted)},
                       {"eta_flipflop", complex_json(t.eta_flipflop)},
                       {"q_norm", t.q_norm},
                       {"residual", t.residual}};
  const DirectionForm form = direction_form(re.nu);
  ctx.emit({{"cap", {{"r", r}, {"angle", angle}}},
            {"gap", form.gap()},
            {"trace", trace},
            {"nu", measure_to_json(re.nu)}});
  return kExitOk;
}

int cmd_scan(const Context& ctx, const std::string& path) {
  const ConformalDomain domain = domain_from_json(read_json(path));
  const DiscreteMeasure mu = pullback_measure(domain, ctx.config.n_r, ctx.config.n_theta);
  const Canonical canon = canonicalize(mu, ctx.renorm());
  CertificateOptions defaults;
  std::vector<double> r_grid = defaults.r_grid;
  if (r_grid.empty()) {
    for (int i = 0; i < 9; ++i) r_grid.push_back(-0.8 + 0.2 * i);
  }
  std::vector<double> theta_grid;
  for (int j = 0; j < defaults.n_theta_scan; ++j) theta_grid.push_back(2.0 * std::numbers::pi * j / defaults.n_theta_scan);
  const CapScanResult scan = scan_caps(canon.measure, r_grid, theta_grid, ctx.config.eps, ctx.renorm());

  if (ctx.config.format == "csv") {
    std::ostringstream csv;
    csv.precision(12);
    csv << "r,theta,s_x,s_y,gap\n";
    for (const auto& f : scan.field) {
      csv << f.r << ',' << f.theta << ',' << f.direction(0) << ',' << f.direction(1) << ',' << f.gap << '\n';
    }
    csv << "# winding r,half_turns\n";
    for (const auto& [r, w] : scan.winding_numbers) csv << "# " << r << ',' << w << '\n';
    csv << "# cap r=" << scan.cap.r << " angle=" << std::arg(scan.cap.p_complex()) << " gap=" << scan.gap << '\n';
    ctx.write(csv.str());
  } else {
    nlohmann::json field = nlohmann::json::array();
    for (const auto& f : scan.field) {
      field.push_back({{"r", f.r}, {"theta", f.theta}, {"s", {f.direction(0), f.direction(1)}}, {"gap", f.gap}});
    }
    nlohmann::json winding = nlohmann::json::array();
    for (const auto& [r, w] : scan.winding_numbers) winding.push_back({{"r", r}, {"half_turns", w}});
    ctx.emit({{"cap", {{"r", scan.cap.r}, {"angle", std::arg(scan.cap.p_complex())}}},
              {"gap", scan.gap},
              {"refinements", scan.refinements},
              {"winding", winding},
              {"field", field}});
  }
  return kExitOk;
}

int cmd_certify(const Context& ctx, const std::string& path) {
  const nlohmann::json doc = read_json(path);
  const ConformalDomain domain = domain_from_json(doc);
  CertificateOptions options;
  options.n_r = ctx.config.n_r;
  options.n_theta = ctx.config.n_theta;
  options.multiplicity_eps = ctx.config.eps;
  options.renorm = ctx.renorm();
  const BoundReport report = planar_bound_certificate(domain, doc.value("id", path), options);
  nlohmann::json out = report_to_json(report);
  out["inequalities"] = nlohmann::json::array(
      {inequality(out["inequality"].get<std::string>(), report.quotient_sup, report.bound, kCertificateSlack)});
  ctx.emit(out);
  if (!report.holds) {
    ctx.err << "bound violated: quotient_sup " << report.quotient_sup << " > " << report.bound << '\n';
    return kExitViolation;
  }
  return kExitOk;
}

fem::DomainSpec resolve_spec(const std::string& spec) {
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return fem::spec_from_json(read_json(spec));
  return fem::spec_from_name(spec);
}

int cmd_fem(const Context& ctx, const std::string& spec_text, int k) {
  const fem::DomainSpec spec = resolve_spec(spec_text);
  const double h = spec.h.value_or(ctx.config.h);
  const fem::Mesh mesh = fem::build_mesh(spec, h);
  const fem::SpectralResult result = fem::neumann_eigs(mesh, std::max(k, 2));
  const auto products = result.products();
  nlohmann::json ineqs = nlohmann::json::array({inequality("szego", products[1], specfun::szego_bound(), kFemTolerance),
                                                inequality("thm1.1", products[2], specfun::planar_bound(), kFemTolerance),
                                                inequality("polya-k2", products[2], 8.0 * std::numbers::pi, kFemTolerance)});
  bool holds = true;
  for (const auto& q : ineqs) holds = holds && q["holds"].get<bool>();
  if (ctx.config.format == "csv") {
    std::ostringstream csv;
    fem::spectral_to_csv(csv, result);
    ctx.write(csv.str());
  } else {
    nlohmann::json doc = fem::spectral_to_json(result);
    doc["domain"] = fem::spec_to_json(spec);
    doc["exact_area"] = fem::exact_area(spec);
    doc["vertices"] = mesh.vertices.size();
    doc["inequalities"] = ineqs;
    ctx.emit(doc);
  }
  return holds ? kExitOk : kExitViolation;
}

int cmd_corpus(const Context& ctx, const std::string& path) {
  std::vector<fem::DomainSpec> specs;
  if (path == "standard") {
    specs = fem::standard_corpus(ctx.config.seed);
  } else {
    nlohmann::json doc = read_json(path);
    if (doc.is_object() && doc.contains("domains")) doc = doc["domains"];
    if (!doc.is_array()) throw Error(ErrorKind::InvalidSpec, "corpus file must hold an array of specs");
    for (const auto& item : doc) specs.push_back(fem::spec_from_json(item));
  }
  const fem::CorpusReport report = fem::verify_corpus(specs, ctx.config.h, kFemTolerance);
  ctx.emit(fem::corpus_to_json(report));
  bool violation = false;
  bool failure = false;
  for (const auto& e : report.entries) {
    if (!e.error.empty()) {
      failure = true;
      ctx.err << e.spec.id << ": " << e.error << '\n';
    } else if (!(e.szego_ok && e.thm_ok)) {
      violation = true;
    }
  }
  if (violation) return kExitViolation;
  return failure ? kExitUsage : kExitOk;
}

int cmd_sphere(const Context& ctx, int n, int resolution) {
  if (n % 2 == 0) throw Error(ErrorKind::EvenDimension, "the sphere pipeline needs odd n");
  const auto constants = specfun::bound_constants(n);
  nlohmann::json cases = nlohmann::json::array();
  bool holds = true;
  const std::vector<std::pair<std::string, std::function<double(const Eigen::VectorXd&)>>> densities{
      {"uniform", [](const Eigen::VectorXd&) { return 1.0; }},
      {"perturbed", [](const Eigen::VectorXd& x) { return 1.0 + 0.4 * x(0) + 0.2 * x(1) * x(1); }}};
  for (const auto& [name, rho] : densities) {
    const DiscreteMeasure g = sphere_quadrature(n, resolution, rho);
    const DiscreteMeasure unit = g.scaled(1.0 / g.total_mass());
    const SphereCapScanResult scan = sphere_scan_caps(unit, ctx.config.eps, ctx.renorm());
    const Eigen::VectorXd s = direction_form(scan.nu).max_direction;
    const SphereQuotient q = sphere_modified_quotient(unit, scan.cap, s, resolution, ctx.renorm());
    holds = holds && q.holds;
    nlohmann::json p = nlohmann::json::array();
    for (Eigen::Index i = 0; i < scan.cap.p.size(); ++i) p.push_back(scan.cap.p(i));
    cases.push_back({{"measure", name},
                     {"cap", {{"r", scan.cap.r}, {"p", p}}},
                     {"gap", scan.gap},
                     {"numerator", q.numerator},
                     {"denominator", q.denominator},
                     {"quotient", q.quotient},
                     {"inequality", inequality("thm1.2", q.quotient, q.bound, 0.0)}});
  }
  const DiscreteMeasure starts = sphere_quadrature(n, 6, [](const Eigen::VectorXd&) { return 1.0; });
  std::vector<Eigen::VectorXd> grid;
  for (Eigen::Index i = 0; i < starts.size(); ++i) grid.push_back(starts.points().col(i));
  const DegreeResult degree = sphere_degree_check(n, grid, ctx.config.seed);
  ctx.emit({{"n", n},
            {"theorem_constant", constants.theorem_constant},
            {"conjecture_constant", constants.conjecture_constant},
            {"degree", {{"psi", degree.deg_psi}, {"phi", degree.deg_phi}}},
            {"cases", cases}});
  return holds ? kExitOk : kExitViolation;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {{"command", command}, {"n_r", n_r}, {"n_theta", n_theta}, {"h", h}, {"eps", eps},
          {"tol", tol},         {"seed", seed}, {"output", output},   {"format", format}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical verification of Neumann eigenvalue bounds", "neumax"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  RunConfig cfg;
  std::string config_path;
  std::map<std::string, CLI::Option*> flags;
  app.add_option("--config", config_path, "key=value file merged under the flags");
  flags["n_r"] = app.add_option("--n-r", cfg.n_r, "radial resolution");
  flags["n_theta"] = app.add_option("--n-theta", cfg.n_theta, "angular resolution");
  flags["h"] = app.add_option("--h", cfg.h, "mesh size");
  flags["eps"] = app.add_option("--eps", cfg.eps, "multiplicity threshold");
  flags["tol"] = app.add_option("--tol", cfg.tol, "renormalization tolerance");
  flags["seed"] = app.add_option("--seed", cfg.seed, "random seed");
  flags["output"] = app.add_option("-o,--output", cfg.output, "output path");
  flags["format"] = app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::optional<int> n_constants;
  auto* constants = app.add_subcommand("constants", "special constants and sphere bound constants");
  constants->add_option("--n", n_constants, "sphere dimension");

  std::string path;
  auto* renorm = app.add_subcommand("renormalize", "renormalizer of a measure");
  renorm->add_option("measure", path, "measure JSON")->required();

  double cap_r = 0.0, cap_angle = 0.0;
  auto* rearr = app.add_subcommand("rearrange", "rearranged measure for a cap");
  rearr->add_option("measure", path, "measure JSON")->required();
  rearr->add_option("--r", cap_r, "cap parameter in (-1, 1)")->required();
  rearr->add_option("--angle", cap_angle, "cap direction angle")->required();

  auto* scan = app.add_subcommand("scan", "direction field of rearranged measures");
  scan->add_option("domain", path, "domain JSON")->required();

  auto* certify = app.add_subcommand("certify", "planar bound certificate");
  certify->add_option("domain", path, "domain JSON")->required();

  int k = 3;
  auto* fem_cmd = app.add_subcommand("fem", "finite element Neumann eigenvalues");
  fem_cmd->add_option("spec", path, "disk, square, rectangle, ellipse, two_disks_neck or a spec JSON")->required();
  fem_cmd->add_option("--k", k, "highest eigenvalue index");

  auto* corpus = app.add_subcommand("corpus", "finite element corpus sweep");
  corpus->add_option("specs", path, "JSON list of specs, or 'standard'")->required();

  int sphere_n = 3, resolution = 12;
  auto* sphere = app.add_subcommand("sphere", "sphere pipeline");
  sphere->add_option("--n", sphere_n, "odd sphere dimension")->required();
  sphere->add_option("--resolution", resolution, "quadrature resolution");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      for (const auto& [key, value] : read_config_file(config_path)) {
        auto it = flags.find(key);
        if (it == flags.end()) throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
        if (it->second->count() > 0) continue;  // flags win
        std::istringstream in(value);
        bool ok = true;
        if (key == "n_r") ok = static_cast<bool>(in >> cfg.n_r);
        else if (key == "n_theta") ok = static_cast<bool>(in >> cfg.n_theta);
        else if (key == "h") ok = static_cast<bool>(in >> cfg.h);
        else if (key == "eps") ok = static_cast<bool>(in >> cfg.eps);
        else if (key == "tol") ok = static_cast<bool>(in >> cfg.tol);
        else if (key == "seed") ok = static_cast<bool>(in >> cfg.seed);
        else if (key == "output") cfg.output = value;
        else if (key == "format") cfg.format = value;
        if (!ok) throw Error(ErrorKind::InvalidArgument, "bad value for " + key + ": " + value);
      }
      if (cfg.format != "json" && cfg.format != "csv") throw Error(ErrorKind::InvalidArgument, "format must be json or csv");
    }
    Context ctx{cfg, out, err};
    ctx.config.command = app.get_subcommands().front()->get_name();
    const std::string& cmd = ctx.config.command;
    if (cmd == "constants") return cmd_constants(ctx, n_constants);
    if (cmd == "renormalize") return cmd_renormalize(ctx, path);
    if (cmd == "rearrange") return cmd_rearrange(ctx, path, cap_r, cap_angle);
    if (cmd == "scan") return cmd_scan(ctx, path);
    if (cmd == "certify") return cmd_certify(ctx, path);
    if (cmd == "fem") return cmd_fem(ctx, path, k);
    if (cmd == "corpus") return cmd_corpus(ctx, path);
    if (cmd == "sphere") return cmd_sphere(ctx, sphere_n, resolution);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace neumax::cli
