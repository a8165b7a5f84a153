#include "gapbound/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "gapbound/error.hpp"
#include "gapbound/logsob.hpp"
#include "gapbound/matbound.hpp"
#include "gapbound/onedim.hpp"
#include "gapbound/oracle.hpp"
#include "gapbound/spin.hpp"
#include "gapbound/verify.hpp"

namespace gapbound {

namespace {

struct Unwritable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s, const char* what) {
  std::string t = trim(s);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw Error(ErrorKind::InvalidArgument, std::string(what) + ": not a finite number: '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": empty list");
  return out;
}

// lo:hi:step, both ends included when hi - lo is a multiple of step.
std::vector<double> parse_range(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) v.push_back(parse_number(item, what));
  if (v.size() != 3) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": expected lo:hi:step");
  double lo = v[0], hi = v[1], step = v[2];
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": step must be positive");
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": empty range");
  double span = (hi - lo) / step;
  if (span > 1e7) throw Error(ErrorKind::TooLarge, std::string(what) + ": too many grid points");
  auto n = static_cast<long>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(static_cast<size_t>(n));
  for (long k = 0; k < n; ++k) grid[static_cast<size_t>(k)] = lo + static_cast<double>(k) * step;
  if (std::abs(grid.back() - hi) < 1e-9 * step) grid.back() = hi;
  if (grid.size() < 2) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": need at least two points");
  return grid;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Unwritable("cannot open '" + path + "' for writing");
  body(f);
  f.flush();
  if (!f) throw Unwritable("write to '" + path + "' failed");
}

void print_report(std::ostream& out, const BoundReport& r) {
  out << std::left << std::setw(20) << r.method << std::setw(7) << to_string(r.direction) << g6(r.value)
      << (r.certified ? "" : "  (numeric)") << "\n";
  for (const auto& [k, v] : r.diagnostics) out << "  " << std::setw(24) << k << g6(v) << "\n";
  for (const auto& n : r.notes) out << "  note: " << n << "\n";
}

void report_rows(std::ostream& os, const BoundReport& r) {
  os << r.method << "," << to_string(r.direction) << "," << g17(r.value) << "\n";
  for (const auto& [k, v] : r.diagnostics) os << r.method << "," << k << "," << g17(v) << "\n";
}

// --quadratic alpha,beta | --quartic beta1,beta2
struct PotentialFlags {
  std::string quadratic, quartic;

  void add(CLI::App* app) {
    auto* a = app->add_option("--quadratic", quadratic, "u = alpha x^2 + beta x, given as alpha,beta");
    auto* b = app->add_option("--quartic", quartic, "u = x^4 - beta1 x^2 + beta2 x, given as beta1,beta2");
    a->excludes(b);
  }

  Potential1D build() const {
    if (quadratic.empty() == quartic.empty())
      throw Error(ErrorKind::InvalidArgument, "give exactly one of --quadratic, --quartic");
    const std::string& s = quadratic.empty() ? quartic : quadratic;
    auto v = parse_list(s, quadratic.empty() ? "--quartic" : "--quadratic");
    if (v.size() != 2) throw Error(ErrorKind::InvalidArgument, "potential takes two comma-separated values");
    return quadratic.empty() ? Potential1D::quartic(v[0], v[1]) : Potential1D::quadratic(v[0], v[1]);
  }
};

struct LatticeFlags {
  int d = 1;
  int L = 2;
  double J = 0.0;
  std::string site = "gaussian";
  double site_param = 1.0;
  std::string hamiltonian = "quadratic";
  std::string boundary = "external";
  double omega = 0.0;

  void add(CLI::App* app) {
    app->add_option("--d", d, "lattice dimension")->check(CLI::PositiveNumber);
    app->add_option("--L", L, "box side")->check(CLI::PositiveNumber);
    app->add_option("--J", J, "coupling strength")->check(CLI::NonNegativeNumber);
    app->add_option("--site", site, "single-site potential")->check(CLI::IsMember({"gaussian", "quartic"}));
    app->add_option("--site-param", site_param, "alpha for gaussian, beta for quartic");
    app->add_option("--hamiltonian", hamiltonian, "interaction")->check(CLI::IsMember({"quadratic", "bilinear"}));
    app->add_option("--boundary", boundary, "boundary condition")
        ->check(CLI::IsMember({"external", "periodic", "free"}));
    app->add_option("--omega", omega, "constant external boundary value");
  }

  LatticeModel build() const {
    auto kind = site == "quartic" ? LatticeModel::SiteKind::Quartic : LatticeModel::SiteKind::Gaussian;
    auto ham = hamiltonian == "bilinear" ? LatticeModel::Hamiltonian::Bilinear : LatticeModel::Hamiltonian::Quadratic;
    auto b = boundary == "periodic" ? LatticeModel::Boundary::Periodic
             : boundary == "free"   ? LatticeModel::Boundary::Free
                                    : LatticeModel::Boundary::External;
    LatticeModel m = LatticeModel::cube(d, L, J, kind, site_param, ham, b);
    if (b == LatticeModel::Boundary::External) {
      double w = omega;
      m.omega = [w](const Site&) { return w; };
    }
    m.validate();
    return m;
  }
};

std::string dump_config(const CLI::App& app, const CLI::App* sub) {
  RunConfig rc;
  auto collect = [&](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      if (o->count() == 0 || o->get_lnames().empty()) continue;
      const std::string& name = o->get_lnames().front();
      if (name == "help" || name == "config" || name == "dump-config") continue;
      rc.entries.emplace_back(name, o->get_type_size() == 0 ? std::string("true") : o->as<std::string>());
    }
  };
  collect(app);
  if (sub) {
    rc.command = sub->get_name();
    collect(*sub);
  }
  return rc.serialize();
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonConvergent:
    case ErrorKind::NoSignChange:
    case ErrorKind::NonFinite:
    case ErrorKind::RootNotFound:
    case ErrorKind::DegenerateQ:
    case ErrorKind::EigensolveFailure:
      return 3;
    default:
      return 2;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::vector<std::string> kCommands = {"gap1d", "logsob", "region", "verify", "matrix", "spin", "coupling", "oracle"};

// Splices a run file into the argument list: its command goes first unless
// one is already present, its flags go right after the command so that
// flags on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (!path) return args;
  RunConfig rc = RunConfig::parse(read_text(*path));
  std::vector<std::string> flags;
  for (const auto& [k, v] : rc.entries) flags.push_back("--" + k + "=" + v);

  size_t at = args.size();
  for (size_t i = 1; i < args.size(); ++i) {
    if (std::find(kCommands.begin(), kCommands.end(), args[i]) != kCommands.end()) {
      at = i;
      break;
    }
  }
  if (at == args.size()) {
    if (rc.command.empty()) {
      args.insert(args.end(), flags.begin(), flags.end());
      return args;
    }
    args.insert(args.begin() + 1, rc.command);
    at = 1;
  }
  args.insert(args.begin() + static_cast<long>(at) + 1, flags.begin(), flags.end());
  return args;
}

}  // namespace

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig rc;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    bool ok = !key.empty() && key.front() != '-';
    for (char c : key) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_');
    if (!ok) throw Error(ErrorKind::InvalidArgument, "config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    if (key == "command") {
      rc.command = value;
      continue;
    }
    auto it = std::find_if(rc.entries.begin(), rc.entries.end(), [&](const auto& e) { return e.first == key; });
    if (it != rc.entries.end())
      it->second = value;
    else
      rc.entries.emplace_back(key, value);
  }
  return rc;
}

std::string RunConfig::serialize() const {
  std::string s;
  if (!command.empty()) s += "command = " + command + "\n";
  for (const auto& [k, v] : entries) s += k + " = " + v + "\n";
  return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.empty()) args.emplace_back("gapbound");

  CLI::App app{"Spectral gap and log-Sobolev bounds for diffusions and continuous spin systems"};
  app.name("gapbound");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);

  int threads = 1;
  double rel_tol = 1e-10;
  int max_refinements = 2000;
  bool dump = false;
  std::string config_path;
  app.add_option("--config", config_path, "read flags from a key = value file");
  app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-refinements", max_refinements, "quadrature bisection budget")->check(CLI::PositiveNumber);
  app.add_flag("--dump-config", dump, "print the effective flags as a run file and exit");

  // gap1d
  auto* c_gap = app.add_subcommand("gap1d", "one-dimensional spectral gap bounds");
  PotentialFlags gap_pot;
  std::string gap_method = "both", gap_csv;
  gap_pot.add(c_gap);
  c_gap->add_option("--method", gap_method)->check(CLI::IsMember({"thm41", "thm44", "both"}));
  c_gap->add_option("--csv", gap_csv, "write method,key,value rows");

  // logsob
  auto* c_ls = app.add_subcommand("logsob", "one-dimensional log-Sobolev lower bounds");
  PotentialFlags ls_pot;
  bool ls_prop14 = false;
  ls_pot.add(c_ls);
  c_ls->add_flag("--prop14", ls_prop14, "two-sided estimate of the worst gap over beta2");

  // region
  auto* c_reg = app.add_subcommand("region", "positivity region of the spin system bounds");
  std::string reg_kind = "eq69", reg_beta = "-2:4:0.05", reg_r = "0:2:0.01", reg_csv, reg_svg;
  c_reg->add_option("--kind", reg_kind)->check(CLI::IsMember({"eq69", "eq610", "eq611"}));
  c_reg->add_option("--beta", reg_beta, "lo:hi:step");
  c_reg->add_option("--r", reg_r, "lo:hi:step");
  c_reg->add_option("--csv", reg_csv);
  c_reg->add_option("--svg", reg_svg);

  // verify
  auto* c_ver = app.add_subcommand("verify", "run the acceptance suite");
  std::string ver_suite = "fast";
  std::uint64_t ver_seed = 42;
  c_ver->add_option("--suite", ver_suite)->check(CLI::IsMember({"fast", "full"}));
  c_ver->add_option("--seed", ver_seed);

  // matrix
  auto* c_mat = app.add_subcommand("matrix", "bounds from a JSON file with eta, offdiag and optional sigma");
  std::string mat_spec, mat_weights;
  c_mat->add_option("--spec", mat_spec)->required();
  c_mat->add_option("--weights", mat_weights, "comma-separated positive weights");

  // spin
  auto* c_spin = app.add_subcommand("spin", "lattice spin system bounds");
  LatticeFlags spin_lat;
  spin_lat.add(c_spin);

  // coupling
  auto* c_cpl = app.add_subcommand("coupling", "coupling contraction rate and optional simulation");
  int cpl_size = 1;
  double cpl_beta = 0.0;
  bool cpl_sim = false;
  CouplingSimConfig sim;
  std::string cpl_x0, cpl_y0, cpl_csv;
  c_cpl->add_option("--size", cpl_size, "number of sites")->required()->check(CLI::PositiveNumber);
  c_cpl->add_option("--beta", cpl_beta)->required();
  c_cpl->add_flag("--simulate", cpl_sim);
  c_cpl->add_option("--paths", sim.paths);
  c_cpl->add_option("--step", sim.step);
  c_cpl->add_option("--horizon", sim.horizon);
  c_cpl->add_option("--seed", sim.seed);
  c_cpl->add_option("--J", sim.J);
  c_cpl->add_option("--record-every", sim.record_every);
  c_cpl->add_option("--x0", cpl_x0, "comma-separated start of the first copy");
  c_cpl->add_option("--y0", cpl_y0, "comma-separated start of the second copy");
  c_cpl->add_option("--csv", cpl_csv, "decay series (implies --simulate)");

  // oracle
  auto* c_orc = app.add_subcommand("oracle", "brute-force reference values");
  std::string orc_kind = "gap1d", orc_side = "plus";
  PotentialFlags orc_pot;
  LatticeFlags orc_lat;
  int orc_points = 0;
  std::optional<double> orc_theta, orc_far;
  c_orc->add_option("--kind", orc_kind)->check(CLI::IsMember({"gap1d", "halfline", "nd"}));
  orc_pot.add(c_orc);
  orc_lat.add(c_orc);
  c_orc->add_option("--points", orc_points, "grid points (per axis for nd)")->check(CLI::NonNegativeNumber);
  c_orc->add_option("--side", orc_side)->check(CLI::IsMember({"plus", "minus"}));
  c_orc->add_option("--theta", orc_theta, "Dirichlet point (default: a root of u')");
  c_orc->add_option("--far", orc_far, "far end of the half-line grid");

  try {
    args = expand_config(std::move(args));
    // CLI11 takes the argument vector reversed and without the program name.
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }

  const CLI::App* sub = nullptr;
  for (const auto* s : app.get_subcommands()) sub = s;
  if (dump) {
    out << dump_config(app, sub);
    return 0;
  }

  QuadConfig cfg;
  cfg.rel_tol = rel_tol;
  cfg.max_refinements = max_refinements;

  try {
    cfg.validate();
    if (c_gap->parsed()) {
      Potential1D p = gap_pot.build();
      std::vector<BoundReport> reps;
      out << "potential  " << p.describe() << "\n";
      if (gap_method != "thm44") reps.push_back(gap_lower_thm41(p, cfg));
      if (gap_method != "thm41") {
        Sandwich s = gap_sandwich_thm44(p, cfg);
        reps.push_back(s.lower);
        reps.push_back(s.upper);
      }
      for (const auto& r : reps) print_report(out, r);
      if (gap_method != "thm41") out << "sandwich  [" << g6(reps[reps.size() - 2].value) << ", " << g6(reps.back().value) << "]\n";
      if (!gap_csv.empty())
        write_file(gap_csv, [&](std::ostream& os) {
          os << "method,key,value\n";
          for (const auto& r : reps) report_rows(os, r);
        });
    } else if (c_ls->parsed()) {
      Potential1D p = ls_pot.build();
      out << "potential  " << p.describe() << "\n";
      print_report(out, logsob_lower_lemma51(p, cfg));
      bool quartic = p.kind() == Potential1D::Kind::Quartic;
      if (quartic && p.p2() == 0.0) out << std::left << std::setw(27) << "cases" << g6(logsob_quartic_cases(p.p1())) << "\n";
      if (ls_prop14) {
        if (!quartic) throw Error(ErrorKind::InvalidArgument, "--prop14 needs --quartic");
        Prop14 s = prop14_sandwich(p.p1());
        out << std::left << std::setw(27) << "prop14 upper" << g6(s.upper) << "\n"
            << std::setw(27) << "prop14 lower" << g6(s.lower) << "\n";
      }
    } else if (c_reg->parsed()) {
      auto kind = reg_kind == "eq610" ? RegionScan::Kind::Eq610
                  : reg_kind == "eq611" ? RegionScan::Kind::Eq611
                                        : RegionScan::Kind::Eq69;
      auto rgrid = parse_range(reg_r, "--r");
      RegionScan s = region_scan(kind, parse_range(reg_beta, "--beta"), rgrid, threads);
      RegionScan at0 = region_scan(kind, std::vector<double>{0.0}, rgrid, 1);
      out << "kind  " << reg_kind << "  cells " << s.beta_grid.size() << "x" << s.r_grid.size()
          << "  boundary points " << s.boundary_curve.size() << "\n";
      if (at0.boundary_curve.empty())
        out << "r*(0)  none in r range\n";
      else
        out << "r*(0)  " << g6(at0.boundary_curve.front().second) << "\n";
      if (!reg_csv.empty()) write_file(reg_csv, [&](std::ostream& os) { write_region_csv(s, os); });
      if (!reg_svg.empty()) write_file(reg_svg, [&](std::ostream& os) { write_region_svg(s, os); });
    } else if (c_ver->parsed()) {
      Suite suite = ver_suite == "full" ? Suite::Full : Suite::Fast;
      auto results = run_acceptance(suite, ver_seed, threads, [&](const CriterionResult& r) {
        out << format_result(r) << std::endl;
      });
      int failed = 0, skipped = 0;
      for (const auto& r : results) {
        skipped += r.skipped;
        failed += !r.skipped && !r.pass;
      }
      out << results.size() - static_cast<size_t>(failed + skipped) << " passed, " << failed << " failed, " << skipped
          << " skipped\n";
      return failed ? 1 : 0;
    } else if (c_mat->parsed()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(mat_spec));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("spec file: ") + e.what());
      }
      TildeHessSpec spec;
      std::optional<Eigen::VectorXd> sigma;
      try {
        auto eta = j.at("eta").get<std::vector<double>>();
        auto off = j.at("offdiag").get<std::vector<std::vector<double>>>();
        auto n = static_cast<Eigen::Index>(eta.size());
        spec.eta = Eigen::Map<const Eigen::VectorXd>(eta.data(), n);
        spec.offdiag.resize(n, static_cast<Eigen::Index>(off.size()));
        if (static_cast<Eigen::Index>(off.size()) != n)
          throw Error(ErrorKind::InvalidArgument, "offdiag must have one row per eta entry");
        for (Eigen::Index i = 0; i < n; ++i) {
          if (static_cast<Eigen::Index>(off[static_cast<size_t>(i)].size()) != n)
            throw Error(ErrorKind::InvalidArgument, "offdiag must be square");
          for (Eigen::Index k = 0; k < n; ++k) spec.offdiag(i, k) = off[static_cast<size_t>(i)][static_cast<size_t>(k)];
        }
        if (j.contains("sigma")) {
          auto sg = j.at("sigma").get<std::vector<double>>();
          sigma = Eigen::Map<const Eigen::VectorXd>(sg.data(), static_cast<Eigen::Index>(sg.size()));
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("spec file: ") + e.what());
      }
      spec.validate();
      std::optional<Eigen::VectorXd> w;
      if (!mat_weights.empty()) {
        auto wv = parse_list(mat_weights, "--weights");
        w = Eigen::Map<const Eigen::VectorXd>(wv.data(), static_cast<Eigen::Index>(wv.size()));
        if (w->size() != spec.n()) throw Error(ErrorKind::InvalidArgument, "--weights length differs from eta");
      }
      print_report(out, tilde_hess_bound(spec));
      print_report(out, weighted_bound(spec, w));
      if (spec.n() <= kExhaustiveLimit)
        print_report(out, thm12_bound(spec));
      else
        out << "thm12  skipped: more than " << kExhaustiveLimit << " coordinates\n";
      if (sigma) print_report(out, logsob_matrix_bound(*sigma, spec.offdiag));
    } else if (c_spin->parsed()) {
      LatticeModel m = spin_lat.build();
      out << "sites  " << m.box.size() << "\n";
      out << std::left << std::setw(27) << "marginal_eta" << g6(marginal_eta(m)) << "\n";
      print_report(out, system_bound(m));
      if (m.site == LatticeModel::SiteKind::Quartic && m.hamiltonian == LatticeModel::Hamiltonian::Bilinear &&
          m.site_param >= 0.0)
        print_report(out, refined_bound_remark64(m.site_param, m.d, m.J));
      if (static_cast<int>(m.box.size()) <= kExhaustiveLimit) {
        TildeHessSpec spec = lattice_spec(m);
        print_report(out, tilde_hess_bound(spec));
        print_report(out, thm12_bound(spec));
      }
    } else if (c_cpl->parsed()) {
      CouplingProfile prof(cpl_size, cpl_beta, cfg);
      out << std::left << std::setw(14) << "epsilon" << g6(prof.epsilon()) << "\n"
          << std::setw(14) << "floor" << g6(prof.epsilon_floor()) << "\n"
          << std::setw(14) << "argmin" << g6(prof.argmin()) << "\n"
          << std::setw(14) << "radius" << g6(prof.radius()) << "\n";
      if (cpl_sim || !cpl_csv.empty()) {
        auto n = static_cast<size_t>(cpl_size);
        std::vector<double> x0 = cpl_x0.empty() ? std::vector<double>(n, 1.0) : parse_list(cpl_x0, "--x0");
        std::vector<double> y0 = cpl_y0.empty() ? std::vector<double>(n, -1.0) : parse_list(cpl_y0, "--y0");
        sim.threads = threads;
        DecaySeries s = coupling_sim(prof, x0, y0, sim);
        out << std::setw(14) << "f0" << g6(s.f0) << "\n"
            << std::setw(14) << "mean_f(T)" << g6(s.mean_f.back()) << "  +- " << g6(s.stderr_f.back()) << "\n"
            << std::setw(14) << "envelope(T)" << g6(s.f0 * std::exp(-prof.epsilon() * s.t.back())) << "\n";
        if (!cpl_csv.empty()) write_file(cpl_csv, [&](std::ostream& os) { write_decay_csv(s, os); });
      }
    } else if (c_orc->parsed()) {
      if (orc_kind == "nd") {
        NdOptions opt;
        opt.points = orc_points;
        NdResult r = gap_nd(orc_lat.build(), opt);
        out << std::left << std::setw(14) << "gap" << g6(r.value) << "\n"
            << std::setw(14) << "residual" << g6(r.residual) << "\n"
            << std::setw(14) << "half_width" << g6(r.half_width) << "\n"
            << std::setw(14) << "points" << r.points << "\n";
      } else {
        Potential1D p = orc_pot.build();
        int n = orc_points > 0 ? orc_points : 2001;
        OracleValue v = orc_kind == "halfline"
                            ? dirichlet_gap_halfline(p, orc_theta ? *orc_theta : theta_root(p),
                                                     orc_side == "minus" ? Side::Minus : Side::Plus, orc_far, n, cfg)
                            : gap_1d(p, std::nullopt, n, cfg);
        out << "potential  " << p.describe() << "\n"
            << std::left << std::setw(14) << "gap" << g6(v.value) << "\n"
            << std::setw(14) << "coarse" << g6(v.coarse) << "\n"
            << std::setw(14) << "fine" << g6(v.fine) << "\n";
      }
    }
  } catch (const Unwritable& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace gapbound
