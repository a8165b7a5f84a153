#include "gapbound/spin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "gapbound/error.hpp"

namespace gapbound {

namespace {

int periodic_side(const LatticeModel& m) {
  int L = 0;
  for (const Site& s : m.box)
    for (int c : s) L = std::max(L, c + 1);
  return L;
}

std::map<Site, int> index_of(const std::vector<Site>& box) {
  std::map<Site, int> idx;
  for (std::size_t i = 0; i < box.size(); ++i) idx.emplace(box[i], static_cast<int>(i));
  return idx;
}

std::vector<int> inner_degree(const LatticeModel& m, const BondList& b) {
  std::vector<int> deg(m.box.size(), 0);
  for (auto [i, j] : b.inner) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

BoundReport clamped(std::string method, double raw) {
  BoundReport r;
  r.direction = Direction::Lower;
  r.method = std::move(method);
  r.certified = true;
  r.diagnostics["raw"] = raw;
  if (raw < 0.0) {
    r.value = 0.0;
    r.notes.push_back("bound vacuous: formula value is negative");
  } else {
    r.value = raw;
  }
  return r;
}

}  // namespace

LatticeModel LatticeModel::cube(int d, int L, double J, SiteKind site, double site_param, Hamiltonian h,
                                Boundary b) {
  if (d < 1 || L < 1) throw Error(ErrorKind::InvalidArgument, "cube needs d >= 1 and L >= 1");
  LatticeModel m;
  m.d = d;
  m.J = J;
  m.site = site;
  m.site_param = site_param;
  m.hamiltonian = h;
  m.boundary = b;
  std::int64_t count = 1;
  for (int k = 0; k < d; ++k) {
    count *= L;
    if (count > 1'000'000) throw Error(ErrorKind::TooLarge, "cube has too many sites");
  }
  for (std::int64_t n = 0; n < count; ++n) {
    Site s(d);
    std::int64_t r = n;
    for (int k = 0; k < d; ++k) {
      s[k] = static_cast<int>(r % L);
      r /= L;
    }
    m.box.push_back(s);
  }
  if (b == Boundary::External) m.omega = [](const Site&) { return 0.0; };
  return m;
}

void LatticeModel::validate() const {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (box.empty()) throw Error(ErrorKind::InvalidArgument, "box is empty");
  if (!(J >= 0.0) || !std::isfinite(J)) throw Error(ErrorKind::InvalidArgument, "J must be finite and >= 0");
  if (!std::isfinite(site_param)) throw Error(ErrorKind::InvalidArgument, "site parameter must be finite");
  if (site == SiteKind::Gaussian && !(site_param > 0.0))
    throw Error(ErrorKind::InvalidArgument, "Gaussian site needs alpha > 0");
  auto idx = index_of(box);
  if (idx.size() != box.size()) throw Error(ErrorKind::InvalidArgument, "box has repeated sites");
  for (const Site& s : box)
    if (static_cast<int>(s.size()) != d) throw Error(ErrorKind::InvalidArgument, "site has wrong dimension");
  if (boundary == Boundary::Periodic) {
    int L = periodic_side(*this);
    if (L < 2) throw Error(ErrorKind::InvalidArgument, "periodic box needs side >= 2");
    std::int64_t count = 1;
    for (int k = 0; k < d; ++k) count *= L;
    bool ok = static_cast<std::int64_t>(box.size()) == count;
    for (const Site& s : box)
      for (int c : s) ok = ok && c >= 0;
    if (!ok) throw Error(ErrorKind::InvalidArgument, "periodic box must be {0..L-1}^d");
  }
}

double LatticeModel::u(double x) const {
  if (site == SiteKind::Gaussian) return site_param * x * x;
  double x2 = x * x;
  return x2 * x2 - site_param * x2;
}

BondList bonds(const LatticeModel& m) {
  m.validate();
  auto idx = index_of(m.box);
  BondList out;
  const int L = m.boundary == LatticeModel::Boundary::Periodic ? periodic_side(m) : 0;
  for (std::size_t i = 0; i < m.box.size(); ++i) {
    for (int k = 0; k < m.d; ++k) {
      for (int dir : {+1, -1}) {
        Site j = m.box[i];
        j[k] += dir;
        if (L > 0) {
          j[k] = (j[k] % L + L) % L;
          if (dir > 0) out.inner.emplace_back(static_cast<int>(i), idx.at(j));
          continue;
        }
        auto it = idx.find(j);
        if (it == idx.end()) {
          if (m.boundary == LatticeModel::Boundary::External) out.outer.emplace_back(static_cast<int>(i), j);
        } else if (dir > 0) {
          out.inner.emplace_back(static_cast<int>(i), it->second);
        }
      }
    }
  }
  return out;
}

double conditional_potential(const LatticeModel& m, const BondList& b, const std::vector<double>& x) {
  if (x.size() != m.box.size()) throw Error(ErrorKind::InvalidArgument, "configuration size differs from the box");
  double total = 0.0;
  for (double xi : x) total += m.u(xi);
  const bool quad_h = m.hamiltonian == LatticeModel::Hamiltonian::Quadratic;
  auto pair = [&](double a, double c) { return quad_h ? m.J * (a - c) * (a - c) : -2.0 * m.J * a * c; };
  for (auto [i, j] : b.inner) total += pair(x[i], x[j]);
  if (!b.outer.empty() && !m.omega) throw Error(ErrorKind::MissingBoundaryValue, "boundary condition omega is not set");
  for (const auto& [i, site] : b.outer) {
    double w = m.omega(site);
    if (!std::isfinite(w)) throw Error(ErrorKind::MissingBoundaryValue, "omega has no finite value at an outer site");
    total += pair(x[i], w);
  }
  return total;
}

double conditional_potential(const LatticeModel& m, const std::vector<double>& x) {
  return conditional_potential(m, bonds(m), x);
}

double quartic_marginal(double beta) {
  double r = std::sqrt(beta * beta + 8.0);
  return (r - beta) / std::sqrt(M_E) * std::exp(-beta * (beta + r) / 8.0);
}

namespace {

// Gap floor of the one-site conditional law for a site carrying k bonds.
double site_eta(const LatticeModel& m, int k) {
  const bool quad_h = m.hamiltonian == LatticeModel::Hamiltonian::Quadratic;
  if (m.site == LatticeModel::SiteKind::Gaussian) return 2.0 * m.site_param + (quad_h ? 2.0 * m.J * k : 0.0);
  return quartic_marginal(quad_h ? m.site_param - m.J * k : m.site_param);
}

std::vector<double> site_etas(const LatticeModel& m) {
  std::vector<double> eta(m.box.size(), site_eta(m, 2 * m.d));
  if (m.boundary == LatticeModel::Boundary::Free) {
    auto deg = inner_degree(m, bonds(m));
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = site_eta(m, deg[i]);
  }
  return eta;
}

}  // namespace

double marginal_eta(const LatticeModel& m) {
  m.validate();
  auto eta = site_etas(m);
  return *std::min_element(eta.begin(), eta.end());
}

TildeHessSpec lattice_spec(const LatticeModel& m) {
  BondList b = bonds(m);
  const int n = static_cast<int>(m.box.size());
  TildeHessSpec spec;
  auto eta = site_etas(m);
  spec.eta = Eigen::Map<const Eigen::VectorXd>(eta.data(), n);
  spec.offdiag = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : b.inner) {
    spec.offdiag(i, j) += 2.0 * m.J;
    spec.offdiag(j, i) += 2.0 * m.J;
  }
  return spec;
}

BoundReport system_bound(const LatticeModel& m) {
  double eta = marginal_eta(m);
  if (m.site == LatticeModel::SiteKind::Gaussian) {
    BondList b = bonds(m);
    auto deg = inner_degree(m, b);
    int maxdeg = *std::max_element(deg.begin(), deg.end());
    BoundReport r = clamped("spin_gaussian", eta - 2.0 * m.J * maxdeg);
    r.diagnostics["eta"] = eta;
    r.diagnostics["max_inner_degree"] = maxdeg;
    r.diagnostics["uniform"] = 2.0 * m.site_param;
    return r;
  }
  double coupling = 4.0 * m.d * m.J;
  if (m.boundary == LatticeModel::Boundary::Free) {
    auto deg = inner_degree(m, bonds(m));
    coupling = 2.0 * m.J * *std::max_element(deg.begin(), deg.end());
  }
  BoundReport r = clamped("spin_quartic", eta - coupling);
  r.diagnostics["eta"] = eta;
  return r;
}

double remark64_factor(double beta) {
  if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "refined bound needs beta >= 0");
  const double g14 = std::tgamma(0.25);
  const double g34 = std::tgamma(0.75);
  return g34 / g14 + beta / (2.0 + 4.0 * g14 / (9.0 * (1.0 + beta) * g34));
}

BoundReport refined_bound_remark64(double beta, int d, double J) {
  if (d < 1 || !(J >= 0.0)) throw Error(ErrorKind::InvalidArgument, "need d >= 1 and J >= 0");
  double mb = quartic_marginal(beta);
  BoundReport r = clamped("remark64", mb - 4.0 * d * J * remark64_factor(beta) * mb);
  r.diagnostics["factor"] = remark64_factor(beta);
  r.certified = false;
  return r;
}

double region_bound(RegionScan::Kind kind, double beta, double r) {
  switch (kind) {
    case RegionScan::Kind::Eq69:
      return quartic_marginal(beta) - 2.0 * r;
    case RegionScan::Kind::Eq610:
      return quartic_marginal(beta - r) - 2.0 * r;
    case RegionScan::Kind::Eq611:
      return quartic_marginal(beta) - 2.0 * r * remark64_factor(beta) * quartic_marginal(beta);
  }
  return 0.0;
}

RegionScan region_scan(RegionScan::Kind kind, Interval beta_range, Interval r_range, int grid_n, int threads) {
  if (grid_n < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 points");
  for (Interval iv : {beta_range, r_range}) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
      throw Error(ErrorKind::InvalidInterval, "scan ranges must be finite with lo < hi");
  }
  std::vector<double> betas, rs;
  for (int k = 0; k < grid_n; ++k) {
    betas.push_back(beta_range.lo + (beta_range.hi - beta_range.lo) * k / (grid_n - 1));
    rs.push_back(r_range.lo + (r_range.hi - r_range.lo) * k / (grid_n - 1));
  }
  return region_scan(kind, std::move(betas), std::move(rs), threads);
}

RegionScan region_scan(RegionScan::Kind kind, std::vector<double> beta_grid, std::vector<double> r_grid, int threads) {
  if (beta_grid.empty() || r_grid.size() < 2) throw Error(ErrorKind::InvalidArgument, "scan grids are too small");
  for (const auto* g : {&beta_grid, &r_grid})
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (!std::isfinite((*g)[k])) throw Error(ErrorKind::InvalidArgument, "scan grid has a non-finite point");
      if (k > 0 && !((*g)[k] > (*g)[k - 1])) throw Error(ErrorKind::InvalidArgument, "scan grid must increase");
    }
  if (kind == RegionScan::Kind::Eq611 && beta_grid.front() < 0.0)
    throw Error(ErrorKind::InvalidArgument, "the refined bound is stated for beta >= 0");
  const int nb = static_cast<int>(beta_grid.size());
  const int nr = static_cast<int>(r_grid.size());
  RegionScan s;
  s.kind = kind;
  s.beta_grid = std::move(beta_grid);
  s.r_grid = std::move(r_grid);
  s.value.assign(nb, std::vector<double>(nr));
  s.positivity.assign(nb, std::vector<bool>(nr));
  std::vector<double> root(nb, std::numeric_limits<double>::quiet_NaN());

  auto column = [&](int bi) {
    double beta = s.beta_grid[bi];
    auto f = [&](double r) { return region_bound(kind, beta, r); };
    for (int ri = 0; ri < nr; ++ri) {
      std::vector<double>& row = s.value[bi];
      row[ri] = f(s.r_grid[ri]);
    }
    // Sign changes on the grid, then refined; smallest positive one kept.
    const std::vector<double>& row = s.value[bi];
    for (int ri = 0; ri + 1 < nr; ++ri) {
      double a = s.r_grid[ri], b = s.r_grid[ri + 1];
      double r = std::numeric_limits<double>::quiet_NaN();
      if (row[ri] == 0.0) {
        r = a;
      } else if ((row[ri] > 0.0) != (row[ri + 1] > 0.0) && row[ri + 1] != 0.0) {
        r = find_root(f, a, b, 1e-15 * std::max(1.0, std::abs(b)));
      }
      if (r > 0.0) {
        root[bi] = r;
        break;
      }
    }
    if (std::isnan(root[bi]) && row[nr - 1] == 0.0 && s.r_grid[nr - 1] > 0.0) root[bi] = s.r_grid[nr - 1];
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int bi = 0; bi < nb; ++bi) column(bi);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int bi = t; bi < nb; bi += threads) column(bi);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  for (int bi = 0; bi < nb; ++bi) {
    for (int ri = 0; ri < nr; ++ri) s.positivity[bi][ri] = s.value[bi][ri] > 0.0;
    if (!std::isnan(root[bi])) s.boundary_curve.emplace_back(s.beta_grid[bi], root[bi]);
  }
  return s;
}

void write_region_csv(const RegionScan& s, std::ostream& os) {
  char buf[128];
  os << "beta,r,bound,positive\n";
  for (std::size_t bi = 0; bi < s.beta_grid.size(); ++bi) {
    for (std::size_t ri = 0; ri < s.r_grid.size(); ++ri) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", s.beta_grid[bi], s.r_grid[ri], s.value[bi][ri],
                    s.positivity[bi][ri] ? 1 : 0);
      os << buf;
    }
  }
}

void write_region_svg(const RegionScan& s, std::ostream& os) {
  const double W = 640, H = 480, pad = 48;
  double b0 = s.beta_grid.front(), b1 = s.beta_grid.back();
  double r0 = s.r_grid.front(), r1 = s.r_grid.back();
  auto px = [&](double b) { return pad + (b - b0) / (b1 - b0) * (W - 2 * pad); };
  auto py = [&](double r) { return H - pad - (r - r0) / (r1 - r0) * (H - 2 * pad); };
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<path d=\"M %g %g H %g M %g %g V %g\" stroke=\"black\" fill=\"none\"/>\n", pad, H - pad, W - pad,
                pad, H - pad, pad);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\">beta [%g, %g]</text>\n", W / 2 - 40,
                H - 12, b0, b1);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"12\" y=\"%g\" font-size=\"12\" transform=\"rotate(-90 12 %g)\">r [%g, %g]</text>\n", H / 2,
                H / 2, r0, r1);
  os << buf;
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < s.boundary_curve.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", k ? " " : "", px(s.boundary_curve[k].first),
                  py(std::clamp(s.boundary_curve[k].second, r0, r1)));
    os << buf;
  }
  os << "\"/>\n</svg>\n";
}

BoundaryRatio min_boundary_ratio(const std::vector<Site>& box) {
  if (box.empty()) throw Error(ErrorKind::InvalidArgument, "box is empty");
  if (box.size() > static_cast<std::size_t>(kExhaustiveLimit))
    throw Error(ErrorKind::TooLarge, "exhaustive subset search is capped at 20 sites");
  const int d = static_cast<int>(box.front().size());
  auto idx = index_of(box);
  if (idx.size() != box.size()) throw Error(ErrorKind::InvalidArgument, "box has repeated sites");
  const int n = static_cast<int>(box.size());
  std::vector<std::vector<int>> nbr(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(box[i].size()) != d) throw Error(ErrorKind::InvalidArgument, "mixed site dimensions");
    for (int k = 0; k < d; ++k)
      for (int dir : {+1, -1}) {
        Site j = box[i];
        j[k] += dir;
        auto it = idx.find(j);
        if (it != idx.end()) nbr[i].push_back(it->second);
      }
  }
  // |dA| = 2d|A| - 2 * (bonds inside A).
  std::vector<char> in(n, 0);
  int size = 0, inside = 0;
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t total = std::uint32_t{1} << n;
  for (std::uint32_t k = 1; k < total; ++k) {
    int i = __builtin_ctz(k);
    int links = 0;
    for (int j : nbr[i]) links += in[j];
    if (in[i]) {
      in[i] = 0;
      --size;
      inside -= links;
    } else {
      in[i] = 1;
      ++size;
      inside += links;
    }
    if (size > 0) best = std::min(best, static_cast<double>(2 * d * size - 2 * inside) / size);
  }
  BoundaryRatio out{best, std::numeric_limits<double>::quiet_NaN()};
  int L = 0;
  int lo = std::numeric_limits<int>::max();
  for (const Site& s : box)
    for (int c : s) {
      L = std::max(L, c + 1);
      lo = std::min(lo, c);
    }
  std::int64_t count = 1;
  for (int k = 0; k < d; ++k) count *= L;
  if (lo == 0 && count == n) out.cube_value = 2.0 * d / L;
  return out;
}

struct CouplingProfile::Tables {
  std::shared_ptr<const LogCumulative> phi, tail, f;
};

CouplingProfile::CouplingProfile(int lambda_size, double beta, const QuadConfig& cfg) : n_(lambda_size), beta_(beta) {
  cfg.validate();
  if (lambda_size < 1) throw Error(ErrorKind::InvalidArgument, "lambda size must be >= 1");
  if (!std::isfinite(beta)) throw Error(ErrorKind::InvalidArgument, "beta must be finite");
  const double drop = 2.0 * cfg.truncation_log_drop;
  const double top = beta > 0.0 ? beta * beta * n_ / 4.0 : 0.0;
  auto below = [&](double r) { return c(r) - (top - drop); };
  double hi = 1.0;
  while (below(hi) > 0.0) hi *= 2.0;
  radius_ = find_root(below, 0.0, hi, 1e-12 * hi);
  const int cells = 2048;
  const double R = radius_;
  // The tables outlive this object's address, so they capture values only.
  auto C = [n = n_, b = beta](double r) {
    double r2 = r * r;
    return -r2 * r2 / (16.0 * n) + b * r2 / 4.0;
  };
  auto phi = std::make_shared<const LogCumulative>([C](double r) { return -C(r); }, 0.0, R, cells, cfg);
  auto tail = std::make_shared<const LogCumulative>(
      [C, phi](double r) { return C(r) + 0.5 * phi->log_prefix(r); }, 0.0, R, cells, cfg);
  auto f = std::make_shared<const LogCumulative>([C, tail](double r) { return -C(r) + tail->log_suffix(r); }, 0.0,
                                                 R, cells, cfg);
  t_ = std::make_shared<Tables>(Tables{phi, tail, f});

  // The ratio sqrt(phi)/f blows up at 0, so its infimum is interior.
  QuadConfig sc = cfg;
  auto neg_log_ratio = [this](double r) { return -(0.5 * log_phi(r) - log_f(r)); };
  ScanResult sr = sup_scan(neg_log_ratio, {1e-6 * R, R}, sc);
  argmin_ = sr.argmax;
  eps_ = 4.0 * std::exp(-sr.max);
  auto neg_floor = [this](double r) { return -(-c(r) - log_phi(r)); };
  ScanResult fr = sup_scan(neg_floor, {1e-6 * R, R}, sc);
  floor_ = std::exp(-2.0 * fr.max);
}

double CouplingProfile::c(double r) const {
  double r2 = r * r;
  return -r2 * r2 / (16.0 * n_) + beta_ * r2 / 4.0;
}

double CouplingProfile::log_phi(double r) const {
  if (r < 0.0) throw Error(ErrorKind::InvalidArgument, "radius must be >= 0");
  return t_->phi->log_prefix(r);
}

double CouplingProfile::log_f(double r) const {
  if (r < 0.0) throw Error(ErrorKind::InvalidArgument, "radius must be >= 0");
  return t_->f->log_prefix(r);
}

CouplingProfile coupling_rate(int lambda_size, double beta, const QuadConfig& cfg) {
  return CouplingProfile(lambda_size, beta, cfg);
}

}  // namespace gapbound
