#include "gslab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <random>
#include <stdexcept>

#include "gslab/fenchel.hpp"

namespace gslab {

void MFamilySpec::validate() const {
  if (kind != "power") throw std::invalid_argument("unknown M-family kind '" + kind + "'");
  if (!(p > 1.0)) throw std::invalid_argument("M-family exponent p must exceed 1 (superlinearity)");
  if (!(scale_base > 1.0)) throw std::invalid_argument("M-family scale_base must exceed 1");
  if (n < 1 || n > 3) throw std::invalid_argument("M-family dimension must be 1, 2 or 3");
}

PowerFamily::PowerFamily(MFamilySpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  q_ = spec_.p / (spec_.p - 1.0);
}

double PowerFamily::c(int nu) const {
  const double a = std::pow(spec_.scale_base, -nu * spec_.p);
  return std::pow(a * spec_.p, 1.0 - q_) / q_;
}

double PowerFamily::M(int nu, PointView x) const {
  const double s = std::pow(spec_.scale_base, nu);
  double r = 0.0;
  for (double v : x) r += std::pow(std::fabs(v) / s, spec_.p);
  return r;
}

double PowerFamily::phi_M(int nu, PointView xi) const {
  const double cn = c(nu);
  double r = 0.0;
  for (double v : xi) r += cn * std::pow(std::fabs(v), q_);
  return r;
}

double PowerFamily::psi(int nu, PointView t) const {
  const double cn = c(nu);
  double r = 0.0;
  for (double v : t) r += cn * std::exp(q_ * std::fabs(v));
  return r;
}

double PowerFamily::h1(int nu, double s) const {
  s = std::fabs(s);
  const double cn = c(nu);
  if (s <= cn * q_) return -cn;
  return (s / q_) * (std::log(s / (cn * q_)) - 1.0);
}

double PowerFamily::h(int nu, PointView x) const {
  double r = 0.0;
  for (double v : x) r += h1(nu, v);
  return r;
}

double PowerFamily::h_star(int nu, PointView t) const { return psi(nu, t); }

double PowerFamily::phi(int nu, PointView x) const {
  const double cn = c(nu);
  double r = 0.0;
  for (double v : x) r += cn * std::pow(1.0 + std::fabs(v), q_);
  return r;
}

double PowerFamily::phi_star1(int nu, double s) const {
  s = std::fabs(s);
  const double cn = c(nu);
  if (s <= cn * q_) return -cn;
  const double u = std::pow(s / (cn * q_), spec_.p - 1.0);
  return s * (u - 1.0) - cn * std::pow(u, q_);
}

double PowerFamily::phi_star(int nu, PointView xi) const {
  double r = 0.0;
  for (double v : xi) r += phi_star1(nu, v);
  return r;
}

// Grid-backed h_nu on [0, X]^n, extended evenly.
class TableModel {
 public:
  explicit TableModel(std::vector<GridFunction> tables) : tables_(std::move(tables)) {
    if (tables_.size() < 2) throw std::invalid_argument("table family needs at least two indices");
    n_ = tables_.front().dim();
    if (n_ > 3) throw std::invalid_argument("table family dimension above 3");
    for (const auto& t : tables_) {
      if (t.dim() != n_) throw std::invalid_argument("table family: dimension differs between indices");
      for (std::size_t j = 0; j < n_; ++j)
        if (t.grid().axis(j).front() < 0.0) throw std::invalid_argument("table family: grid must lie in [0,inf)^n");
    }
    phi_once_ = std::make_unique<std::once_flag[]>(tables_.size());
    phi_grid_.resize(tables_.size());
  }

  std::size_t dim() const { return n_; }
  int count() const { return static_cast<int>(tables_.size()); }

  double h(int nu, PointView x) const {
    const GridFunction& t = table(nu);
    Point a(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      a[j] = std::fabs(x[j]);
      if (a[j] > t.grid().axis(j).back() || a[j] < t.grid().axis(j).front())
        throw std::domain_error("point outside the table extent of h_" + std::to_string(nu));
    }
    return t.evaluate(a);
  }

  double h_star(int nu, PointView s) const {
    Point a(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) a[j] = std::fabs(s[j]);
    return conjugate_at(table(nu), a).value;
  }

  double phi(int nu, PointView x) const {
    Point a(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) a[j] = std::log1p(std::fabs(x[j]));
    return h_star(nu, a);
  }

  double phi_star(int nu, PointView xi) const {
    const std::size_t k = static_cast<std::size_t>(nu - 1);
    std::call_once(phi_once_[k], [&] {
      static const std::size_t counts[] = {0, 801, 81, 21};
      const TensorGrid g = TensorGrid::uniform(n_, 0.0, 40.0, counts[n_]);
      phi_grid_[k] = GridFunction::sample(g, [&](PointView y) { return phi(nu, y); });
    });
    Point a(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) a[j] = std::fabs(xi[j]);
    return conjugate_at(phi_grid_[k], a).value;
  }

 private:
  const GridFunction& table(int nu) const {
    if (nu < 1 || nu > count()) throw std::out_of_range("table family index out of range");
    return tables_[static_cast<std::size_t>(nu - 1)];
  }

  std::vector<GridFunction> tables_;
  std::size_t n_ = 1;
  mutable std::unique_ptr<std::once_flag[]> phi_once_;
  mutable std::vector<GridFunction> phi_grid_;
};

namespace {
std::string num_label(double v) {
  std::string s = format_double(v);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return std::stod(buf) == v ? std::string(buf) : s;
}
}  // namespace

WeightFamily WeightFamily::power(MFamilySpec spec, int nu_max) {
  if (nu_max < 1) throw std::invalid_argument("nu_max must be at least 1");
  if (nu_max + 1 > kClosedFormIndexCap) throw std::invalid_argument("nu_max too large");
  WeightFamily f;
  f.power_.emplace(spec);
  f.n_ = spec.n;
  f.nu_max_ = nu_max;
  f.label_ = "power:p=" + num_label(spec.p) + ",scale_base=" + num_label(spec.scale_base) +
             ",n=" + std::to_string(spec.n);
  return f;
}

WeightFamily WeightFamily::from_tables(std::vector<GridFunction> tables, std::string label) {
  WeightFamily f;
  auto model = std::make_shared<TableModel>(std::move(tables));
  f.n_ = model->dim();
  f.nu_max_ = model->count() - 1;
  f.table_ = std::move(model);
  f.label_ = std::move(label);
  return f;
}

WeightFamily WeightFamily::from_table_dir(const std::string& dir, int count) {
  namespace fs = std::filesystem;
  std::vector<GridFunction> tables;
  for (int nu = 1;; ++nu) {
    if (count > 0 && nu > count) break;
    const fs::path p = fs::path(dir) / ("h_" + std::to_string(nu) + ".csv");
    if (!fs::exists(p)) {
      if (count > 0) throw std::runtime_error("missing table " + p.string());
      break;
    }
    tables.push_back(GridFunction::read_csv(p.string()));
  }
  return from_tables(std::move(tables), "table:dir=" + dir);
}

int WeightFamily::max_index() const { return power_ ? kClosedFormIndexCap : table_->count(); }

void WeightFamily::check_index(int nu) const {
  if (nu < 1 || nu > max_index())
    throw std::out_of_range("weight index " + std::to_string(nu) + " out of range");
}

double WeightFamily::h(int nu, PointView x) const {
  check_index(nu);
  return power_ ? power_->h(nu, x) : table_->h(nu, x);
}

double WeightFamily::h_star(int nu, PointView t) const {
  check_index(nu);
  return power_ ? power_->h_star(nu, t) : table_->h_star(nu, t);
}

double WeightFamily::phi(int nu, PointView x) const {
  check_index(nu);
  return power_ ? power_->phi(nu, x) : table_->phi(nu, x);
}

double WeightFamily::phi_star(int nu, PointView xi) const {
  check_index(nu);
  return power_ ? power_->phi_star(nu, xi) : table_->phi_star(nu, xi);
}

Evaluator WeightFamily::h_evaluator(int nu) const {
  check_index(nu);
  if (power_) return [p = *power_, nu](PointView x) { return p.h(nu, x); };
  return [t = table_, nu](PointView x) { return t->h(nu, x); };
}

Evaluator WeightFamily::phi_evaluator(int nu) const {
  check_index(nu);
  if (power_) return [p = *power_, nu](PointView x) { return p.phi(nu, x); };
  return [t = table_, nu](PointView x) { return t->phi(nu, x); };
}

Evaluator WeightFamily::phi_star_evaluator(int nu) const {
  check_index(nu);
  if (power_) return [p = *power_, nu](PointView x) { return p.phi_star(nu, x); };
  return [t = table_, nu](PointView x) { return t->phi_star(nu, x); };
}

const ShiftConstants& WeightFamily::constants(int nu) const {
  auto it = constants_.find(nu);
  if (it == constants_.end())
    throw std::logic_error("no cached shift constants for index " + std::to_string(nu));
  return it->second;
}

WeightFamily build_family_from_M(const MFamilySpec& spec, int nu_max, const BuildGrids& grids) {
  spec.validate();
  if (nu_max < 1) throw std::invalid_argument("nu_max must be at least 1");
  if (grids.x_max < 10.0) throw std::invalid_argument("build grid must cover [0, X] with X >= 10");
  static const std::size_t x_counts[] = {0, 301, 61, 21};
  static const std::size_t t_counts[] = {0, 4001, 401, 121};
  const std::size_t n = spec.n;
  const std::size_t xc = grids.x_count ? grids.x_count : x_counts[n];
  const std::size_t tc = grids.t_count ? grids.t_count : t_counts[n];

  WeightFamily fam = WeightFamily::power(spec, nu_max);
  const PowerFamily& pf = *fam.power_model();
  const TensorGrid xgrid = TensorGrid::uniform(n, 0.0, grids.x_max, xc);

  std::vector<BuildTraceEntry> trace;
  for (int nu = 1; nu <= nu_max; ++nu) {
    const double cq = pf.c(nu) * pf.q();
    const double T = std::max(0.5, std::log(std::max(grids.x_max / cq, 1.0)) / pf.q() + 0.5);
    const TensorGrid tgrid = TensorGrid::uniform(n, 0.0, T, tc);
    const GridFunction psi = GridFunction::sample(tgrid, [&](PointView t) { return pf.psi(nu, t); });
    ConjugateResult res = conjugate_nd(psi, xgrid);

    BuildTraceEntry e;
    e.nu = nu;
    Point x;
    for (std::size_t i = 0; i < xgrid.size(); ++i) {
      xgrid.point_into(i, x);
      const double exact = pf.h(nu, x);
      Point two(x);
      for (auto& v : two) v *= 2.0;
      e.j4_max_slack = std::max(e.j4_max_slack, pf.M(nu + 1, two) - pf.M(nu, x));
      if (xgrid.on_boundary(i)) continue;
      const double dev = std::fabs(res.dual[i] - exact) / std::max(1.0, std::fabs(exact));
      if (dev > e.max_rel_dev) {
        e.max_rel_dev = dev;
        e.worst_x = x;
      }
    }
    if (e.max_rel_dev > 1e-3)
      throw std::runtime_error("build grid too coarse: discrete h_" + std::to_string(nu) +
                               " deviates from the closed form by " + format_double(e.max_rel_dev));
    e.h_grid = std::move(res.dual);
    trace.push_back(std::move(e));
  }
  fam.set_build_trace(std::move(trace));
  return fam;
}

TensorGrid default_validation_grid(std::size_t n) {
  static const std::size_t counts[] = {0, 301, 61, 21};
  if (n < 1 || n > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  return TensorGrid::geometric(n, 30.0, counts[n]);
}

namespace {

double norm2(PointView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Distance (in index steps) of a grid point from the outer faces.
std::size_t outer_depth(const TensorGrid& g, std::size_t flat) {
  const auto idx = g.unravel(flat);
  std::size_t d = SIZE_MAX;
  for (std::size_t j = 0; j < idx.size(); ++j) d = std::min(d, g.axis(j).size() - 1 - idx[j]);
  return d;
}

struct ShellRatio {
  double outer = kInf;
  double inner = kInf;
  Point where;
};

ShellRatio shell_ratios(const TensorGrid& g, const Evaluator& f) {
  ShellRatio r;
  Point x;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t d = outer_depth(g, i);
    if (d > 1) continue;
    g.point_into(i, x);
    const double nx = norm2(x);
    if (nx == 0.0) continue;
    const double v = f(x) / nx;
    if (d == 0 && v < r.outer) {
      r.outer = v;
      r.where = x;
    }
    if (d == 1) r.inner = std::min(r.inner, v);
  }
  return r;
}

TensorGrid sub_extent(const TensorGrid& g, double fraction) {
  std::vector<std::vector<double>> axes;
  for (const auto& ax : g.axes()) {
    const double lim = ax.front() + fraction * (ax.back() - ax.front());
    std::vector<double> a;
    for (double v : ax)
      if (v <= lim + 1e-12 * std::fabs(lim)) a.push_back(v);
    if (a.size() < 2) a = {ax[0], ax[1]};
    axes.push_back(std::move(a));
  }
  return TensorGrid(std::move(axes));
}

bool stable(double full, double half) {
  return std::isfinite(full) && std::isfinite(half) && std::fabs(full - half) < 0.01 * std::max(1.0, std::fabs(full));
}

struct MaxAt {
  double value = -kInf;
  Point where;
};

template <class F>
MaxAt grid_max(const TensorGrid& g, F&& f) {
  MaxAt m;
  Point x;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point_into(i, x);
    const double v = f(x);
    if (v > m.value) {
      m.value = v;
      m.where = x;
    }
  }
  return m;
}

double gamma_term(const WeightFamily& fam, int nu, PointView x) {
  double s = 0.0;
  for (double v : x) s += v;
  return std::log(2.0) * s - (fam.h(nu, x) - fam.h(nu + 1, x));
}

double A_term(const WeightFamily& fam, int nu, double M, PointView x) {
  double s = 0.0;
  for (double v : x)
    if (v != 0.0) s += v * std::log(v / M);
  return fam.h(nu, x) - s;
}

// l_nu over all pairs of a coarse subgrid plus random pairs, restricted to
// points inside `region` so that x + y stays within twice its extent.
MaxAt l_estimate(const WeightFamily& fam, int nu, const TensorGrid& region, std::uint64_t seed) {
  const std::size_t n = region.dim();
  const auto per_axis = static_cast<std::size_t>(std::ceil(std::pow(33.0, 1.0 / static_cast<double>(n)) - 1e-9));
  std::vector<std::vector<double>> axes;
  for (const auto& ax : region.axes()) {
    const std::size_t k = std::min(per_axis, ax.size());
    std::vector<double> a;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t pos = (k == 1) ? 0 : i * (ax.size() - 1) / (k - 1);
      if (a.empty() || ax[pos] > a.back()) a.push_back(ax[pos]);
    }
    axes.push_back(std::move(a));
  }
  const TensorGrid sub(std::move(axes));
  std::vector<Point> pts(sub.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = sub.point(i);

  MaxAt m;
  Point s(n);
  auto visit = [&](const Point& x, const Point& y) {
    for (std::size_t j = 0; j < n; ++j) s[j] = x[j] + y[j];
    const double v = fam.h(nu + 1, s) - fam.h(nu, x) - fam.h(nu, y);
    if (v > m.value) {
      m.value = v;
      m.where = x;
      m.where.insert(m.where.end(), y.begin(), y.end());
    }
  };
  for (const auto& x : pts)
    for (const auto& y : pts) visit(x, y);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, region.size() - 1);
  for (int k = 0; k < 500; ++k) {
    const Point x = region.point(pick(rng));
    const Point y = region.point(pick(rng));
    visit(x, y);
  }
  return m;
}

}  // namespace

ShiftConstants estimate_shift_constants(WeightFamily& family, int nu, const TensorGrid& grid, std::uint64_t seed) {
  family.check_index(nu + 1);
  ShiftConstants c;
  c.gamma_raw = grid_max(grid, [&](PointView x) { return gamma_term(family, nu, x); }).value;
  c.gamma = std::max(0.0, c.gamma_raw);
  c.l = l_estimate(family, nu, sub_extent(grid, 0.5), seed).value;
  for (int M : {1, 2, 10})
    c.A[M] = grid_max(grid, [&](PointView x) { return A_term(family, nu, M, x); }).value;
  for (int a : {1, 2}) {
    const Point at(family.dim(), static_cast<double>(a));
    c.b[a] = family.h(nu, at) + c.l;
  }
  family.set_constants(nu, c);
  return c;
}

double shift_b(const WeightFamily& family, int nu, double a) {
  const Point at(family.dim(), a);
  return family.h(nu, at) + family.constants(nu).l;
}

void ensure_constants(WeightFamily& family, int upto, std::uint64_t seed) {
  const TensorGrid g = default_validation_grid(family.dim());
  for (int nu = 1; nu <= upto; ++nu)
    if (!family.has_constants(nu)) estimate_shift_constants(family, nu, g, seed);
}

bool ConditionReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

ConditionReport check_H_conditions(WeightFamily& family, int nu, const TensorGrid& grid, double tol,
                                   std::uint64_t seed) {
  for (const auto& ax : grid.axes())
    if (ax.front() < 0.0) throw std::invalid_argument("validation grid must lie in the nonnegative orthant");
  if (grid.dim() != family.dim()) throw std::invalid_argument("validation grid dimension mismatch");
  family.check_index(nu + 1);

  ConditionReport rep;
  rep.family = family.label();
  rep.nu = nu;
  rep.tolerance = tol;
  rep.seed = seed;
  rep.grid_points = grid.size();
  const std::size_t n = grid.dim();
  Point x, y;

  {  // 1: evenness
    ConditionResult r{1, "evenness", true, 0.0, {}, ""};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.point_into(i, x);
      const double base = family.h(nu, x);
      for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        y = x;
        for (std::size_t j = 0; j < n; ++j)
          if ((mask >> j) & 1U) y[j] = -y[j];
        const double d = std::fabs(family.h(nu, y) - base);
        if (d > r.value || (d != 0.0 && r.where.empty())) {
          r.value = d;
          r.where = y;
        }
      }
    }
    r.passed = r.value == 0.0;
    rep.conditions.push_back(r);
  }
  {  // 2: per-coordinate monotonicity on the orthant
    ConditionResult r{2, "monotonicity", true, kInf, {}, ""};
    const auto shape = grid.shape();
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.point_into(i, x);
      vals[i] = family.h(nu, x);
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t stride = 1;
      for (std::size_t k = j + 1; k < n; ++k) stride *= shape[k];
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if ((i / stride) % shape[j] + 1 == shape[j]) continue;
        const double d = vals[i + stride] - vals[i];
        if (d < r.value) {
          r.value = d;
          r.where = grid.point(i);
        }
      }
    }
    r.passed = r.value >= -tol;
    rep.conditions.push_back(r);
  }
  {  // 3: superlinear growth on the outer shells
    const ShellRatio s = shell_ratios(grid, family.h_evaluator(nu));
    ConditionResult r{3, "superlinearity", s.outer > s.inner, s.outer - s.inner, s.where, ""};
    r.note = "min h/|x| outer shell " + format_double(s.outer) + ", next shell " + format_double(s.inner);
    rep.conditions.push_back(r);
  }

  const TensorGrid half = sub_extent(grid, 0.5);
  ShiftConstants c;
  {  // 4: A_{nu,M} finite
    ConditionResult r{4, "log-growth bound", true, 0.0, {}, ""};
    for (int M : {1, 2, 10}) {
      const MaxAt full = grid_max(grid, [&](PointView p) { return A_term(family, nu, M, p); });
      const MaxAt hf = grid_max(half, [&](PointView p) { return A_term(family, nu, M, p); });
      c.A[M] = full.value;
      const bool ok = stable(full.value, hf.value);
      r.passed = r.passed && ok;
      if (M == 1) {
        r.value = full.value;
        r.where = full.where;
      }
      r.note += (r.note.empty() ? "" : "; ") + std::string("A_M=") + std::to_string(M) + ": " +
                format_double(full.value) + (ok ? " stable" : " unstable");
    }
    rep.conditions.push_back(r);
  }
  {  // 5: gamma_nu
    const MaxAt full = grid_max(grid, [&](PointView p) { return gamma_term(family, nu, p); });
    const MaxAt hf = grid_max(half, [&](PointView p) { return gamma_term(family, nu, p); });
    c.gamma_raw = full.value;
    c.gamma = std::max(0.0, full.value);
    const bool ok = stable(c.gamma, std::max(0.0, hf.value));
    ConditionResult r{5, "index separation", ok, c.gamma, full.where, ""};
    r.note = "raw grid max " + format_double(full.value) + "; half-extent grid max " + format_double(hf.value);
    rep.conditions.push_back(r);
  }
  {  // 6: l_nu
    const MaxAt full = l_estimate(family, nu, half, seed);
    const MaxAt quarter = l_estimate(family, nu, sub_extent(grid, 0.25), seed);
    c.l = full.value;
    const bool ok = stable(full.value, quarter.value);
    ConditionResult r{6, "subadditivity shift", ok, full.value, full.where, ""};
    r.note = "pairs from the half-extent grid; quarter-extent estimate " + format_double(quarter.value);
    rep.conditions.push_back(r);
  }
  for (int a : {1, 2}) {
    const Point at(n, static_cast<double>(a));
    c.b[a] = family.h(nu, at) + c.l;
  }
  family.set_constants(nu, c);
  rep.constants = c;
  return rep;
}

Evaluator phi_from_h(const WeightFamily& family, int nu, const TensorGrid* validation) {
  if (nu < 1 || nu > family.nu_max()) throw std::out_of_range("phi_from_h: index out of range");
  Evaluator phi = family.phi_evaluator(nu);
  const TensorGrid grid = validation ? *validation : default_validation_grid(family.dim());
  const std::size_t n = family.dim();

  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  Point x(n), y(n);
  for (int k = 0; k < 100; ++k) {
    for (auto& v : x) v = u(rng);
    const double base = phi(x);
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      for (std::size_t j = 0; j < n; ++j) y[j] = ((mask >> j) & 1U) ? -x[j] : x[j];
      if (phi(y) != base) throw std::runtime_error("phi_from_h: phi is not even");
    }
  }
  const auto shape = grid.shape();
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point_into(i, x);
    vals[i] = phi(x);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t stride = 1;
    for (std::size_t k = j + 1; k < n; ++k) stride *= shape[k];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if ((i / stride) % shape[j] + 1 == shape[j]) continue;
      if (vals[i + stride] < vals[i] - 1e-12 * std::max(1.0, std::fabs(vals[i])))
        throw std::runtime_error("phi_from_h: phi is not monotone on the orthant");
    }
  }
  const ShellRatio s = shell_ratios(grid, phi);
  if (!(s.outer > s.inner)) throw std::runtime_error("phi_from_h: phi/|x| does not grow on the outer shells");
  return phi;
}

}  // namespace gslab
