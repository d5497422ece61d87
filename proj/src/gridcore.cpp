#include "gslab/gridcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gslab {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    if (e < 0) throw std::invalid_argument("MultiIndex: negative entry");
}

MultiIndex MultiIndex::zeros(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

int MultiIndex::order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  std::vector<int> e(entries_);
  for (std::size_t j = 0; j < e.size(); ++j) e[j] += other.entries_[j];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(entries_[j]);
  }
  return s + ")";
}

bool entrywise_le(const MultiIndex& alpha, const MultiIndex& beta) {
  if (alpha.dim() != beta.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  for (std::size_t j = 0; j < alpha.dim(); ++j)
    if (alpha[j] > beta[j]) return false;
  return true;
}

double log_factorial(int k) {
  if (k < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (k < 2) return 0.0;
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_factorial(const MultiIndex& beta) {
  double s = 0.0;
  for (int e : beta.entries()) s += log_factorial(e);
  return s;
}

double log_binomial(const MultiIndex& beta, const MultiIndex& alpha) {
  if (!entrywise_le(alpha, beta)) throw std::invalid_argument("log_binomial: alpha not <= beta");
  double s = 0.0;
  for (std::size_t j = 0; j < beta.dim(); ++j)
    s += log_factorial(beta[j]) - log_factorial(alpha[j]) - log_factorial(beta[j] - alpha[j]);
  return s;
}

double binomial(const MultiIndex& beta, const MultiIndex& alpha) {
  if (!entrywise_le(alpha, beta)) throw std::invalid_argument("binomial: alpha not <= beta");
  double r = 1.0;
  for (std::size_t j = 0; j < beta.dim(); ++j) {
    const int b = beta[j];
    const int k = std::min(alpha[j], b - alpha[j]);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (b - k + i) / i;
    r *= std::round(c);
  }
  return r;
}

double log_abs_monomial(PointView x, const MultiIndex& beta) {
  if (x.size() != beta.dim()) throw std::invalid_argument("log_abs_monomial: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (beta[j] == 0) continue;
    if (x[j] == 0.0) return -kInf;
    s += beta[j] * std::log(std::fabs(x[j]));
  }
  return s;
}

namespace {
void shell_rec(std::size_t j, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (j + 1 == cur.size()) {
    cur[j] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[j] = v;
    shell_rec(j + 1, remaining - v, cur, out);
  }
}
}  // namespace

std::vector<MultiIndex> shell(std::size_t n, int order) {
  if (n == 0) throw std::invalid_argument("shell: dimension must be positive");
  if (order < 0) throw std::invalid_argument("shell: negative order");
  std::vector<MultiIndex> out;
  std::vector<int> cur(n, 0);
  shell_rec(0, order, cur, out);
  return out;
}

std::vector<MultiIndex> lower_set(const MultiIndex& beta) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(beta.dim(), 0);
  while (true) {
    out.emplace_back(cur);
    std::size_t j = 0;
    for (; j < cur.size(); ++j) {
      if (cur[j] < beta[j]) {
        ++cur[j];
        break;
      }
      cur[j] = 0;
    }
    if (j == cur.size()) break;
  }
  return out;
}

LogReal LogReal::from(double v) {
  if (v == 0.0) return {};
  return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
}

double LogReal::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

LogReal LogReal::operator*(const LogReal& o) const {
  if (sign == 0 || o.sign == 0) return {};
  return {log_abs + o.log_abs, sign * o.sign};
}

LogReal log_sum(std::span<const LogReal> terms) {
  double lmax = -kInf;
  for (const auto& t : terms)
    if (t.sign != 0) lmax = std::max(lmax, t.log_abs);
  if (lmax == -kInf) return {};
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0) acc += t.sign * std::exp(t.log_abs - lmax);
  if (acc == 0.0) return {};
  return {lmax + std::log(std::fabs(acc)), acc > 0 ? 1 : -1};
}

TensorGrid::TensorGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("TensorGrid: no axes");
  for (const auto& ax : axes_) {
    if (ax.size() < 2) throw std::invalid_argument("TensorGrid: axis needs at least 2 points");
    for (std::size_t i = 0; i < ax.size(); ++i) {
      if (!std::isfinite(ax[i])) throw std::invalid_argument("TensorGrid: non-finite sample point");
      if (i && !(ax[i] > ax[i - 1])) throw std::invalid_argument("TensorGrid: axis not strictly increasing");
    }
  }
}

TensorGrid TensorGrid::uniform(std::size_t n, double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("TensorGrid::uniform: bad range");
  std::vector<double> ax(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) ax[i] = lo + step * static_cast<double>(i);
  ax.back() = hi;
  return TensorGrid(std::vector<std::vector<double>>(n, ax));
}

TensorGrid TensorGrid::geometric(std::size_t n, double hi, std::size_t count, double stretch) {
  if (count < 2 || !(hi > 0) || !(stretch > 0)) throw std::invalid_argument("TensorGrid::geometric: bad range");
  std::vector<double> ax(count);
  const double denom = std::expm1(stretch);
  for (std::size_t i = 0; i < count; ++i)
    ax[i] = hi * std::expm1(stretch * static_cast<double>(i) / static_cast<double>(count - 1)) / denom;
  ax.front() = 0.0;
  ax.back() = hi;
  return TensorGrid(std::vector<std::vector<double>>(n, ax));
}

std::vector<std::size_t> TensorGrid::shape() const {
  std::vector<std::size_t> s;
  for (const auto& ax : axes_) s.push_back(ax.size());
  return s;
}

std::size_t TensorGrid::size() const {
  if (axes_.empty()) return 0;
  std::size_t s = 1;
  for (const auto& ax : axes_) s *= ax.size();
  return s;
}

std::vector<std::size_t> TensorGrid::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t j = axes_.size(); j-- > 0;) {
    idx[j] = flat % axes_[j].size();
    flat /= axes_[j].size();
  }
  return idx;
}

std::size_t TensorGrid::ravel(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) flat = flat * axes_[j].size() + idx[j];
  return flat;
}

Point TensorGrid::point(std::size_t flat) const {
  Point p(axes_.size());
  point_into(flat, p);
  return p;
}

void TensorGrid::point_into(std::size_t flat, Point& out) const {
  out.resize(axes_.size());
  for (std::size_t j = axes_.size(); j-- > 0;) {
    out[j] = axes_[j][flat % axes_[j].size()];
    flat /= axes_[j].size();
  }
}

bool TensorGrid::on_boundary(std::size_t flat) const {
  for (std::size_t j = axes_.size(); j-- > 0;) {
    const std::size_t i = flat % axes_[j].size();
    if (i == 0 || i + 1 == axes_[j].size()) return true;
    flat /= axes_[j].size();
  }
  return false;
}

TensorGrid TensorGrid::extended() const {
  std::vector<std::vector<double>> axes = axes_;
  for (auto& ax : axes) {
    const double hi = ax.back();
    const double step = ax[ax.size() - 1] - ax[ax.size() - 2];
    const double target = hi + std::max(std::fabs(hi), step);
    const auto extra = static_cast<std::size_t>(std::ceil((target - hi) / step - 1e-9));
    for (std::size_t k = 1; k <= extra; ++k) ax.push_back(hi + step * static_cast<double>(k));
  }
  return TensorGrid(std::move(axes));
}

TensorGrid TensorGrid::scaled(double factor) const {
  std::vector<std::vector<double>> axes = axes_;
  for (auto& ax : axes)
    for (auto& v : ax) v *= factor;
  return TensorGrid(std::move(axes));
}

GridFunction::GridFunction(TensorGrid grid, std::vector<double> values, ExtendedValuePolicy policy)
    : grid_(std::move(grid)), values_(std::move(values)), policy_(policy) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("GridFunction: value count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite sample value");
}

GridFunction GridFunction::sample(const TensorGrid& grid, const Evaluator& f, ExtendedValuePolicy policy) {
  std::vector<double> values(grid.size());
  Point p;
  for (std::size_t i = 0; i < values.size(); ++i) {
    grid.point_into(i, p);
    values[i] = f(p);
  }
  return GridFunction(grid, std::move(values), policy);
}

double GridFunction::evaluate(PointView x) const {
  const std::size_t n = grid_.dim();
  if (x.size() != n) throw std::invalid_argument("GridFunction::evaluate: dimension mismatch");
  std::vector<std::size_t> lo(n);
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& ax = grid_.axis(j);
    double xj = x[j];
    if (xj < ax.front() || xj > ax.back()) {
      if (policy_ == ExtendedValuePolicy::PlusInfinityOutside) return kInf;
      xj = std::clamp(xj, ax.front(), ax.back());
    }
    auto it = std::upper_bound(ax.begin(), ax.end(), xj);
    std::size_t i = (it == ax.begin()) ? 0 : static_cast<std::size_t>(it - ax.begin()) - 1;
    if (i + 1 >= ax.size()) i = ax.size() - 2;
    lo[j] = i;
    w[j] = (xj - ax[i]) / (ax[i + 1] - ax[i]);
  }
  double acc = 0.0;
  std::vector<std::size_t> idx(n);
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    double weight = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool up = (corner >> j) & 1U;
      idx[j] = lo[j] + (up ? 1 : 0);
      weight *= up ? w[j] : 1.0 - w[j];
    }
    if (weight == 0.0) continue;
    acc += weight * values_[grid_.ravel(idx)];
  }
  return acc;
}

Evaluator GridFunction::evaluator() const {
  auto self = std::make_shared<GridFunction>(*this);
  return [self](PointView x) { return self->evaluate(x); };
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void GridFunction::write_csv(std::ostream& os) const {
  const std::size_t n = grid_.dim();
  for (std::size_t j = 0; j < n; ++j) os << 'x' << (j + 1) << ',';
  os << "value\n";
  Point p;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    grid_.point_into(i, p);
    for (double c : p) os << format_double(c) << ',';
    os << format_double(values_[i]) << '\n';
  }
}

void GridFunction::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os);
}

namespace {
std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("CSV: cannot parse number '" + s + "'");
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\r')) ++pos;
  if (pos != s.size()) throw std::runtime_error("CSV: trailing characters in '" + s + "'");
  return v;
}
}  // namespace

GridFunction GridFunction::read_csv(std::istream& is, ExtendedValuePolicy policy) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() < 2 || header.back() != "value") throw std::runtime_error("CSV: header must be x1,...,xn,value");
  const std::size_t n = header.size() - 1;
  for (std::size_t j = 0; j < n; ++j)
    if (header[j] != "x" + std::to_string(j + 1)) throw std::runtime_error("CSV: header must be x1,...,xn,value");

  std::vector<Point> rows;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != n + 1) throw std::runtime_error("CSV: wrong number of columns");
    Point p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = parse_number(cells[j]);
    rows.push_back(std::move(p));
    values.push_back(parse_number(cells[n]));
  }
  if (rows.empty()) throw std::runtime_error("CSV: no data rows");

  std::vector<std::vector<double>> axes(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& r : rows) axes[j].push_back(r[j]);
    std::sort(axes[j].begin(), axes[j].end());
    axes[j].erase(std::unique(axes[j].begin(), axes[j].end()), axes[j].end());
  }
  TensorGrid grid(axes);
  if (grid.size() != rows.size()) throw std::runtime_error("CSV: rows do not form a full tensor grid");
  Point p;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    grid.point_into(i, p);
    if (p != rows[i]) throw std::runtime_error("CSV: rows are not in row-major grid order");
  }
  return GridFunction(std::move(grid), std::move(values), policy);
}

GridFunction GridFunction::read_csv(const std::string& path, ExtendedValuePolicy policy) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is, policy);
}

}  // namespace gslab
