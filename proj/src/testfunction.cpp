#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gslab/spaces.hpp"

namespace gslab {

std::vector<LogReal> hermite_log(double t, int K) {
  if (K < 0) throw std::invalid_argument("hermite_log: negative order");
  // normalized h_k = H_k / sqrt(2^k k!), rescaled to stay in range
  constexpr double kBig = 1e150;
  const double lbig = std::log(kBig);
  std::vector<LogReal> out(static_cast<std::size_t>(K) + 1);
  double prev = 0.0, cur = 1.0, lscale = 0.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) {
      const double next = std::sqrt(2.0 / k) * t * cur - std::sqrt((k - 1.0) / k) * prev;
      prev = cur;
      cur = next;
      if (std::fabs(cur) > kBig) {
        cur /= kBig;
        prev /= kBig;
        lscale += lbig;
      }
    }
    if (cur != 0.0)
      out[k] = {std::log(std::fabs(cur)) + lscale + 0.5 * (k * std::numbers::ln2 + std::lgamma(k + 1.0)),
                cur > 0 ? 1 : -1};
  }
  return out;
}

namespace {

double lfact(int k) { return std::lgamma(k + 1.0); }

// D^k (x^p g^(d))(x) where g = exp(-a x^2); H holds H_m(sqrt(a) x) up to d + k.
LogReal axis_factor(int p, int d, int k, double x, double a, const std::vector<LogReal>& H) {
  const int imax = std::min(k, p);
  const double lx = std::log(std::fabs(x));
  const double la = 0.5 * std::log(a);
  std::vector<LogReal> parts;
  parts.reserve(static_cast<std::size_t>(imax) + 1);
  for (int i = 0; i <= imax; ++i) {
    const int pw = p - i;
    if (pw > 0 && x == 0.0) continue;
    const int order = d + k - i;
    const LogReal& h = H[order];
    if (h.is_zero()) continue;
    LogReal t;
    t.log_abs = lfact(k) - lfact(i) - lfact(k - i) + lfact(p) - lfact(pw) + (pw > 0 ? pw * lx : 0.0) + order * la +
                h.log_abs - a * x * x;
    t.sign = h.sign * ((order % 2) ? -1 : 1) * ((x < 0 && pw % 2) ? -1 : 1);
    parts.push_back(t);
  }
  if (parts.size() == 1) return parts[0];
  return log_sum(parts);
}

double log_abs_complex(const LogReal& re, const LogReal& im) {
  if (re.is_zero() && im.is_zero()) return -kInf;
  if (re.is_zero()) return im.log_abs;
  if (im.is_zero()) return re.log_abs;
  const double hi = std::max(re.log_abs, im.log_abs), lo = std::min(re.log_abs, im.log_abs);
  return hi + 0.5 * std::log1p(std::exp(2.0 * (lo - hi)));
}

struct Accum {
  std::vector<LogReal> re, im;
  void add(Complex coef, const LogReal& prod) {
    if (prod.is_zero()) return;
    if (coef.real() != 0.0) re.push_back(LogReal::from(coef.real()) * prod);
    if (coef.imag() != 0.0) im.push_back(LogReal::from(coef.imag()) * prod);
  }
  std::pair<LogReal, LogReal> sums() const { return {log_sum(re), log_sum(im)}; }
};

using TermKey = std::pair<std::vector<int>, std::vector<int>>;

std::vector<GaussTerm> collect(const std::map<TermKey, Complex>& acc) {
  std::vector<GaussTerm> out;
  for (const auto& [k, c] : acc)
    if (c != Complex(0.0, 0.0)) out.push_back({c, MultiIndex(k.first), MultiIndex(k.second)});
  return out;
}

// one-dimensional pieces: coef, p, d
struct Piece {
  Complex coef;
  int p;
  int d;
};

}  // namespace

TestFunction::TestFunction(double a, std::size_t n, std::vector<GaussTerm> terms) : a_(a), n_(n) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("test function: width a must be positive");
  if (n < 1 || n > 3) throw std::invalid_argument("test function: dimension must be 1, 2 or 3");
  for (auto& t : terms) {
    if (t.p.dim() != n || t.d.dim() != n) throw std::invalid_argument("test function: multi-index dimension mismatch");
    if (t.coef != Complex(0.0, 0.0)) terms_.push_back(std::move(t));
  }
}

int TestFunction::max_p() const {
  int m = 0;
  for (const auto& t : terms_)
    for (std::size_t j = 0; j < n_; ++j) m = std::max(m, t.p[j]);
  return m;
}

int TestFunction::max_d() const {
  int m = 0;
  for (const auto& t : terms_)
    for (std::size_t j = 0; j < n_; ++j) m = std::max(m, t.d[j]);
  return m;
}

Complex TestFunction::value(PointView x) const { return derivative(MultiIndex::zeros(n_), x); }

namespace {
std::pair<LogReal, LogReal> eval_logs(const TestFunction& f, const MultiIndex& alpha, PointView x) {
  const std::size_t n = f.dim();
  if (alpha.dim() != n || x.size() != n) throw std::invalid_argument("derivative: dimension mismatch");
  for (std::size_t j = 0; j < n; ++j)
    if (alpha[j] > TestFunction::kMaxOrder) throw std::invalid_argument("derivative order exceeds the oracle limit");
  const double sa = std::sqrt(f.a());
  std::vector<std::vector<LogReal>> H(n);
  for (std::size_t j = 0; j < n; ++j) H[j] = hermite_log(sa * x[j], alpha[j] + f.max_d());
  Accum acc;
  for (const auto& t : f.terms()) {
    LogReal prod{0.0, 1};
    for (std::size_t j = 0; j < n && !prod.is_zero(); ++j)
      prod = prod * axis_factor(t.p[j], t.d[j], alpha[j], x[j], f.a(), H[j]);
    acc.add(t.coef, prod);
  }
  return acc.sums();
}
}  // namespace

Complex TestFunction::derivative(const MultiIndex& alpha, PointView x) const {
  const auto [re, im] = eval_logs(*this, alpha, x);
  return {re.value(), im.value()};
}

double TestFunction::log_abs_derivative(const MultiIndex& alpha, PointView x) const {
  const auto [re, im] = eval_logs(*this, alpha, x);
  return log_abs_complex(re, im);
}

namespace {
// sum_t coef prod_j z^p (-sqrt a)^d H_d(sqrt a z), without the Gaussian factor
Complex poly_part(const TestFunction& f, PointView x, PointView y) {
  const std::size_t n = f.dim();
  const double sa = std::sqrt(f.a());
  const int D = f.max_d();
  std::vector<std::vector<Complex>> H(n, std::vector<Complex>(static_cast<std::size_t>(D) + 1));
  for (std::size_t j = 0; j < n; ++j) {
    const Complex w = sa * Complex(x[j], y[j]);
    H[j][0] = 1.0;
    if (D >= 1) H[j][1] = 2.0 * w;
    for (int k = 1; k < D; ++k) H[j][k + 1] = 2.0 * w * H[j][k] - 2.0 * k * H[j][k - 1];
  }
  Complex s = 0.0;
  for (const auto& t : f.terms()) {
    Complex prod = t.coef;
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z(x[j], y[j]);
      prod *= std::pow(z, t.p[j]) * std::pow(-sa, t.d[j]) * H[j][t.d[j]];
    }
    s += prod;
  }
  return s;
}

Complex gauss_exponent(double a, PointView x, PointView y) {
  Complex e = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Complex z(x[j], y[j]);
    e += -a * z * z;
  }
  return e;
}
}  // namespace

Complex TestFunction::entire(PointView x, PointView y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("entire: dimension mismatch");
  return poly_part(*this, x, y) * std::exp(gauss_exponent(a_, x, y));
}

double TestFunction::log_abs_entire(PointView x, PointView y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("entire: dimension mismatch");
  const Complex s = poly_part(*this, x, y);
  if (s == Complex(0.0, 0.0)) return -kInf;
  return std::log(std::abs(s)) + gauss_exponent(a_, x, y).real();
}

TestFunction TestFunction::differentiate(const MultiIndex& alpha) const {
  if (alpha.dim() != n_) throw std::invalid_argument("differentiate: dimension mismatch");
  std::map<TermKey, Complex> acc;
  for (const auto& t : terms_) acc[{t.p.entries(), t.d.entries()}] += t.coef;
  for (std::size_t j = 0; j < n_; ++j)
    for (int r = 0; r < alpha[j]; ++r) {
      std::map<TermKey, Complex> next;
      for (const auto& [k, c] : acc) {
        // D(x^p g^(d)) = p x^(p-1) g^(d) + x^p g^(d+1)
        if (k.first[j] > 0) {
          TermKey a = k;
          a.first[j] -= 1;
          next[a] += c * static_cast<double>(k.first[j]);
        }
        TermKey b = k;
        b.second[j] += 1;
        next[b] += c;
      }
      acc = std::move(next);
    }
  return TestFunction(a_, n_, collect(acc));
}

TestFunction TestFunction::fourier_image(int sign) const {
  if (sign != 1 && sign != -1) throw std::invalid_argument("fourier_image: sign must be +1 or -1");
  const double b = 1.0 / (4.0 * a_);
  const Complex unit(0.0, -static_cast<double>(sign));  // -s i
  std::map<TermKey, Complex> acc;
  for (const auto& t : terms_) {
    // per coordinate: (-s i)^(p+d) / sqrt(2a) * sum_i C(p,i) d!/(d-i)! xi^(d-i) g_b^(p-i)
    std::vector<std::vector<Piece>> per(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const int p = t.p[j], d = t.d[j];
      const Complex pre = std::pow(unit, p + d) / std::sqrt(2.0 * a_);
      for (int i = 0; i <= std::min(p, d); ++i) {
        const double c = std::exp(lfact(p) - lfact(i) - lfact(p - i) + lfact(d) - lfact(d - i));
        per[j].push_back({pre * std::round(c), d - i, p - i});
      }
    }
    std::vector<std::size_t> pick(n_, 0);
    for (;;) {
      Complex c = t.coef;
      std::vector<int> pp(n_), dd(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        c *= per[j][pick[j]].coef;
        pp[j] = per[j][pick[j]].p;
        dd[j] = per[j][pick[j]].d;
      }
      acc[{pp, dd}] += c;
      std::size_t j = 0;
      while (j < n_ && ++pick[j] == per[j].size()) pick[j++] = 0;
      if (j == n_) break;
    }
  }
  return TestFunction(b, n_, collect(acc));
}

TestFunction TestFunction::scaled(Complex c) const {
  std::vector<GaussTerm> t = terms_;
  for (auto& x : t) x.coef *= c;
  return TestFunction(a_, n_, std::move(t));
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os << "gaussian_poly a=" << format_double(a_) << " n=" << n_ << " terms=";
  if (terms_.empty()) os << "0";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (i) os << ";";
    os << "(" << format_double(t.coef.real()) << (t.coef.imag() >= 0 ? "+" : "") << format_double(t.coef.imag())
       << "i)x^" << t.p.str() << "D^" << t.d.str();
  }
  return os.str();
}

TestFunction make_test_function(const TestFunctionSpec& spec) {
  if (spec.kind != "gaussian_poly") throw std::invalid_argument("unknown test function kind '" + spec.kind + "'");
  if (!(spec.a > 0.0)) throw std::invalid_argument("test function: width a must be positive");
  std::vector<GaussTerm> terms;
  if (spec.poly.empty())
    terms.push_back({1.0, MultiIndex::zeros(spec.n), MultiIndex::zeros(spec.n)});
  for (const auto& [c, p] : spec.poly) {
    if (p.dim() != spec.n) throw std::invalid_argument("test function: exponent " + p.str() + " has wrong dimension");
    terms.push_back({c, p, MultiIndex::zeros(spec.n)});
  }
  return TestFunction(spec.a, spec.n, std::move(terms));
}

DerivativeTable::DerivativeTable(const TestFunction& f, const TensorGrid& grid, int max_order)
    : f_(&f), grid_(grid), K_(max_order) {
  if (grid.dim() != f.dim()) throw std::invalid_argument("derivative table: dimension mismatch");
  if (max_order < 0 || max_order > TestFunction::kMaxOrder)
    throw std::invalid_argument("derivative order exceeds the oracle limit");
  const double sa = std::sqrt(f.a());
  const std::size_t n = f.dim();
  // Hermite values per axis node are shared by all terms.
  std::vector<std::vector<std::vector<LogReal>>> H(n);
  for (std::size_t j = 0; j < n; ++j)
    for (double x : grid.axis(j)) H[j].push_back(hermite_log(sa * x, K_ + f.max_d()));
  fac_.resize(f.terms().size());
  for (std::size_t t = 0; t < f.terms().size(); ++t) {
    const auto& term = f.terms()[t];
    fac_[t].resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& ax = grid.axis(j);
      auto& tab = fac_[t][j];
      tab.resize((static_cast<std::size_t>(K_) + 1) * ax.size());
      for (int k = 0; k <= K_; ++k)
        for (std::size_t i = 0; i < ax.size(); ++i)
          tab[k * ax.size() + i] = axis_factor(term.p[j], term.d[j], k, ax[i], f.a(), H[j][i]);
    }
  }
}

double DerivativeTable::log_abs(const MultiIndex& alpha, std::size_t flat) const {
  const std::size_t n = grid_.dim();
  std::size_t idx[3];
  {
    std::size_t r = flat;
    for (std::size_t j = n; j-- > 0;) {
      idx[j] = r % grid_.axis(j).size();
      r /= grid_.axis(j).size();
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if (alpha[j] > K_) throw std::invalid_argument("derivative table: order beyond table");
  Accum acc;
  for (std::size_t t = 0; t < fac_.size(); ++t) {
    LogReal prod{0.0, 1};
    for (std::size_t j = 0; j < n && !prod.is_zero(); ++j)
      prod = prod * fac_[t][j][alpha[j] * grid_.axis(j).size() + idx[j]];
    acc.add(f_->terms()[t].coef, prod);
  }
  const auto [re, im] = acc.sums();
  return log_abs_complex(re, im);
}

}  // namespace gslab
