#include "gslab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

namespace gslab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> window_axis(double lo, double step, std::size_t N) {
  std::vector<double> ax(N);
  for (std::size_t j = 0; j < N; ++j) ax[j] = lo + static_cast<double>(j) * step;
  return ax;
}
}  // namespace

void FourierParams::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("fourier: dimension must be 1, 2 or 3");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("fourier: L must be positive");
  if (N < 16 || (N & (N - 1)) != 0) throw std::invalid_argument("fourier: N must be a power of two >= 16");
}

TensorGrid FourierParams::spatial_grid() const {
  validate();
  return TensorGrid(std::vector<std::vector<double>>(n, window_axis(-L, step(), N)));
}

TensorGrid FourierParams::dual_grid() const {
  validate();
  const double eta = std::numbers::pi / L;
  return TensorGrid(std::vector<std::vector<double>>(n, window_axis(-(static_cast<double>(N) / 2.0) * eta, eta, N)));
}

FourierParams FourierParams::dual() const {
  FourierParams d = *this;
  d.L = std::numbers::pi / step();
  d.direction = direction == Direction::Forward ? Direction::Inverse : Direction::Forward;
  return d;
}

void ComplexSamples::write_csv(std::ostream& os) const {
  const std::size_t n = grid.dim();
  for (std::size_t j = 0; j < n; ++j) os << 'x' << (j + 1) << ',';
  os << "re,im\n";
  Point p;
  for (std::size_t i = 0; i < values.size(); ++i) {
    grid.point_into(i, p);
    for (double c : p) os << format_double(c) << ',';
    os << format_double(values[i].real()) << ',' << format_double(values[i].imag()) << '\n';
  }
}

void ComplexSamples::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os);
}

ComplexSamples sample(const std::function<Complex(PointView)>& f, const TensorGrid& grid) {
  ComplexSamples s{grid, std::vector<Complex>(grid.size())};
  Point x;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point_into(i, x);
    s.values[i] = f(x);
  }
  return s;
}

ComplexSamples sample(const TestFunction& f, const TensorGrid& grid) {
  return sample([&f](PointView x) { return f.value(x); }, grid);
}

TransformResult fourier_transform(const ComplexSamples& in, const FourierParams& p, double warn_level,
                                  double fail_level) {
  p.validate();
  const TensorGrid g = p.spatial_grid();
  if (in.grid.dim() != p.n || in.values.size() != g.size())
    throw std::invalid_argument("fourier: samples do not match the window");
  for (std::size_t j = 0; j < p.n; ++j) {
    const auto& a = in.grid.axis(j);
    const auto& b = g.axis(j);
    if (std::fabs(a.front() - b.front()) > 1e-9 * p.L || std::fabs(a.back() - b.back()) > 1e-9 * p.L)
      throw std::invalid_argument("fourier: samples are not on the window x_j = -L + j*step");
  }

  TransformResult r;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.on_boundary(i)) r.edge_max = std::max(r.edge_max, std::abs(in.values[i]));
  if (r.edge_max > fail_level)
    throw EdgeDecayError("fourier: |f| = " + format_double(r.edge_max) + " on the window edge exceeds " +
                         format_double(fail_level));
  if (r.edge_max > warn_level)
    r.warnings.push_back("|f| = " + format_double(r.edge_max) + " on the window edge exceeds " +
                         format_double(warn_level));

  const double s = p.direction == Direction::Forward ? 1.0 : -1.0;
  const std::size_t N = p.N;
  const double delta = p.step();
  const double scale = delta / std::sqrt(2.0 * std::numbers::pi);
  const std::vector<double> xi = p.dual_grid().axis(0);
  std::vector<Complex> phase(N);
  for (std::size_t k = 0; k < N; ++k) phase[k] = scale * std::polar(1.0, s * (-p.L) * xi[k]);

  fftw_complex* buf = fftw_alloc_complex(N);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(N), buf, buf, s > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  std::vector<Complex> data = in.values;
  // axis by axis: lines along axis j have stride prod of later extents
  for (std::size_t j = 0; j < p.n; ++j) {
    std::size_t stride = 1;
    for (std::size_t q = j + 1; q < p.n; ++q) stride *= N;
    const std::size_t outer = data.size() / (N * stride);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t in_ = 0; in_ < stride; ++in_) {
        const std::size_t base = o * N * stride + in_;
        for (std::size_t t = 0; t < N; ++t) {
          const Complex v = data[base + t * stride] * ((t % 2) ? -1.0 : 1.0);
          buf[t][0] = v.real();
          buf[t][1] = v.imag();
        }
        fftw_execute(plan);
        for (std::size_t k = 0; k < N; ++k) data[base + k * stride] = phase[k] * Complex(buf[k][0], buf[k][1]);
      }
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  r.out = ComplexSamples{p.dual_grid(), std::move(data)};
  return r;
}

double l2_norm(const ComplexSamples& s) {
  double w = 1.0;
  for (const auto& ax : s.grid.axes()) w *= ax[1] - ax[0];
  double acc = 0.0;
  for (const auto& v : s.values) acc += std::norm(v);
  return std::sqrt(acc * w);
}

double max_abs_diff(const ComplexSamples& a, const ComplexSamples& b, double radius) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  Point x;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    a.grid.point_into(i, x);
    bool inside = true;
    for (double v : x) inside = inside && std::fabs(v) <= radius;
    if (inside) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

Complex entire_extension(const TestFunction& f, PointView x, PointView y, double trunc_tol, int budget) {
  const std::size_t n = f.dim();
  if (x.size() != n || y.size() != n) throw std::invalid_argument("entire_extension: dimension mismatch");
  bool real = true;
  for (double v : y) real = real && v == 0.0;
  if (real) return f.value(x);
  if (f.is_zero()) return 0.0;
  Complex sum = 0.0;
  int quiet = 0;
  const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k <= budget; ++k) {
    Complex shell_sum = 0.0;
    for (const auto& al : shell(n, k)) {
      bool zero = false;
      double lw = -log_factorial(al);
      double sg = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (al[j] == 0) continue;
        if (y[j] == 0.0) {
          zero = true;
          break;
        }
        lw += al[j] * std::log(std::fabs(y[j]));
        if (y[j] < 0 && al[j] % 2) sg = -sg;
      }
      if (zero) continue;
      const double ld = f.log_abs_derivative(al, x);
      if (ld == -kInf) continue;
      const Complex d = f.derivative(al, x);
      const Complex unit = d / std::abs(d);
      shell_sum += sg * std::exp(ld + lw) * unit * ipow[k % 4];
    }
    sum += shell_sum;
    if (k > 0 && std::abs(shell_sum) < trunc_tol * std::abs(sum)) {
      if (++quiet >= 3) return sum;
    } else {
      quiet = 0;
    }
  }
  throw std::runtime_error("entire_extension: Taylor sum did not converge within " + std::to_string(budget) +
                           " shells");
}

}  // namespace gslab
