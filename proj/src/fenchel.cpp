#include "gslab/fenchel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gslab {

namespace {

void check_increasing(std::span<const double> a, const char* what) {
  if (a.empty()) throw std::invalid_argument(std::string(what) + ": empty axis");
  for (std::size_t i = 1; i < a.size(); ++i)
    if (!(a[i] > a[i - 1])) throw std::invalid_argument(std::string(what) + ": axis not strictly increasing");
}

void brute_line(std::span<const double> y, std::span<const double> g, std::span<const double> x,
                std::span<LineSup> out) {
  for (std::size_t m = 0; m < x.size(); ++m) {
    double best = x[m] * y[0] - g[0];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < y.size(); ++i) {
      const double v = x[m] * y[i] - g[i];
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out[m] = {best, arg};
  }
}

// Lower convex hull keeping collinear samples, then a monotone walk over the
// sorted dual points. Only strictly larger values advance the pointer, so the
// smallest maximising index wins, as in the brute path.
void fast_line(std::span<const double> y, std::span<const double> g, std::span<const double> x,
               std::span<LineSup> out) {
  std::vector<std::size_t> hull;
  hull.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      // b lies strictly above segment a-i: drop it.
      const double lhs = (g[b] - g[a]) * (y[i] - y[a]);
      const double rhs = (g[i] - g[a]) * (y[b] - y[a]);
      if (lhs > rhs) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  std::size_t k = 0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    double cur = x[m] * y[hull[k]] - g[hull[k]];
    while (k + 1 < hull.size()) {
      const double next = x[m] * y[hull[k + 1]] - g[hull[k + 1]];
      if (next > cur) {
        ++k;
        cur = next;
      } else {
        break;
      }
    }
    out[m] = {cur, hull[k]};
  }
}

double secant(std::span<const double> y, std::span<const double> g, std::size_t i) {
  return (g[i + 1] - g[i]) / (y[i + 1] - y[i]);
}

}  // namespace

void conjugate_line(std::span<const double> y, std::span<const double> g, std::span<const double> x,
                    std::span<LineSup> out, ConjugateMethod method) {
  if (y.empty()) throw std::invalid_argument("conjugate: empty primal grid");
  if (y.size() != g.size()) throw std::invalid_argument("conjugate: value count mismatch");
  if (out.size() != x.size()) throw std::invalid_argument("conjugate: output size mismatch");
  if (method == ConjugateMethod::Brute) {
    brute_line(y, g, x, out);
  } else {
    fast_line(y, g, x, out);
  }
}

double line_grid_error(std::span<const double> y, std::span<const double> g, std::size_t k, double x) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const bool has_l = k > 0;
  const bool has_r = k + 1 < n;
  double err = 0.0;
  if (has_r) {
    const double d = y[k + 1] - y[k];
    double b = kInf;
    if (has_l) b = std::min(b, std::max(0.0, x - secant(y, g, k - 1)) * d);
    if (k + 2 < n) b = std::min(b, std::max(0.0, secant(y, g, k + 1) - x) * d);
    if (b == kInf) b = std::fabs(x - secant(y, g, k)) * d;
    err = std::max(err, b);
  }
  if (has_l) {
    const double d = y[k] - y[k - 1];
    double b = kInf;
    if (has_r) b = std::min(b, std::max(0.0, secant(y, g, k) - x) * d);
    if (k >= 2) b = std::min(b, std::max(0.0, x - secant(y, g, k - 2)) * d);
    if (b == kInf) b = std::fabs(x - secant(y, g, k - 1)) * d;
    err = std::max(err, b);
  }
  return err;
}

std::vector<double> auto_dual_axis(const GridFunction& g, std::size_t axis, std::size_t count) {
  if (g.size() == 0) throw std::invalid_argument("auto_dual_axis: empty grid");
  if (count < 2) throw std::invalid_argument("auto_dual_axis: need at least 2 points");
  const TensorGrid& grid = g.grid();
  const auto& ax = grid.axis(axis);
  const auto shape = grid.shape();
  std::size_t stride = 1;
  for (std::size_t j = axis + 1; j < shape.size(); ++j) stride *= shape[j];
  double lo = kInf, hi = -kInf;
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const std::size_t i = (flat / stride) % ax.size();
    if (i + 1 == ax.size()) continue;
    const double s = (g[flat + stride] - g[flat]) / (ax[i + 1] - ax[i]);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  double pad = 0.1 * (hi - lo);
  if (pad == 0.0) pad = std::max(1.0, 0.1 * std::fabs(hi));
  lo -= pad;
  hi += pad;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  out.back() = hi;
  return out;
}

TensorGrid auto_dual_grid(const GridFunction& g, std::size_t count) {
  std::vector<std::vector<double>> axes;
  for (std::size_t j = 0; j < g.dim(); ++j) axes.push_back(auto_dual_axis(g, j, count));
  return TensorGrid(std::move(axes));
}

namespace {

// Sum over axes of the 1-d bound along the line through the argmax.
double nd_grid_error(const GridFunction& g, std::size_t arg, PointView x) {
  const TensorGrid& grid = g.grid();
  const auto idx = grid.unravel(arg);
  const auto shape = grid.shape();
  double err = 0.0;
  std::vector<double> line;
  for (std::size_t j = 0; j < grid.dim(); ++j) {
    std::size_t stride = 1;
    for (std::size_t i = j + 1; i < shape.size(); ++i) stride *= shape[i];
    const std::size_t base = arg - idx[j] * stride;
    line.resize(shape[j]);
    for (std::size_t i = 0; i < shape[j]; ++i) line[i] = g[base + i * stride];
    err += line_grid_error(grid.axis(j), line, idx[j], x[j]);
  }
  return err;
}

ConjugateResult finish(const GridFunction& g, const TensorGrid& dual, std::vector<double> values,
                       std::vector<std::size_t> argmax, ConjugateMethod method) {
  ConjugateResult r;
  r.method = method;
  r.boundary_attained.resize(argmax.size());
  r.grid_error.resize(argmax.size());
  Point x;
  for (std::size_t m = 0; m < argmax.size(); ++m) {
    dual.point_into(m, x);
    r.boundary_attained[m] = g.grid().on_boundary(argmax[m]) ? 1 : 0;
    r.grid_error[m] = nd_grid_error(g, argmax[m], x);
  }
  r.dual = GridFunction(dual, std::move(values));
  r.argmax = std::move(argmax);
  return r;
}

}  // namespace

ConjugateResult conjugate_1d(const GridFunction& g, std::span<const double> dual_axis, ConjugateMethod method) {
  if (g.size() == 0) throw std::invalid_argument("conjugate_1d: empty grid");
  if (g.dim() != 1) throw std::invalid_argument("conjugate_1d: function is not one-dimensional");
  check_increasing(dual_axis, "conjugate_1d");
  std::vector<LineSup> out(dual_axis.size());
  conjugate_line(g.grid().axis(0), g.values(), dual_axis, out, method);
  std::vector<double> values(out.size());
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    values[m] = out[m].value;
    argmax[m] = out[m].argmax;
  }
  TensorGrid dual({std::vector<double>(dual_axis.begin(), dual_axis.end())});
  return finish(g, dual, std::move(values), std::move(argmax), method);
}

ConjugateResult conjugate_nd(const GridFunction& g, const TensorGrid& dual, ConjugateMethod method) {
  if (g.size() == 0) throw std::invalid_argument("conjugate_nd: empty grid");
  const std::size_t n = g.dim();
  if (dual.dim() != n) throw std::invalid_argument("conjugate_nd: dimension mismatch");
  if (n > 3) throw std::invalid_argument("conjugate_nd: dimension above 3");
  if (n == 1) return conjugate_1d(g, dual.axis(0), method);

  // cur holds W_k = sup over y_0..y_{k-1} of (sum x_j y_j - g); stored with
  // axes 0..k-1 dual-sized and the rest primal-sized.
  std::vector<std::size_t> shape = g.grid().shape();
  std::vector<double> cur(g.values().size());
  for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = -g[i];
  std::vector<std::vector<std::size_t>> stage_arg(n);
  std::vector<std::vector<std::size_t>> stage_shape(n);

  for (std::size_t k = 0; k < n; ++k) {
    const auto& y = g.grid().axis(k);
    const auto& x = dual.axis(k);
    std::size_t outer = 1, inner = 1;
    for (std::size_t j = 0; j < k; ++j) outer *= shape[j];
    for (std::size_t j = k + 1; j < n; ++j) inner *= shape[j];
    std::vector<double> next(outer * x.size() * inner);
    std::vector<std::size_t> arg(next.size());
    std::vector<double> line(y.size());
    std::vector<LineSup> res(x.size());
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        for (std::size_t i = 0; i < y.size(); ++i) line[i] = -cur[(o * y.size() + i) * inner + in];
        conjugate_line(y, line, x, res, method);
        for (std::size_t m = 0; m < x.size(); ++m) {
          const std::size_t dst = (o * x.size() + m) * inner + in;
          next[dst] = res[m].value;
          arg[dst] = res[m].argmax;
        }
      }
    }
    shape[k] = x.size();
    stage_shape[k] = shape;
    stage_arg[k] = std::move(arg);
    cur = std::move(next);
  }

  // Backtrack the primal argmax, last axis first.
  const auto primal_shape = g.grid().shape();
  std::vector<std::size_t> argmax(cur.size());
  std::vector<std::size_t> idx(n);
  for (std::size_t flat = 0; flat < cur.size(); ++flat) {
    std::size_t f = flat;
    for (std::size_t j = n; j-- > 0;) {
      idx[j] = f % dual.axis(j).size();
      f /= dual.axis(j).size();
    }
    for (std::size_t k = n; k-- > 0;) {
      // In stage k's output, axes < k are dual-indexed, axis k dual, axes > k primal.
      const auto& sh = stage_shape[k];
      std::size_t pos = 0;
      for (std::size_t j = 0; j < n; ++j) pos = pos * sh[j] + idx[j];
      idx[k] = stage_arg[k][pos];
    }
    std::size_t p = 0;
    for (std::size_t j = 0; j < n; ++j) p = p * primal_shape[j] + idx[j];
    argmax[flat] = p;
  }
  return finish(g, dual, std::move(cur), std::move(argmax), method);
}

ConjugateResult conjugate_nd_joint(const GridFunction& g, const TensorGrid& dual) {
  if (g.size() == 0) throw std::invalid_argument("conjugate_nd_joint: empty grid");
  if (dual.dim() != g.dim()) throw std::invalid_argument("conjugate_nd_joint: dimension mismatch");
  std::vector<Point> pts(dual.size());
  for (std::size_t m = 0; m < pts.size(); ++m) pts[m] = dual.point(m);
  const auto sups = conjugate_at(g, pts);
  std::vector<double> values(sups.size());
  std::vector<std::size_t> argmax(sups.size());
  for (std::size_t m = 0; m < sups.size(); ++m) {
    values[m] = sups[m].value;
    argmax[m] = sups[m].argmax;
  }
  return finish(g, dual, std::move(values), std::move(argmax), ConjugateMethod::Brute);
}

std::vector<PointSup> conjugate_at(const GridFunction& g, std::span<const Point> points) {
  if (g.size() == 0) throw std::invalid_argument("conjugate_at: empty grid");
  const TensorGrid& grid = g.grid();
  const std::size_t n = grid.dim();
  std::vector<Point> prim(g.size());
  for (std::size_t i = 0; i < prim.size(); ++i) prim[i] = grid.point(i);
  std::vector<PointSup> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    if (x.size() != n) throw std::invalid_argument("conjugate_at: dimension mismatch");
    double best = -kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < prim.size(); ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += x[j] * prim[i][j];
      v -= g[i];
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out.push_back({best, arg, grid.on_boundary(arg), nd_grid_error(g, arg, x)});
  }
  return out;
}

PointSup conjugate_at(const GridFunction& g, PointView x) {
  const Point p(x.begin(), x.end());
  return conjugate_at(g, std::span<const Point>(&p, 1)).front();
}

Evaluator log_substitution(Evaluator u) {
  return [u = std::move(u)](PointView x) {
    Point e(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) e[j] = std::exp(x[j]);
    return u(e);
  };
}

GridFunction biconjugate(const GridFunction& g, std::size_t dual_count, ConjugateMethod method) {
  if (g.size() == 0) throw std::invalid_argument("biconjugate: empty grid");
  if (dual_count == 0) {
    std::size_t nmax = 0;
    for (auto s : g.grid().shape()) nmax = std::max(nmax, s);
    dual_count = g.dim() == 1 ? 8 * nmax : 2 * nmax;
  }
  TensorGrid dual = auto_dual_grid(g, dual_count);
  if (g.dim() == 1) {
    // with the lower-hull edge slopes on the dual axis, (g*)* is the exact hull of the samples
    std::vector<double> ax = dual.axis(0);
    const auto& y = g.grid().axis(0);
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(g[i])) continue;
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2], b = hull.back();
        if ((g[b] - g[a]) * (y[i] - y[a]) >= (g[i] - g[a]) * (y[b] - y[a]))
          hull.pop_back();
        else
          break;
      }
      hull.push_back(i);
    }
    for (std::size_t k = 0; k + 1 < hull.size(); ++k)
      ax.push_back((g[hull[k + 1]] - g[hull[k]]) / (y[hull[k + 1]] - y[hull[k]]));
    std::sort(ax.begin(), ax.end());
    std::vector<double> uniq;
    for (double v : ax)
      if (uniq.empty() || v - uniq.back() > 1e-12 * std::max(1.0, std::fabs(v))) uniq.push_back(v);
    dual = TensorGrid({uniq});
  }
  const ConjugateResult star = conjugate_nd(g, dual, method);
  const ConjugateResult back = conjugate_nd(star.dual, g.grid(), method);
  return GridFunction(g.grid(), back.dual.values(), g.policy());
}

}  // namespace gslab
