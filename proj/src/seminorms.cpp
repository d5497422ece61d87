#include <cmath>
#include <stdexcept>

#include "gslab/spaces.hpp"

namespace gslab {

using nlohmann::ordered_json;

namespace {

ordered_json grid_json(const TensorGrid& g) {
  ordered_json a = ordered_json::array();
  for (const auto& ax : g.axes()) a.push_back({{"lo", ax.front()}, {"hi", ax.back()}, {"count", ax.size()}});
  return a;
}

bool on_edge(const TensorGrid& g, const Point& x) {
  if (x.size() != g.dim()) return false;
  for (std::size_t j = 0; j < g.dim(); ++j)
    if (x[j] == g.axis(j).front() || x[j] == g.axis(j).back()) return true;
  return false;
}

// axis indices of every flat node
std::vector<std::size_t> node_indices(const TensorGrid& g) {
  const std::size_t n = g.dim();
  std::vector<std::size_t> out(g.size() * n);
  for (std::size_t f = 0; f < g.size(); ++f) {
    std::size_t r = f;
    for (std::size_t j = n; j-- > 0;) {
      out[f * n + j] = r % g.axis(j).size();
      r /= g.axis(j).size();
    }
  }
  return out;
}

double norm2(PointView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Point as_point(const MultiIndex& b) {
  Point p(b.dim());
  for (std::size_t j = 0; j < b.dim(); ++j) p[j] = b[j];
  return p;
}

struct ShellState {
  double sup = -kInf;
  double prev1 = kInf, prev2 = kInf;
  int stable = 0;
  bool stabilized = false;

  // returns true when the sweep may stop
  bool update(double shell_max, const SweepParams& sp) {
    double change = 0.0;
    if (shell_max > sup) change = sup == -kInf ? kInf : std::expm1(shell_max - sup);
    // Derivative maxima of even functions alternate with the parity of the
    // order, so compare against the larger of the two previous shells.
    const bool decreasing = shell_max < std::max(prev1, prev2);
    if (change < sp.rel_tol && decreasing)
      ++stable;
    else
      stable = 0;
    prev2 = prev1;
    prev1 = shell_max;
    sup = std::max(sup, shell_max);
    if (stable >= sp.stable_shells) stabilized = true;
    return stabilized;
  }
};

SeminormReport zero_report(const std::string& which, int m, const TensorGrid& g) {
  SeminormReport r;
  r.which = which;
  r.m = m;
  r.value = 0.0;
  r.log_value = -kInf;
  r.stabilized = true;
  r.shells = 1;
  r.grid = g;
  r.shell_max = {-kInf};
  return r;
}

template <class Run>
SeminormReport widening(const TensorGrid& g0, const SweepParams& sp, Run run) {
  TensorGrid g = g0;
  SeminormReport r;
  for (int w = 0;; ++w) {
    r = run(g);
    r.widenings = w;
    r.boundary_binding = on_edge(g, r.binding_x);
    if (!r.boundary_binding || w >= sp.max_widen || r.log_value == -kInf) break;
    g = g.scaled(sp.widen);
  }
  return r;
}

// beta sweep shared by the G seminorm and the moment bound: the x factor is
// |x_j|^beta_j or (1+|x_j|)^beta_j
SeminormReport beta_sweep(const std::string& which, const TestFunction& f, const IndexWeight& h, int m,
                          const TensorGrid& grid, const SweepParams& sp, bool shifted) {
  const std::size_t n = f.dim();
  if (grid.dim() != n) throw std::invalid_argument(which + ": grid dimension mismatch");
  if (m < 0 || m > TestFunction::kMaxOrder) throw std::invalid_argument(which + ": m exceeds the oracle order");
  if (f.is_zero()) return zero_report(which, m, grid);
  return widening(grid, sp, [&](const TensorGrid& g) {
    const DerivativeTable T(f, g, m);
    const auto idx = node_indices(g);
    std::vector<double> lmax(g.size(), -kInf);
    std::vector<MultiIndex> arg(g.size(), MultiIndex::zeros(n));
    for (int k = 0; k <= m; ++k)
      for (const auto& al : shell(n, k))
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double v = T.log_abs(al, i);
          if (v > lmax[i]) {
            lmax[i] = v;
            arg[i] = al;
          }
        }
    std::vector<std::vector<double>> lx(n);
    for (std::size_t j = 0; j < n; ++j)
      for (double x : g.axis(j)) lx[j].push_back(shifted ? std::log1p(std::fabs(x)) : std::log(std::fabs(x)));

    SeminormReport r;
    r.which = which;
    r.m = m;
    r.grid = g;
    ShellState st;
    for (int k = 0; k <= sp.budget; ++k) {
      double best = -kInf;
      MultiIndex bb;
      std::size_t bi = 0;
      for (const auto& be : shell(n, k)) {
        const double hb = h(as_point(be)) - log_factorial(be);
        for (std::size_t i = 0; i < g.size(); ++i) {
          double v = lmax[i] + hb;
          for (std::size_t j = 0; j < n; ++j)
            if (be[j]) v += be[j] * lx[j][idx[i * n + j]];
          if (v > best) {
            best = v;
            bb = be;
            bi = i;
          }
        }
      }
      r.shell_max.push_back(best);
      r.shells = k + 1;
      if (best > r.log_value) {
        r.log_value = best;
        r.binding_beta = bb;
        r.binding_alpha = arg[bi];
        r.binding_x = g.point(bi);
      }
      if (st.update(best, sp)) break;
    }
    r.stabilized = st.stabilized;
    r.diverging = !st.stabilized;
    r.value = std::exp(r.log_value);
    return r;
  });
}

}  // namespace

ordered_json to_json(const SeminormReport& r) {
  ordered_json j;
  j["seminorm"] = r.which;
  j["family"] = r.family_ref;
  j["nu"] = r.nu;
  j["m"] = r.m;
  j["value"] = r.value;
  j["log_value"] = std::isfinite(r.log_value) ? ordered_json(r.log_value) : ordered_json(nullptr);
  j["diverging"] = r.diverging;
  j["stabilized"] = r.stabilized;
  j["binding_alpha"] = r.binding_alpha.entries();
  j["binding_beta"] = r.binding_beta.entries();
  j["binding_x"] = r.binding_x;
  if (!r.binding_y.empty()) j["binding_y"] = r.binding_y;
  j["shells"] = r.shells;
  j["widenings"] = r.widenings;
  j["boundary_binding"] = r.boundary_binding;
  j["grid"] = r.grid.dim() ? grid_json(r.grid) : ordered_json::array();
  if (r.y_grid.dim()) j["y_grid"] = grid_json(r.y_grid);
  j["note"] = "grid supremum, a lower bound for the true supremum";
  return j;
}

TensorGrid default_space_grid(std::size_t n) {
  static const std::size_t counts[] = {0, 481, 41, 13};
  if (n < 1 || n > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  return TensorGrid::uniform(n, -12.0, 12.0, counts[n]);
}

SeminormReport seminorm_G(const TestFunction& f, const IndexWeight& h, int m, const TensorGrid& grid,
                          const SweepParams& sp) {
  return beta_sweep("G", f, h, m, grid, sp, false);
}

SeminormReport weighted_moment_bound(const TestFunction& f, const IndexWeight& h, int m, const TensorGrid& grid,
                                     int budget) {
  SweepParams sp;
  sp.budget = budget;
  sp.max_widen = 0;
  SeminormReport r = beta_sweep("moment", f, h, m, grid, sp, true);
  r.diverging = !std::isfinite(r.value) || std::isnan(r.log_value);
  return r;
}

SeminormReport seminorm_rho(const TestFunction& f, const IndexWeight& h, int m, const TensorGrid& grid,
                            const SweepParams& sp) {
  const std::size_t n = f.dim();
  if (grid.dim() != n) throw std::invalid_argument("rho: grid dimension mismatch");
  if (m < 0) throw std::invalid_argument("rho: m must be nonnegative");
  if (f.is_zero()) return zero_report("rho", m, grid);
  return widening(grid, sp, [&](const TensorGrid& g) {
    const DerivativeTable T(f, g, sp.budget);
    std::vector<double> wx(g.size());
    Point x;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point_into(i, x);
      wx[i] = m * std::log1p(norm2(x));
    }
    SeminormReport r;
    r.which = "rho";
    r.m = m;
    r.grid = g;
    ShellState st;
    for (int k = 0; k <= sp.budget; ++k) {
      double best = -kInf;
      MultiIndex ba;
      std::size_t bi = 0;
      for (const auto& al : shell(n, k)) {
        const double ha = h(as_point(al)) - log_factorial(al);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double v = wx[i] + T.log_abs(al, i) + ha;
          if (v > best) {
            best = v;
            ba = al;
            bi = i;
          }
        }
      }
      r.shell_max.push_back(best);
      r.shells = k + 1;
      if (best > r.log_value) {
        r.log_value = best;
        r.binding_alpha = ba;
        r.binding_x = g.point(bi);
      }
      if (st.update(best, sp)) break;
    }
    r.binding_beta = MultiIndex::zeros(n);
    r.stabilized = st.stabilized;
    r.diverging = !st.stabilized;
    r.value = std::exp(r.log_value);
    return r;
  });
}

SeminormReport seminorm_q(const TestFunction& f, const Evaluator& M, int m, const TensorGrid& grid,
                          const SweepParams& sp) {
  const std::size_t n = f.dim();
  if (grid.dim() != n) throw std::invalid_argument("q: grid dimension mismatch");
  if (m < 0 || m > TestFunction::kMaxOrder) throw std::invalid_argument("q: m exceeds the oracle order");
  if (f.is_zero()) return zero_report("q", m, grid);
  SeminormReport r = widening(grid, sp, [&](const TensorGrid& g) {
    const DerivativeTable T(f, g, m);
    SeminormReport out;
    out.which = "q";
    out.m = m;
    out.grid = g;
    std::vector<double> Mx(g.size());
    Point x;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point_into(i, x);
      Mx[i] = M(x);
    }
    for (int k = 0; k <= m; ++k) {
      double best = -kInf;
      for (const auto& al : shell(n, k))
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double v = Mx[i] + T.log_abs(al, i);
          best = std::max(best, v);
          if (v > out.log_value) {
            out.log_value = v;
            out.binding_alpha = al;
            out.binding_x = g.point(i);
          }
        }
      out.shell_max.push_back(best);
    }
    out.shells = m + 1;
    out.value = std::exp(out.log_value);
    return out;
  });
  r.binding_beta = MultiIndex::zeros(n);
  // a supremum that keeps sitting on the edge of ever wider grids is not attained
  r.diverging = r.boundary_binding || !std::isfinite(r.value);
  r.stabilized = !r.diverging;
  return r;
}

SeminormReport seminorm_p(const LogAbsComplexEvaluator& F, const Evaluator& phi, int m, const TensorGrid& x_grid,
                          const TensorGrid& y_grid, const SweepParams& sp) {
  const std::size_t n = x_grid.dim();
  if (y_grid.dim() != n) throw std::invalid_argument("p: grid dimension mismatch");
  if (m < 0) throw std::invalid_argument("p: m must be nonnegative");
  TensorGrid gx = x_grid, gy = y_grid;
  SeminormReport r;
  for (int w = 0;; ++w) {
    std::vector<double> ph(gy.size());
    Point x, y, z(2 * n);
    for (std::size_t k = 0; k < gy.size(); ++k) {
      gy.point_into(k, y);
      ph[k] = phi(y);
    }
    r = SeminormReport{};
    r.which = "p";
    r.m = m;
    r.grid = gx;
    r.y_grid = gy;
    std::size_t bi = 0, bk = 0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx.point_into(i, x);
      for (std::size_t k = 0; k < gy.size(); ++k) {
        gy.point_into(k, y);
        double zz = 0.0;
        for (std::size_t j = 0; j < n; ++j) zz += x[j] * x[j] + y[j] * y[j];
        const double v = F(x, y) + m * std::log1p(std::sqrt(zz)) - ph[k];
        if (v > r.log_value) {
          r.log_value = v;
          bi = i;
          bk = k;
        }
      }
    }
    r.shells = 1;
    r.widenings = w;
    if (r.log_value == -kInf) {
      r.binding_x = gx.point(0);
      r.binding_y = gy.point(0);
      r.stabilized = true;
      r.value = 0.0;
      return r;
    }
    r.binding_x = gx.point(bi);
    r.binding_y = gy.point(bk);
    r.boundary_binding = on_edge(gx, r.binding_x) || on_edge(gy, r.binding_y);
    if (!r.boundary_binding || w >= sp.max_widen) break;
    if (on_edge(gx, r.binding_x)) gx = gx.scaled(sp.widen);
    if (on_edge(gy, r.binding_y)) gy = gy.scaled(sp.widen);
  }
  r.binding_alpha = MultiIndex::zeros(n);
  r.binding_beta = MultiIndex::zeros(n);
  r.value = std::exp(r.log_value);
  r.diverging = r.boundary_binding || !std::isfinite(r.value);
  r.stabilized = !r.diverging;
  return r;
}

double log_derivative_growth(const TestFunction& f, double eps, const TensorGrid& grid, int max_order) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (f.is_zero()) return -kInf;
  const DerivativeTable T(f, grid, max_order);
  double best = -kInf;
  for (int k = 0; k <= max_order; ++k)
    for (const auto& al : shell(f.dim(), k)) {
      const double w = -k * std::log(eps) - log_factorial(al);
      for (std::size_t i = 0; i < grid.size(); ++i) best = std::max(best, T.log_abs(al, i) + w);
    }
  return best;
}

}  // namespace gslab
