#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gslab/gridcore.hpp"

namespace gslab {

enum class ConjugateMethod { Brute, Fast };

struct ConjugateResult {
  GridFunction dual;
  std::vector<std::size_t> argmax;      // flat primal index per dual point
  std::vector<char> boundary_attained;  // argmax on the primal grid boundary
  // Upper bound on (true sup over the sampled box) - (discrete sup), valid
  // when the samples come from a convex function; summed over axes for n > 1.
  std::vector<double> grid_error;
  ConjugateMethod method = ConjugateMethod::Fast;
};

// Sup of (x * y_i - g_i) over a single line of samples.
struct LineSup {
  double value;
  std::size_t argmax;
};

// Core 1-d kernel. y strictly increasing, x strictly increasing.
void conjugate_line(std::span<const double> y, std::span<const double> g, std::span<const double> x,
                    std::span<LineSup> out, ConjugateMethod method);

// Neighbouring-slope bound on the discretisation error at dual point x when
// the discrete argmax is sample k.
double line_grid_error(std::span<const double> y, std::span<const double> g, std::size_t k, double x);

// Dual axis spanning the range of divided differences of g along `axis`,
// padded by 10% of the range.
std::vector<double> auto_dual_axis(const GridFunction& g, std::size_t axis, std::size_t count);
TensorGrid auto_dual_grid(const GridFunction& g, std::size_t count);

ConjugateResult conjugate_1d(const GridFunction& g, std::span<const double> dual_axis,
                             ConjugateMethod method = ConjugateMethod::Fast);
// Coordinate-by-coordinate partial conjugates.
ConjugateResult conjugate_nd(const GridFunction& g, const TensorGrid& dual,
                             ConjugateMethod method = ConjugateMethod::Fast);
// Joint sup over every primal sample; the oracle for conjugate_nd.
ConjugateResult conjugate_nd_joint(const GridFunction& g, const TensorGrid& dual);

struct PointSup {
  double value;
  std::size_t argmax;
  bool boundary;
  double grid_error;
};
// Brute-force discrete conjugate at arbitrary dual points.
std::vector<PointSup> conjugate_at(const GridFunction& g, std::span<const Point> points);
PointSup conjugate_at(const GridFunction& g, PointView x);

Evaluator log_substitution(Evaluator u);

// (g*)* on g's own grid. dual_count = 0 picks 8N (n = 1) or 2N per axis.
GridFunction biconjugate(const GridFunction& g, std::size_t dual_count = 0,
                         ConjugateMethod method = ConjugateMethod::Fast);

}  // namespace gslab
