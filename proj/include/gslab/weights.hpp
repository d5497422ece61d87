#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gslab/gridcore.hpp"

namespace gslab {

struct MFamilySpec {
  std::string kind = "power";
  double p = 2.0;
  double scale_base = 2.0;
  std::size_t n = 1;

  void validate() const;
};

// Closed forms of the power family M_nu(x) = sum_j (|x_j| / s^nu)^p and the
// functions derived from it. All are separable sums over coordinates.
class PowerFamily {
 public:
  explicit PowerFamily(MFamilySpec spec);

  const MFamilySpec& spec() const { return spec_; }
  double q() const { return q_; }
  // Coefficient of M_nu^*(xi) = c_nu sum |xi_j|^q.
  double c(int nu) const;

  double M(int nu, PointView x) const;
  double phi_M(int nu, PointView xi) const;  // M_nu^*
  double psi(int nu, PointView t) const;     // phi_M(e^{|t_1|}, ..., e^{|t_n|})
  double h(int nu, PointView x) const;       // psi^*
  double h_star(int nu, PointView t) const;  // equals psi
  double phi(int nu, PointView x) const;     // h^*(ln(1+|x_1|), ...)
  double phi_star(int nu, PointView xi) const;

  double h1(int nu, double s) const;         // one-coordinate term of h
  double phi_star1(int nu, double s) const;  // one-coordinate term of phi^*

 private:
  MFamilySpec spec_;
  double q_;
};

struct ShiftConstants {
  double gamma = 0.0;      // max(0, gamma_raw)
  double gamma_raw = 0.0;  // grid max of ln2 sum x - (h_nu - h_{nu+1})
  double l = 0.0;
  std::map<int, double> A;  // M -> A_{nu,M}
  std::map<int, double> b;  // a -> b_{nu,a} = h_nu(a,...,a) + l
};

struct BuildTraceEntry {
  int nu = 0;
  GridFunction h_grid;  // discrete conjugate of sampled psi_nu
  double max_rel_dev = 0.0;
  Point worst_x;
  double j4_max_slack = 0.0;  // max over grid of M_{nu+1}(2x) - M_nu(x)
};

class TableModel;

class WeightFamily {
 public:
  static constexpr int kClosedFormIndexCap = 64;

  static WeightFamily power(MFamilySpec spec, int nu_max);
  // tables[k] holds h_{k+1}; the validated range is 1..tables.size()-1 since
  // conditions 5 and 6 need the next index.
  static WeightFamily from_tables(std::vector<GridFunction> tables, std::string label);
  static WeightFamily from_table_dir(const std::string& dir, int count = 0);

  std::size_t dim() const { return n_; }
  int nu_max() const { return nu_max_; }
  int max_index() const;
  const std::string& label() const { return label_; }
  bool closed_form() const { return power_.has_value(); }
  const PowerFamily* power_model() const { return power_ ? &*power_ : nullptr; }

  double h(int nu, PointView x) const;
  double h_star(int nu, PointView t) const;
  double phi(int nu, PointView x) const;
  double phi_star(int nu, PointView xi) const;
  Evaluator h_evaluator(int nu) const;
  Evaluator phi_evaluator(int nu) const;
  Evaluator phi_star_evaluator(int nu) const;

  bool has_constants(int nu) const { return constants_.count(nu) != 0; }
  const ShiftConstants& constants(int nu) const;
  void set_constants(int nu, ShiftConstants c) { constants_[nu] = std::move(c); }

  const std::vector<BuildTraceEntry>& build_trace() const { return trace_; }
  void set_build_trace(std::vector<BuildTraceEntry> t) { trace_ = std::move(t); }

  void check_index(int nu) const;

 private:
  std::size_t n_ = 1;
  int nu_max_ = 1;
  std::string label_;
  std::optional<PowerFamily> power_;
  std::shared_ptr<const TableModel> table_;
  std::map<int, ShiftConstants> constants_;
  std::vector<BuildTraceEntry> trace_;
};

struct BuildGrids {
  double x_max = 30.0;
  std::size_t x_count = 0;  // 0: 301 / 61 / 21 for n = 1 / 2 / 3
  std::size_t t_count = 0;  // 0: 4001 / 401 / 121
};

WeightFamily build_family_from_M(const MFamilySpec& spec, int nu_max, const BuildGrids& grids = {});

// Geometric [0,30]^n grid with 301 / 61 / 21 points per axis.
TensorGrid default_validation_grid(std::size_t n);

Evaluator phi_from_h(const WeightFamily& family, int nu, const TensorGrid* validation = nullptr);

struct ConditionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;
  Point where;
  std::string note;
};

struct ConditionReport {
  std::string family;
  int nu = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::size_t grid_points = 0;
  std::vector<ConditionResult> conditions;
  ShiftConstants constants;
  bool all_passed() const;
};

ConditionReport check_H_conditions(WeightFamily& family, int nu, const TensorGrid& grid, double tol,
                                   std::uint64_t seed = 0);

ShiftConstants estimate_shift_constants(WeightFamily& family, int nu, const TensorGrid& grid,
                                        std::uint64_t seed = 0);

// b = h_nu(a,...,a) + l_nu using the cached l_nu.
double shift_b(const WeightFamily& family, int nu, double a);

// Ensures constants are cached for 1..upto using the default validation grid.
void ensure_constants(WeightFamily& family, int upto, std::uint64_t seed = 0);

}  // namespace gslab
