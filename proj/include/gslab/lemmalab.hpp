#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gslab/fenchel.hpp"
#include "gslab/gridcore.hpp"
#include "gslab/weights.hpp"

namespace gslab {

enum class StatementId { L1, L2, L3, L4, L5, L6, L7, C1, C2, C3, TA };

std::string to_string(StatementId id);
StatementId parse_statement(const std::string& s);

// A precondition of a verification does not hold; the message names the
// failing component.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VerificationReport {
  StatementId id = StatementId::L1;
  std::string family;
  int nu = 0;
  double min_slack = 0.0;
  Point argmin;
  std::optional<double> estimated_constant;
  std::string constant_name;
  std::optional<double> proof_constant;  // the constant the statement is checked with
  bool passed = false;
  double tolerance = 0.0;       // effective: base + grid term
  double base_tolerance = 0.0;
  double grid_term = 0.0;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  nlohmann::ordered_json grid;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::string> notes;
};

nlohmann::ordered_json to_json(const VerificationReport& r);

struct LemmaParams {
  double a = 1.0;                  // L1, C1
  std::optional<Point> w;          // L2; defaults to ln 2 in every coordinate
  std::optional<TensorGrid> grid;  // evaluation grid override
  std::uint64_t seed = 0;          // L6 random segments
  std::optional<ConjugateMethod> method;  // default: brute for n = 1, fast otherwise
  std::size_t primal_count = 0;    // samples per axis of h; 0 picks 20001 / 301 / 61
};

double default_tolerance(StatementId id);

VerificationReport verify_inequality(StatementId id, const WeightFamily& family, int m, const LemmaParams& params,
                                     double tol);

struct UFunction {
  Evaluator u;
  std::string label;
  bool convex = true;  // declared by the caller; checked along grid axes as well
};

// y^2, y^4, cosh(y) - 1 applied coordinatewise and summed.
UFunction named_u(const std::string& name);

struct TheoremAParams {
  std::optional<TensorGrid> grid;  // test points; default 0 plus 50 points on [0.1, 5]
  double t_lo = -16.0;
  double t_hi = 4.0;
  std::size_t t_count = 0;  // 0 picks 4001 / 101 / 31
  std::size_t y_count = 0;  // 0 picks 20001 / 401 / 61
};

VerificationReport verify_theorem_A(const UFunction& u, std::size_t n, const TheoremAParams& params, double tol);

// Midpoint convexity of f(g_1(x), ..., g_k(x)) on grid-adjacent triples and
// 1000 random segments in the grid's bounding box.
VerificationReport check_convex_composition(const Evaluator& f, const std::vector<Evaluator>& g,
                                            const TensorGrid& grid, double tol, std::uint64_t seed = 0);

}  // namespace gslab
