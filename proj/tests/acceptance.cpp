// One pass/fail line per acceptance criterion.
// usage: acceptance <path-to-gslab> <work-dir> [criterion]
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "gslab/fenchel.hpp"
#include "gslab/fourier.hpp"
#include "gslab/lemmalab.hpp"
#include "gslab/weights.hpp"

using namespace gslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2fs", seconds);
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << o.detail << " (" << buf
            << ")" << std::endl;
}

template <class F>
void run(int id, const std::string& name, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double extra(const std::vector<std::pair<std::string, double>>& xs, const std::string& key) {
  for (const auto& [k, v] : xs)
    if (k == key) return v;
  return std::nan("");
}

GridFunction random_convex_1d(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(17, 513);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  const std::size_t N = static_cast<std::size_t>(size(rng));
  std::vector<double> slopes(N - 1);
  for (auto& s : slopes) s = U(rng);
  std::sort(slopes.begin(), slopes.end());
  const double lo = U(rng) - 5.0, hi = lo + 2.0 + std::fabs(U(rng)) * 2.0;
  const TensorGrid g = TensorGrid::uniform(1, lo, hi, N);
  const double h = g.axis(0)[1] - g.axis(0)[0];
  std::vector<double> v(N);
  v[0] = U(rng);
  for (std::size_t i = 1; i < N; ++i) v[i] = v[i - 1] + slopes[i - 1] * h;
  return GridFunction(g, v);
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto g = random_convex_1d(rng);
    const TensorGrid dual = auto_dual_grid(g, g.size());
    const auto a = conjugate_nd(g, dual, ConjugateMethod::Fast);
    const auto b = conjugate_nd(g, dual, ConjugateMethod::Brute);
    for (std::size_t i = 0; i < dual.size(); ++i) worst = std::max(worst, std::fabs(a.dual[i] - b.dual[i]));
  }
  double worst_nd = 0.0;
  for (std::size_t n : {2, 3}) {
    const TensorGrid g = TensorGrid::uniform(n, -2.0, 2.0, n == 2 ? 41 : 13);
    const auto f = GridFunction::sample(g, [](PointView y) {
      double s = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) s += std::pow(std::fabs(y[j]), 2.0 + j) + 0.3 * y[j];
      return s + 0.2 * y[0] * y[1];
    });
    const TensorGrid dual = TensorGrid::uniform(n, -3.0, 3.0, n == 2 ? 31 : 11);
    const auto a = conjugate_nd(f, dual);
    const auto b = conjugate_nd_joint(f, dual);
    for (std::size_t i = 0; i < dual.size(); ++i) worst_nd = std::max(worst_nd, std::fabs(a.dual[i] - b.dual[i]));
  }
  const double t = elapsed(t0);
  const bool ok = worst <= 1e-12 && worst_nd <= 1e-12 && t < 10.0;
  return {ok, "1d max diff " + num(worst) + ", nd max diff " + num(worst_nd) + ", runtime " + num(t) + "s"};
}

Outcome criterion2() {
  const TensorGrid g = TensorGrid::uniform(1, -3.0, 3.0, 401);
  const std::vector<std::pair<std::string, Evaluator>> corpus{
      {"half-square", [](PointView y) { return 0.5 * y[0] * y[0]; }},
      {"quartic", [](PointView y) { return std::pow(y[0], 4); }},
      {"exp-abs", [](PointView y) { return std::exp(std::fabs(y[0])); }}};
  double dev = 0.0;
  for (const auto& [name, u] : corpus) {
    const auto f = GridFunction::sample(g, u);
    const auto b = biconjugate(f);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) dev = std::max(dev, std::fabs(b[i] - f[i]));
  }
  double over = -kInf;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> v(401);
    for (auto& x : v) x = N(rng);
    const GridFunction f(g, v);
    const auto b = biconjugate(f);
    for (std::size_t i = 0; i < f.size(); ++i) over = std::max(over, b[i] - f[i]);
  }
  return {dev <= 5e-3 && over <= 1e-9,
          "convex max interior dev " + num(dev) + ", max (g**-g) on arbitrary inputs " + num(over)};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const char* u : {"power2", "power4", "cosh"}) {
    TheoremAParams tp;
    tp.t_count = 4001;
    const auto r = verify_theorem_A(named_u(u), 1, tp, 2e-3);
    const double dev = extra(r.extras, "max_deviation");
    const double zero = extra(r.extras, "deviation_at_zero");
    const bool pass = dev <= 2e-3 && std::fabs(zero) <= 1e-6;
    ok = ok && pass;
    detail += std::string(u) + " dev " + num(dev) + " at0 " + num(zero) + "; ";
  }
  const double t = elapsed(t0);
  ok = ok && t < 30.0;
  return {ok, detail + "runtime " + num(t) + "s"};
}

Outcome criterion4() {
  auto fam = WeightFamily::power(MFamilySpec{}, 8);
  ensure_constants(fam, 4);
  bool ok = true;
  double worst = kInf;
  std::string worst_id;
  double l6 = kInf;
  double l2_gap = -kInf;
  for (int nu = 1; nu <= 3; ++nu) {
    for (auto id : {StatementId::L1, StatementId::L2, StatementId::L3, StatementId::L4, StatementId::L5,
                    StatementId::L7, StatementId::C1, StatementId::C2, StatementId::C3}) {
      const auto r = verify_inequality(id, fam, nu, LemmaParams{}, 1e-6);
      const double margin = r.min_slack + 1e-6 + r.grid_term;
      if (margin < worst) {
        worst = margin;
        worst_id = to_string(id) + "@" + std::to_string(nu);
      }
      ok = ok && margin >= 0.0;
      if (id == StatementId::L2) {
        const double gap = r.estimated_constant.value_or(kInf) - fam.constants(nu).gamma;
        l2_gap = std::max(l2_gap, gap);
        ok = ok && gap <= 1e-6;
      }
    }
    const auto r6 = verify_inequality(StatementId::L6, fam, nu, LemmaParams{}, 1e-12);
    l6 = std::min(l6, r6.min_slack);
    ok = ok && r6.min_slack >= -1e-12 && extra(r6.extras, "random_segments") >= 1000;
  }
  return {ok, "smallest slack margin " + num(worst) + " (" + worst_id + "), L2 gamma gap " + num(l2_gap) +
                  ", L6 min slack " + num(l6)};
}

Outcome criterion5() {
  const FourierParams p;  // L = 8, N = 1024
  TestFunctionSpec s;
  const auto g = make_test_function(s);
  const auto in = sample(g, p.spatial_grid());
  const auto t = fourier_transform(in, p);
  const double fixed = max_abs_diff(t.out, sample(g, p.dual_grid()));
  const double trip = max_abs_diff(fourier_transform(t.out, p.dual()).out, in);
  const double unit = std::fabs(l2_norm(t.out) / l2_norm(in) - 1.0);
  return {fixed <= 1e-8 && trip <= 1e-9 && unit <= 1e-9,
          "fixed point " + num(fixed) + ", round trip " + num(trip) + ", unitarity " + num(unit)};
}

Outcome criterion6(const WeightFamily& fam) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_eq3 = -kInf;
  int count = 0;
  for (double a : {0.5, 1.0})
    for (int m : {0, 1}) {
      TestFunctionSpec s;
      s.a = a;
      for (const auto& r : verify_paley_wiener(make_test_function(s), fam, 1, m)) {
        ++count;
        bool stab = true;
        for (const auto& c : r.components) stab = stab && c.stabilized;
        ok = ok && r.finite && stab;
        if (r.id == PWId::EQ3) {
          const double b = extra(r.extras, "b_hat"), gam = extra(r.extras, "gamma_hat");
          const double margin = r.log_ratio - (b + gam + std::log(1.05));
          worst_eq3 = std::max(worst_eq3, margin);
          ok = ok && margin <= 0.0;
        }
      }
    }
  const double t = elapsed(t0);
  ok = ok && count == 16 && t < 120.0;
  return {ok, std::to_string(count) + " ratios finite and stabilized: " + (ok ? "yes" : "no") +
                  ", max EQ3 log(ratio/bound) " + num(worst_eq3) + ", runtime " + num(t) + "s"};
}

Outcome criterion7(const WeightFamily& fam) {
  bool ok = true;
  double slack = kInf, infl = 0.0;
  for (double a : {0.5, 1.0})
    for (int m : {0, 1}) {
      TestFunctionSpec s;
      s.a = a;
      for (const auto& r : verify_space_equality(make_test_function(s), fam, 1, m, offset_perturbation(fam, 0.5))) {
        if (r.id == PWId::THM4_REV) {
          slack = std::min(slack, r.slack.value_or(-kInf));
          ok = ok && r.slack.value_or(-kInf) >= -1e-6;
        }
        if (r.id == PWId::THM4_FWD_NU5) ok = ok && r.finite;
        if (r.variant == "perturbed") {
          const double f = extra(r.extras, "inflation_factor");
          infl = std::max(infl, f);
          ok = ok && std::isfinite(f) && f <= std::exp(1.0) * (1.0 + 1e-9);
        }
      }
    }
  return {ok, "min reverse slack " + num(slack) + ", max inflation factor " + num(infl) + " (bound " +
                  num(std::exp(1.0)) + ")"};
}

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion8(const std::string& cli, const fs::path& work) {
  const fs::path a = work / "jobs1", b = work / "jobs8";
  fs::remove_all(a);
  fs::remove_all(b);
  const int ra = shell(cli + " all --seed 3 --jobs 1 --out " + a.string() + " >/dev/null 2>&1");
  const int rb = shell(cli + " all --seed 3 --jobs 8 --out " + b.string() + " >/dev/null 2>&1");
  if (ra != 0 || rb != 0)
    return {false, "all exited with " + std::to_string(ra) + " and " + std::to_string(rb)};
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++files_b;
  return {files > 0 && differ == 0 && files == files_b,
          std::to_string(files) + " report files, " + std::to_string(differ) + " differ between --jobs 1 and 8"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <gslab-binary> <work-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  fs::create_directories(work);

  const int only = argc > 3 ? std::atoi(argv[3]) : 0;
  if (only < 0 || only > 8) {
    std::cerr << "criterion must be 1..8\n";
    return 2;
  }

  auto fam = WeightFamily::power(MFamilySpec{}, 8);
  ensure_constants(fam, 3);

  int ran = 0;
  auto want = [&](int id) {
    const bool w = only == 0 || only == id;
    ran += w ? 1 : 0;
    return w;
  };
  if (want(1)) run(1, "conjugation oracle equivalence", criterion1);
  if (want(2)) run(2, "biconjugation", criterion2);
  if (want(3)) run(3, "conjugate sum identity (TA)", criterion3);
  if (want(4)) run(4, "lemma suite", criterion4);
  if (want(5)) run(5, "gaussian fourier fixed point", criterion5);
  if (want(6)) run(6, "paley-wiener pipeline", [&] { return criterion6(fam); });
  if (want(7)) run(7, "space equality bounds", [&] { return criterion7(fam); });
  if (want(8)) run(8, "determinism", [&] { return criterion8(cli, work); });
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << (ran - failures) << "/" << ran << std::endl;
  return failures ? 1 : 0;
}
