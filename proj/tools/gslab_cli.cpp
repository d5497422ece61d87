// gslab command line front end
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gslab/config.hpp"
#include "gslab/fenchel.hpp"
#include "gslab/fourier.hpp"
#include "gslab/lemmalab.hpp"
#include "gslab/spaces.hpp"
#include "gslab/weights.hpp"

namespace fs = std::filesystem;
using namespace gslab;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string family = "power:p=2,n=1,nu_max=8";
  int nu = 1;
  int m = 0;
  std::string grid;
  double tol = 0.0;  // 0: per-command default
  std::string out = "gslab_out";
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string config;

  std::string id;
  std::string u = "power2";
  int n = 0;  // TA dimension, 0: family dimension
  std::string which = "G";
  std::string in;
  std::string dual = "auto";
  std::size_t dual_count = 0;
  std::string method = "fast";
  double a = 1.0;
  std::string w;
  double L = 8.0;
  std::size_t N = 1024;
  double perturb = 0.0;
  std::string f_kind = "gaussian_poly";
  double f_a = 0.5;
  std::string f_poly;
  std::size_t f_n = 0;  // 0: family dimension
};

struct SummaryRow {
  std::string statement;
  std::string family;
  std::string nu;
  std::string m;
  std::optional<double> min_slack;
  std::optional<double> ratio;
  bool passed = true;
};

struct JobOutput {
  std::string file;  // JSON report name, empty for none
  ordered_json json;
  std::vector<std::pair<std::string, std::string>> extra_files;
  std::vector<SummaryRow> rows;
  bool passed = true;
  bool config_error = false;
  std::string error;
};

struct Job {
  std::string name;
  std::function<JobOutput()> run;
};

std::vector<JobOutput> run_jobs(const std::vector<Job>& jobs, int degree) {
  std::vector<JobOutput> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        out[i] = jobs[i].run();
      } catch (const ConfigError& e) {
        out[i].config_error = true;
        out[i].passed = false;
        out[i].error = e.what();
      } catch (const std::invalid_argument& e) {
        out[i].config_error = true;
        out[i].passed = false;
        out[i].error = e.what();
      } catch (const std::exception& e) {
        out[i].passed = false;
        out[i].error = e.what();
      }
    }
  };
  const int k = std::max(1, std::min<int>(degree, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string opt_num(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

ordered_json json_num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << text;
}

int finish(const std::vector<Job>& jobs, const std::vector<JobOutput>& results, const Options& o) {
  const fs::path dir(o.out);
  bool config_error = false, failed = false;
  std::ostringstream summary;
  summary << "statement,family,nu,m,min_slack,ratio,passed\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.error.empty()) std::cerr << jobs[i].name << ": " << r.error << "\n";
    config_error = config_error || r.config_error;
    failed = failed || !r.passed;
    if (!r.file.empty()) write_text(dir / r.file, r.json.dump(2) + "\n");
    for (const auto& [name, text] : r.extra_files) write_text(dir / name, text);
    for (const auto& row : r.rows)
      summary << csv_field(row.statement) << ',' << csv_field(row.family) << ',' << row.nu << ',' << row.m << ','
              << opt_num(row.min_slack) << ',' << opt_num(row.ratio) << ',' << (row.passed ? "true" : "false")
              << "\n";
    std::cout << (r.passed ? "PASS " : "FAIL ") << jobs[i].name << "\n";
  }
  write_text(dir / "summary.csv", summary.str());
  if (config_error) return 2;
  return failed ? 1 : 0;
}

// ---------------------------------------------------------------- jobs

ordered_json condition_json(const ConditionReport& r) {
  ordered_json j;
  j["report"] = "H_CONDITIONS";
  j["family"] = r.family;
  j["nu"] = r.nu;
  j["tolerance"] = r.tolerance;
  j["seed"] = r.seed;
  j["grid_points"] = r.grid_points;
  ordered_json cs = ordered_json::array();
  for (const auto& c : r.conditions) {
    ordered_json e;
    e["id"] = c.id;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = json_num(c.value);
    e["where"] = c.where;
    if (!c.note.empty()) e["note"] = c.note;
    cs.push_back(e);
  }
  j["conditions"] = cs;
  ordered_json k;
  k["gamma"] = json_num(r.constants.gamma);
  k["gamma_raw"] = json_num(r.constants.gamma_raw);
  k["l"] = json_num(r.constants.l);
  for (const auto& [M, v] : r.constants.A) k["A_" + std::to_string(M)] = json_num(v);
  for (const auto& [a, v] : r.constants.b) k["b_" + std::to_string(a)] = json_num(v);
  j["constants"] = k;
  j["passed"] = r.all_passed();
  return j;
}

Job check_family_job(const WeightFamily& fam, int nu, const Options& o) {
  return {"check-family nu=" + std::to_string(nu), [fam, nu, o] {
            WeightFamily work = fam;  // constants get cached on the copy
            const TensorGrid g = o.grid.empty() ? default_validation_grid(fam.dim()) : parse_grid_spec(o.grid, fam.dim());
            const ConditionReport r = check_H_conditions(work, nu, g, o.tol > 0 ? o.tol : 1e-6, o.seed);
            JobOutput out;
            out.file = "check_family_nu" + std::to_string(nu) + ".json";
            out.json = condition_json(r);
            out.passed = r.all_passed();
            out.rows.push_back({"H_CONDITIONS", fam.label(), std::to_string(nu), "", std::nullopt, std::nullopt,
                                out.passed});
            return out;
          }};
}

Point parse_point(const std::string& s) {
  Point p;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) p.push_back(parse_double(part, "point"));
  return p;
}

Job verify_job(const WeightFamily& fam, StatementId id, int m, const Options& o) {
  return {"verify " + to_string(id) + " nu=" + std::to_string(m), [&fam, id, m, o] {
            LemmaParams lp;
            lp.a = o.a;
            if (!o.w.empty()) lp.w = parse_point(o.w);
            if (!o.grid.empty()) lp.grid = parse_grid_spec(o.grid, fam.dim());
            VerificationReport r = verify_inequality(id, fam, m, lp, o.tol > 0 ? o.tol : default_tolerance(id));
            r.seed = o.seed;
            JobOutput out;
            out.file = "verify_" + to_string(id) + "_nu" + std::to_string(m) + ".json";
            out.json = to_json(r);
            out.passed = r.passed;
            out.rows.push_back({to_string(id), r.family, std::to_string(m), "", r.min_slack, std::nullopt, r.passed});
            return out;
          }};
}

Job theorem_a_job(const std::string& u, std::size_t n, const Options& o) {
  return {"verify TA u=" + u, [u, n, o] {
            TheoremAParams tp;
            if (!o.grid.empty()) tp.grid = parse_grid_spec(o.grid, n);
            VerificationReport r = verify_theorem_A(named_u(u), n, tp, o.tol > 0 ? o.tol : default_tolerance(StatementId::TA));
            r.seed = o.seed;
            JobOutput out;
            out.file = "verify_TA_" + u + "_n" + std::to_string(n) + ".json";
            out.json = to_json(r);
            out.passed = r.passed;
            out.rows.push_back({"TA", r.family, "", "", r.min_slack, r.estimated_constant, r.passed});
            return out;
          }};
}

TestFunction function_from(const Options& o, std::size_t n) {
  TestFunctionSpec s;
  s.kind = o.f_kind;
  if (s.kind != "gaussian_poly") throw ConfigError("unknown function kind '" + s.kind + "'");
  s.a = o.f_a;
  if (!(s.a > 0.0)) throw ConfigError("f.a must be positive");
  s.n = o.f_n ? o.f_n : n;
  if (s.n != n) throw ConfigError("f.n does not match the family dimension");
  if (!o.f_poly.empty()) s.poly = parse_poly(o.f_poly, s.n);
  return make_test_function(s);
}

std::string function_tag(const TestFunction& f) { return "a" + format_double(f.a()); }

Job seminorm_job(const WeightFamily& fam, const TestFunction& f, const Options& o) {
  return {"seminorm " + o.which, [&fam, f, o] {
            const std::size_t n = f.dim();
            const TensorGrid g = o.grid.empty() ? default_space_grid(n) : parse_grid_spec(o.grid, n);
            const int nu = o.nu, m = o.m;
            fam.check_index(nu);
            auto h = [&fam, nu](PointView b) { return fam.h(nu, b); };
            SeminormReport r;
            if (o.which == "G")
              r = seminorm_G(f, h, m, g);
            else if (o.which == "rho")
              r = seminorm_rho(f, h, m, g);
            else if (o.which == "p")
              r = seminorm_p([&f](PointView x, PointView y) { return f.log_abs_entire(x, y); }, fam.phi_evaluator(nu),
                             m, g, g);
            else if (o.which == "q")
              r = seminorm_q(f, fam.phi_star_evaluator(nu), m, g);
            else
              throw ConfigError("seminorm: --which must be G, rho, p or q");
            r.family_ref = fam.label();
            r.nu = nu;
            JobOutput out;
            out.file = "seminorm_" + o.which + "_" + function_tag(f) + "_nu" + std::to_string(nu) + "_m" +
                       std::to_string(m) + ".json";
            out.json = to_json(r);
            out.json["function"] = f.describe();
            out.json["seed"] = o.seed;
            out.rows.push_back({"SEMINORM_" + o.which, fam.label(), std::to_string(nu), std::to_string(m), std::nullopt,
                                r.value, true});
            return out;
          }};
}

Job fourier_check_job(const TestFunction& f, const Options& o) {
  return {"fourier-check", [f, o] {
            FourierParams fp;
            fp.n = f.dim();
            fp.L = o.L;
            fp.N = o.N;
            fp.validate();
            ordered_json j;
            j["report"] = "FOURIER_CHECK";
            j["function"] = f.describe();
            j["L"] = fp.L;
            j["N"] = fp.N;
            j["seed"] = o.seed;
            bool ok = true;
            ordered_json checks = ordered_json::array();
            auto add = [&](const std::string& name, double value, double limit) {
              const bool pass = value <= limit;
              ok = ok && pass;
              checks.push_back({{"check", name}, {"value", json_num(value)}, {"limit", limit}, {"passed", pass}});
            };
            {
              TestFunctionSpec gs;
              gs.n = fp.n;
              const TestFunction gauss = make_test_function(gs);
              const TransformResult t = fourier_transform(sample(gauss, fp.spatial_grid()), fp);
              add("gaussian_fixed_point", max_abs_diff(t.out, sample(gauss, fp.dual_grid()), 8.0), 1e-8);
            }
            const ComplexSamples s = sample(f, fp.spatial_grid());
            const TransformResult t = fourier_transform(s, fp);
            add("closed_form_image", max_abs_diff(t.out, sample(f.fourier_image(+1), fp.dual_grid()), fp.L), 1e-8);
            const TransformResult back = fourier_transform(t.out, fp.dual());
            add("round_trip", max_abs_diff(back.out, s), 1e-9);
            const double n0 = l2_norm(s);
            add("unitarity_rel", n0 > 0 ? std::fabs(l2_norm(t.out) / n0 - 1.0) : 0.0, 1e-9);
            // inverse transform of the sampled closed-form image of the entire extension at real points
            const TestFunction fhat = f.fourier_image(+1);
            const ComplexSamples img = sample(
                [&](PointView x) {
                  const Point y(x.size(), 0.0);
                  return fhat.entire(x, y);
                },
                fp.dual_grid());
            add("pipeline_round_trip", max_abs_diff(fourier_transform(img, fp.dual()).out, s), 1e-8);
            j["checks"] = checks;
            j["edge_max"] = t.edge_max;
            j["warnings"] = t.warnings;
            j["passed"] = ok;
            JobOutput out;
            out.file = "fourier_check_" + function_tag(f) + ".json";
            out.json = j;
            std::ostringstream csv;
            t.out.write_csv(csv);
            out.extra_files.emplace_back("fourier_transform_" + function_tag(f) + ".csv", csv.str());
            out.passed = ok;
            out.rows.push_back({"FOURIER_CHECK", "", "", "", std::nullopt, std::nullopt, ok});
            return out;
          }};
}

void pw_rows(JobOutput& out, const std::vector<PWReport>& reps, std::uint64_t seed) {
  ordered_json arr = ordered_json::array();
  out.passed = true;
  for (const auto& r : reps) {
    arr.push_back(to_json(r));
    out.passed = out.passed && r.passed;
    std::string stmt = to_string(r.id);
    if (r.variant != "base") stmt += "_" + r.variant;
    std::optional<double> ratio;
    if (std::isfinite(std::exp(r.log_ratio))) ratio = std::exp(r.log_ratio);
    out.rows.push_back({stmt, r.family, std::to_string(r.nu), std::to_string(r.m), r.slack, ratio, r.passed});
  }
  out.json["seed"] = seed;
  out.json["reports"] = arr;
  out.json["passed"] = out.passed;
}

Job paley_wiener_job(const WeightFamily& fam, const TestFunction& f, int nu, int m, const Options& o) {
  return {"paley-wiener " + function_tag(f) + " nu=" + std::to_string(nu) + " m=" + std::to_string(m),
          [&fam, f, nu, m, o] {
            PWParams pp;
            pp.fft.L = o.L;
            pp.fft.N = o.N;
            if (!o.grid.empty()) pp.grid = parse_grid_spec(o.grid, f.dim());
            JobOutput out;
            out.file = "paley_wiener_" + function_tag(f) + "_nu" + std::to_string(nu) + "_m" + std::to_string(m) + ".json";
            pw_rows(out, verify_paley_wiener(f, fam, nu, m, pp), o.seed);
            return out;
          }};
}

Job space_equality_job(const WeightFamily& fam, const TestFunction& f, int nu, int m, double perturb,
                       const Options& o) {
  return {"space-equality " + function_tag(f) + " nu=" + std::to_string(nu) + " m=" + std::to_string(m),
          [&fam, f, nu, m, perturb, o] {
            PWParams pp;
            if (!o.grid.empty()) pp.grid = parse_grid_spec(o.grid, f.dim());
            std::optional<Perturbation> pt;
            if (perturb != 0.0) pt = offset_perturbation(fam, perturb);
            JobOutput out;
            out.file =
                "space_equality_" + function_tag(f) + "_nu" + std::to_string(nu) + "_m" + std::to_string(m) + ".json";
            pw_rows(out, verify_space_equality(f, fam, nu, m, pt, pp), o.seed);
            return out;
          }};
}

Job conjugate_job(const Options& o) {
  return {"conjugate", [o] {
            if (o.in.empty()) throw ConfigError("conjugate: --in is required");
            GridFunction g;
            try {
              g = GridFunction::read_csv(o.in);
            } catch (const std::runtime_error& e) {
              throw ConfigError(e.what());
            }
            ConjugateMethod method;
            if (o.method == "fast")
              method = ConjugateMethod::Fast;
            else if (o.method == "brute")
              method = ConjugateMethod::Brute;
            else
              throw ConfigError("conjugate: --method must be fast or brute");
            std::size_t count = o.dual_count;
            if (!count) count = g.grid().axis(0).size();
            const TensorGrid dual = o.dual == "auto" ? auto_dual_grid(g, count) : parse_grid_spec(o.dual, g.dim());
            const ConjugateResult r = conjugate_nd(g, dual, method);
            JobOutput out;
            std::ostringstream csv;
            r.dual.write_csv(csv);
            out.extra_files.emplace_back("conjugate.csv", csv.str());
            double err = 0.0;
            std::size_t edge = 0;
            for (std::size_t i = 0; i < r.grid_error.size(); ++i) {
              err = std::max(err, r.grid_error[i]);
              edge += r.boundary_attained[i] ? 1 : 0;
            }
            out.file = "conjugate.json";
            out.json = {{"report", "CONJUGATE"},
                        {"input", o.in},
                        {"method", o.method},
                        {"dual_points", dual.size()},
                        {"max_grid_error", err},
                        {"boundary_attained_points", edge},
                        {"seed", o.seed}};
            return out;
          }};
}

Job build_family_job(const FamilySpec& spec) {
  return {"build-family", [spec] {
            if (spec.kind != "power") throw ConfigError("build-family needs a power family spec");
            const WeightFamily fam = build_family_from_M(spec.power, spec.nu_max);
            JobOutput out;
            std::ostringstream trace;
            trace << "nu,max_rel_dev,j4_max_slack\n";
            ordered_json entries = ordered_json::array();
            for (const auto& e : fam.build_trace()) {
              std::ostringstream csv;
              e.h_grid.write_csv(csv);
              out.extra_files.emplace_back("h_" + std::to_string(e.nu) + ".csv", csv.str());
              trace << e.nu << ',' << format_double(e.max_rel_dev) << ',' << format_double(e.j4_max_slack) << "\n";
              entries.push_back({{"nu", e.nu},
                                 {"max_rel_dev", e.max_rel_dev},
                                 {"worst_x", e.worst_x},
                                 {"j4_max_slack", e.j4_max_slack}});
            }
            out.extra_files.emplace_back("build_trace.csv", trace.str());
            out.file = "build_family.json";
            out.json = {{"report", "BUILD_FAMILY"}, {"family", fam.label()}, {"tables", entries}};
            return out;
          }};
}

// ---------------------------------------------------------------- options

void add_common(CLI::App* app, Options& o) {
  app->add_option("--family", o.family, "family spec, e.g. power:p=2,n=1,nu_max=8 or table:dir=PATH");
  app->add_option("--nu", o.nu, "family index");
  app->add_option("--m", o.m, "seminorm order");
  app->add_option("--grid", o.grid, "evaluation grid x:lo,hi,count");
  app->add_option("--tol", o.tol, "tolerance");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--jobs", o.jobs, "parallel jobs");
  app->add_option("--seed", o.seed, "seed for condition-6 pair sampling");
  app->add_option("--config", o.config, "key=value config file");
  app->add_option("--f-a", o.f_a, "test function width");
  app->add_option("--f-poly", o.f_poly, "test function polynomial coef@(i,...);...");
  app->add_option("--f-n", o.f_n, "test function dimension");
}

// config values fill options that were not given on the command line
void apply_config(CLI::App* sub, Options& o) {
  if (o.config.empty()) return;
  const KeyValueConfig cfg = KeyValueConfig::load(o.config);
  auto given = [&](const std::string& flag) {
    for (CLI::App* a : {sub, sub->get_parent()})
      if (a) try {
          if (a->count(flag) > 0) return true;
        } catch (const CLI::OptionNotFound&) {
        }
    return false;
  };
  auto str = [&](const std::string& key, const std::string& flag, std::string& dst) {
    if (auto v = cfg.get(key); v && !given(flag)) dst = *v;
  };
  auto dbl = [&](const std::string& key, const std::string& flag, double& dst) {
    if (auto v = cfg.get(key); v && !given(flag)) dst = parse_double(*v, key);
  };
  auto num = [&](const std::string& key, const std::string& flag, auto& dst) {
    if (auto v = cfg.get(key); v && !given(flag)) dst = static_cast<std::remove_reference_t<decltype(dst)>>(parse_int(*v, key));
  };
  str("family", "--family", o.family);
  num("nu", "--nu", o.nu);
  num("m", "--m", o.m);
  str("grid", "--grid", o.grid);
  dbl("tol", "--tol", o.tol);
  str("out", "--out", o.out);
  num("jobs", "--jobs", o.jobs);
  num("seed", "--seed", o.seed);
  str("u", "--u", o.u);
  str("which", "--which", o.which);
  dbl("a", "--a", o.a);
  str("w", "--w", o.w);
  dbl("L", "--L", o.L);
  num("N", "--N", o.N);
  dbl("perturb", "--perturb", o.perturb);
  str("f.kind", "--f-kind", o.f_kind);
  dbl("f.a", "--f-a", o.f_a);
  str("f.poly", "--f-poly", o.f_poly);
  num("f.n", "--f-n", o.f_n);
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"gslab: conjugates, weight families, seminorms and Paley-Wiener checks"};
  app.require_subcommand(1);
  app.fallthrough();
  add_common(&app, o);

  auto* conj = app.add_subcommand("conjugate", "discrete Young-Fenchel conjugate of a sampled CSV");
  conj->add_option("--in", o.in, "input CSV x1..xn,value")->required();
  conj->add_option("--dual", o.dual, "auto or x:lo,hi,count");
  conj->add_option("--dual-count", o.dual_count, "points per axis for --dual auto");
  conj->add_option("--method", o.method, "fast or brute");
  auto* build = app.add_subcommand("build-family", "tabulate h_nu from the M family");
  auto* check = app.add_subcommand("check-family", "conditions 1-6 on a family");
  auto* verify = app.add_subcommand("verify", "verify one statement");
  verify->add_option("--id", o.id, "L1..L7, C1..C3 or TA")->required();
  verify->add_option("--u", o.u, "TA: power2, power4 or cosh");
  verify->add_option("--n", o.n, "TA dimension");
  verify->add_option("--a", o.a, "L1/C1 parameter a");
  verify->add_option("--w", o.w, "L2 shift, comma separated");
  auto* semi = app.add_subcommand("seminorm", "evaluate a seminorm");
  semi->add_option("--which", o.which, "G, rho, p or q")->required();
  auto* fchk = app.add_subcommand("fourier-check", "FFT against closed forms");
  auto* pw = app.add_subcommand("paley-wiener", "EQ2, EQ3, PROP_NU6, THM2_NU1");
  auto* se = app.add_subcommand("space-equality", "THM4 bounds");
  se->add_option("--perturb", o.perturb, "theta = phi + offset");
  auto* all = app.add_subcommand("all", "full suite");
  for (auto* s : {fchk, pw}) {
    s->add_option("--L", o.L, "FFT half window");
    s->add_option("--N", o.N, "FFT samples per axis");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::vector<Job> jobs;
  std::optional<WeightFamily> family;
  std::vector<TestFunction> corpus;
  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(sub, o);
    if (o.jobs < 1) throw ConfigError("--jobs must be at least 1");
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec || !fs::is_directory(o.out)) throw ConfigError("cannot create output directory " + o.out);

    const FamilySpec fspec = parse_family_spec(o.family);
    auto need_family = [&]() -> WeightFamily& {
      if (!family) family = make_family(fspec);
      return *family;
    };

    if (sub == conj) {
      jobs.push_back(conjugate_job(o));
    } else if (sub == build) {
      jobs.push_back(build_family_job(fspec));
    } else if (sub == check) {
      WeightFamily& fam = need_family();
      jobs.push_back(check_family_job(fam, o.nu, o));
    } else if (sub == verify) {
      if (o.id == "TA") {
        const std::size_t n = o.n ? static_cast<std::size_t>(o.n) : (fspec.kind == "power" ? fspec.power.n : 1);
        jobs.push_back(theorem_a_job(o.u, n, o));
      } else {
        const StatementId id = parse_statement(o.id);
        WeightFamily& fam = need_family();
        ensure_constants(fam, std::min(o.nu + 1, fam.max_index() - 1), o.seed);
        jobs.push_back(verify_job(fam, id, o.nu, o));
      }
    } else if (sub == semi) {
      WeightFamily& fam = need_family();
      corpus.push_back(function_from(o, fam.dim()));
      jobs.push_back(seminorm_job(fam, corpus.back(), o));
    } else if (sub == fchk) {
      const std::size_t n = fspec.kind == "power" ? fspec.power.n : need_family().dim();
      jobs.push_back(fourier_check_job(function_from(o, n), o));
    } else if (sub == pw || sub == se) {
      WeightFamily& fam = need_family();
      if (o.nu < 1 || fam.max_index() < o.nu + 6)
        throw ConfigError("family " + fam.label() + " has indices up to " + std::to_string(fam.max_index()) +
                          ", the checks at nu=" + std::to_string(o.nu) + " need nu+6");
      ensure_constants(fam, o.nu, o.seed);
      corpus.push_back(function_from(o, fam.dim()));
      if (sub == pw)
        jobs.push_back(paley_wiener_job(fam, corpus.back(), o.nu, o.m, o));
      else
        jobs.push_back(space_equality_job(fam, corpus.back(), o.nu, o.m, o.perturb, o));
    } else if (sub == all) {
      WeightFamily& fam = need_family();
      const int top = std::min(3, fam.max_index() - 1);
      ensure_constants(fam, top + 1 <= fam.max_index() - 1 ? top + 1 : top, o.seed);
      for (int nu = 1; nu <= top; ++nu) jobs.push_back(check_family_job(fam, nu, o));
      const StatementId ids[] = {StatementId::L1, StatementId::L2, StatementId::L3, StatementId::L4,
                                 StatementId::L5, StatementId::L6, StatementId::L7, StatementId::C1,
                                 StatementId::C2, StatementId::C3};
      Options vo = o;
      vo.grid.clear();
      vo.tol = 0.0;
      for (int nu = 1; nu <= top; ++nu)
        for (StatementId id : ids) jobs.push_back(verify_job(fam, id, nu, vo));
      for (const char* u : {"power2", "power4", "cosh"}) jobs.push_back(theorem_a_job(u, fam.dim(), vo));
      for (double a : {0.5, 1.0}) {
        TestFunctionSpec s;
        s.a = a;
        s.n = fam.dim();
        corpus.push_back(make_test_function(s));
      }
      jobs.push_back(fourier_check_job(corpus[0], vo));
      if (fam.max_index() >= 7)
        for (const auto& f : corpus)
          for (int m : {0, 1}) {
            jobs.push_back(paley_wiener_job(fam, f, 1, m, vo));
            jobs.push_back(space_equality_job(fam, f, 1, m, 0.5, vo));
          }
      else
        std::cerr << "all: family has fewer than 7 indices, Paley-Wiener checks skipped\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const auto results = run_jobs(jobs, o.jobs);
  try {
    return finish(jobs, results, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
