#ifndef WILLMORE_CLI_HPP
#define WILLMORE_CLI_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "willmore/csv.hpp"
#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/invariants.hpp"
#include "willmore/laminate.hpp"
#include "willmore/oracle.hpp"
#include "willmore/recovery.hpp"
#include "willmore/scene.hpp"
#include "willmore/scene_io.hpp"

namespace willmore::cli {

enum class Command { kEnvelope, kRelax1d, kLaminate, kJumpcost, kLimitEnergy, kRecovery, kSelftest };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::kEnvelope: return "envelope";
    case Command::kRelax1d: return "relax1d";
    case Command::kLaminate: return "laminate";
    case Command::kJumpcost: return "jumpcost";
    case Command::kLimitEnergy: return "limit-energy";
    case Command::kRecovery: return "recovery";
    case Command::kSelftest: return "selftest";
  }
  return "?";
}

/// Everything one invocation needs. Unset optionals take per-command defaults.
struct RunConfig {
  Command command = Command::kSelftest;
  std::vector<std::string> inputs;
  std::vector<double> lambdas;
  std::optional<std::vector<double>> range;  ///< envelope: t range; relax1d: kappa range
  std::optional<int> points;                 ///< envelope rows, relax1d intervals, jump profile points
  int refinement = 64;
  int grid = 1025;
  std::vector<int> copies;                   ///< laminate: corrector copies per side
  std::vector<double> ray{1, 0, 1};
  std::vector<double> tilt{0, 0};
  std::vector<double> xi{1, 0, 1};
  std::vector<double> jump_a, jump_b, jump_nu;
  int random = 0;
  std::vector<double> ladder;
  bool no_corrector = false;
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  void validate() const {
    for (double l : lambdas)
      if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("--lambda values must be positive");
    auto need = [](const std::vector<double>& v, std::size_t n, const char* flag) {
      if (v.size() != n) throw ValidationError(std::string(flag) + " takes " + std::to_string(n) + " numbers");
    };
    need(ray, 3, "--ray");
    need(tilt, 2, "--tilt");
    need(xi, 3, "--xi");
    if (range) need(*range, 2, "--range");
    if (refinement < 4) throw ValidationError("--refinement must be at least 4");
    if (grid < 17) throw ValidationError("--grid must be at least 17");
    for (int m : copies)
      if (m < 1) throw ValidationError("--copies must be at least 1");
    if (random < 0) throw ValidationError("--random must be non-negative");
    if (out_dir.empty()) throw ValidationError("--out must not be empty");
  }
};

/// Rows t, f_raw, h_lambda, G along the matrix ray t * ray at a fixed tilt.
inline CsvTable emit_envelope_table(const Penalty& p, const Tilt& v, const SymMat2& ray, double t0, double t1, int samples) {
  if (samples < 2) throw ValidationError("envelope table needs at least 2 samples");
  CsvTable t({"t", "f_raw", "h_lambda", "G"});
  for (int k = 0; k < samples; ++k) {
    const double s = t0 + (t1 - t0) * k / (samples - 1);
    const SymMat2 xi = s * ray;
    const double f = f_raw(p, v, xi), h = h_lambda(p, v, xi), G = G_density(v, xi);
    const double tol = 1e-12 * std::max(1.0, std::max(f, G));
    if (h > f + tol || (rho0(shape_operator(v, xi)) <= p.sqrt_lambda() && h > G + tol))
      throw std::logic_error("envelope table: h_lambda above f_raw or G at t = " + format_number(s));
    t.add_row({s, f, h, G});
  }
  return t;
}

namespace detail {

inline double single_lambda(const RunConfig& c, std::optional<double> fallback) {
  if (c.lambdas.empty()) {
    if (fallback) return *fallback;
    throw ValidationError(std::string(command_name(c.command)) + " needs --lambda");
  }
  if (c.lambdas.size() != 1) throw ValidationError(std::string(command_name(c.command)) + " takes a single --lambda");
  return c.lambdas[0];
}

inline SymMat2 sym(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

class Artifacts {
 public:
  explicit Artifacts(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) throw ValidationError("cannot create output directory " + dir);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void csv(const std::string& name, const CsvTable& t) const { t.write(path(name)); }
  void text(const std::string& name, const std::string& s) const { CsvTable::write_text(path(name), s); }

 private:
  std::filesystem::path dir_;
};

inline std::string gnuplot_header(const std::string& title) {
  return "set datafile separator ','\nset key autotitle columnhead\nset title '" + title + "'\n";
}

inline int envelope(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const Penalty p(single_lambda(c, std::nullopt));
  const std::vector<double> r = c.range.value_or(std::vector<double>{0.0, 4.0});
  const CsvTable t = emit_envelope_table(p, Tilt{c.tilt[0], c.tilt[1]}, sym(c.ray), r[0], r[1], c.points.value_or(101));
  a.csv("envelope.csv", t);
  a.text("envelope.gp", gnuplot_header("densities along a matrix ray") + "set xlabel 't'\n"
                            "plot 'envelope.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
  out << "rows " << t.rows() << "\n";
  return 0;
}

inline int relax1d(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const Penalty p(single_lambda(c, std::nullopt));
  const std::vector<double> r = c.range.value_or(std::vector<double>{-8.0, 8.0});
  if (!(r[1] > 0.0) || r[0] != -r[1]) throw ValidationError("--range must be symmetric about 0, e.g. -8 8");
  const int n = c.points.value_or(4096);
  if (n < 16 || n % 2 != 0) throw ValidationError("--points must be an even number >= 16");
  const std::vector<double> kappa = symmetric_grid(r[1], n / 2);
  const std::vector<double> env = convex_envelope_1d_numeric(p, kappa);
  CsvTable t({"kappa", "f_raw", "envelope_closed", "envelope_numeric"});
  double err = 0.0;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double closed = envelope_1d(p, kappa[i]);
    t.add_row({kappa[i], f1d_raw(p, kappa[i]), closed, env[i]});
    if (std::fabs(kappa[i]) <= 0.5 * r[1]) err = std::max(err, std::fabs(env[i] - closed));
  }
  a.csv("relax1d.csv", t);
  a.text("relax1d.gp", gnuplot_header("one-dimensional convex envelope") + "set xlabel 'kappa'\n"
                           "plot 'relax1d.csv' using 1:2 with points pt 7 ps 0.2, '' using 1:3 with lines, "
                           "'' using 1:4 with lines dt 2\n");
  out << "samples " << kappa.size() << "\n";
  out << "sup_error_inner_half " << format_number(err) << "\n";
  return 0;
}

inline int laminate(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const Penalty p(single_lambda(c, 9.0));
  const Tilt v{c.tilt[0], c.tilt[1]};
  const LaminateSpec L = build_laminate(p, v, sym(c.xi));
  OracleConfig oc;
  oc.refinement = c.refinement;
  oc.seed = c.seed;
  const RealizedLaminate R = realize_laminate(L, oc);

  CsvTable t({"quantity", "value"});
  const std::vector<std::pair<const char*, double>> rows{
      {"lambda", p.lambda()},           {"alpha", L.alpha},
      {"beta", L.beta},                 {"small_eigenvalue", L.x},
      {"large_eigenvalue", L.y},        {"single_level", L.single_level ? 1.0 : 0.0},
      {"mixture_defect", L.mixture_defect()},
      {"predicted_value", L.predicted_value},
      {"predicted_energy", L.predicted_energy()},
      {"refinement", static_cast<double>(c.refinement)},
      {"measured_avg_f_raw", R.measured_avg_f_raw},
      {"realized_alpha", R.realized_alpha},
      {"realized_beta", R.realized_beta}};
  for (const auto& [k, val] : rows) {
    t.add_row({std::string(k), val});
    out << k << " " << format_number(val) << "\n";
  }
  a.csv("laminate.csv", t);

  // Potential on at most 129 nodes per side.
  const GridField& f = R.potential;
  const int stride = std::max(1, (std::max(f.nx(), f.ny()) - 1 + 127) / 128);
  CsvTable field({"x", "y", "potential"});
  for (int j = 0; j < f.ny(); j += stride)
    for (int i = 0; i < f.nx(); i += stride) field.add_row({f.point(i, j).x, f.point(i, j).y, f(i, j)});
  a.csv("laminate_field.csv", field);
  a.text("laminate.gp", gnuplot_header("laminate potential") + "set view map\n"
                            "splot 'laminate_field.csv' using 1:2:3 with points palette pt 5 ps 0.5\n");

  if (!c.copies.empty()) {
    CellPotential w;
    w.value = 0.0;
    w.gradient = v.vec();
    w.hessian = sym(c.xi);
    CsvTable ct({"copies", "refinement", "avg_f_raw", "avg_f_raw_plain", "avg_h_lambda_plain", "h_lambda_centre",
                 "gradient_perturbation", "laminate_gradient_sup"});
    for (int M : c.copies) {
      const CorrectorResult r = corrector_insertion(w, p, M, c.refinement);
      ct.add_row({static_cast<long long>(M), static_cast<long long>(c.refinement), r.avg_f_raw, r.avg_f_raw_plain,
                  r.avg_h_lambda_plain, r.h_lambda_centre, r.gradient_perturbation, r.laminate_gradient_sup});
      out << "corrector copies " << M << " avg_f_raw " << format_number(r.avg_f_raw) << "\n";
    }
    a.csv("corrector.csv", ct);
    a.text("corrector.gp", gnuplot_header("corrector insertion") + "set xlabel 'copies per side'\nset logscale x 2\n"
                               "plot 'corrector.csv' using 1:3 with linespoints, '' using 1:5 with lines\n");
  }
  return 0;
}

inline int jumpcost(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const int points = c.points.value_or(256);
  std::vector<JumpDatum> data;
  const bool explicit_datum = !c.jump_a.empty() || !c.jump_b.empty() || !c.jump_nu.empty();
  if (explicit_datum) {
    if (c.jump_a.size() != 2 || c.jump_b.size() != 2 || c.jump_nu.size() != 2)
      throw ValidationError("--a, --b and --nu each take 2 numbers and go together");
    data.push_back({{c.jump_a[0], c.jump_a[1]}, {c.jump_b[0], c.jump_b[1]}, {c.jump_nu[0], c.jump_nu[1]}});
  } else if (c.random == 0) {
    data = {{{0, 0}, {0, 1}, {0, 1}}, {{1, 0}, {1, 1}, {0, 1}}};
  }
  Sampler s(c.seed);
  for (int k = 0; k < c.random; ++k) {
    const Vec2 nu = s.unit();
    const double tang = s.uniform(-2, 2);
    data.push_back({Tilt::of(tang * perp(nu) + s.uniform(-2, 2) * nu), Tilt::of(tang * perp(nu) + s.uniform(-2, 2) * nu), nu});
  }
  CsvTable t({"a1", "a2", "b1", "b2", "nu1", "nu2", "closed", "numeric", "rel_error"});
  double worst = 0.0;
  for (const JumpDatum& j : data) {
    const double exact = jump_cost(j), num = numeric_jump_cost(j, points);
    const double err = exact > 0.0 ? std::fabs(num - exact) / exact : std::fabs(num);
    worst = std::max(worst, err);
    t.add_row({j.a.v1, j.a.v2, j.b.v1, j.b.v2, j.nu.x, j.nu.y, exact, num, err});
  }
  a.csv("jumpcost.csv", t);
  a.text("jumpcost.gp", gnuplot_header("jump cost") + "set xlabel 'closed form'\nset ylabel 'profile minimum'\n"
                            "plot 'jumpcost.csv' using 7:8 with points pt 7, x with lines\n");
  out << "data " << data.size() << "\n";
  out << "max_rel_error " << format_number(worst) << "\n";
  return 0;
}

inline const std::string& single_input(const RunConfig& c) {
  if (c.inputs.size() != 1) throw ValidationError(std::string(command_name(c.command)) + " takes one scene file");
  return c.inputs[0];
}

inline int limit_energy_cmd(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const EnergyBreakdown e = limit_energy(load_scene(single_input(c)));
  CsvTable t({"component", "value"});
  for (const auto& [k, val] : {std::pair{"bulk", e.bulk}, {"jump", e.jump}, {"cantor", e.cantor}, {"total", e.total}}) {
    t.add_row({std::string(k), val});
    out << k << " " << format_number(val) << "\n";
  }
  a.csv("limit_energy.csv", t);
  return 0;
}

inline int recovery(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const GraphScene s = load_scene(single_input(c));
  const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{1e2, 1e3, 1e4} : c.lambdas;
  RecoveryOptions opt;
  opt.epsilon_ladder = c.ladder;
  opt.apply_corrector = !c.no_corrector;
  const RecoveryReport r = recovery_experiment(s, lambdas, c.grid, opt);
  a.csv("recovery.csv", r.table());
  a.csv("recovery_detail.csv", r.detail_table());
  a.text("recovery.gp", gnuplot_header("recovery energies") + "set logscale x\nset xlabel 'lambda'\n"
                            "plot 'recovery.csv' using 1:3 with linespoints, '' using 1:4 with lines\n");
  out << r.table().str();
  return 0;
}

inline int selftest(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  CsvTable t({"check", "samples", "worst", "bound", "pass"});
  bool all = true;
  for (const CheckResult& r : invariant_suite(c.seed)) {
    t.add_row({r.name, r.samples, r.worst, r.bound, static_cast<long long>(r.pass)});
    out << (r.pass ? "PASS " : "FAIL ") << r.name << " worst " << format_number(r.worst) << " bound "
        << format_number(r.bound) << "\n";
    all = all && r.pass;
  }
  a.csv("selftest.csv", t);
  return all ? 0 : 1;
}

}  // namespace detail

/// Dispatches one command and writes its artifacts under cfg.out_dir. Returns 0 on success,
/// 2 on a validation error and 1 on anything else.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const detail::Artifacts a(cfg.out_dir);
    switch (cfg.command) {
      case Command::kEnvelope: return detail::envelope(cfg, a, out);
      case Command::kRelax1d: return detail::relax1d(cfg, a, out);
      case Command::kLaminate: return detail::laminate(cfg, a, out);
      case Command::kJumpcost: return detail::jumpcost(cfg, a, out);
      case Command::kLimitEnergy: return detail::limit_energy_cmd(cfg, a, out);
      case Command::kRecovery: return detail::recovery(cfg, a, out);
      case Command::kSelftest: return detail::selftest(cfg, a, out);
    }
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

/// Parses the command line into a RunConfig and runs it.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized Willmore energies of graphs: envelopes, laminates, limit energies and recovery runs"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  };
  auto lambda = [&](CLI::App* sub) { sub->add_option("--lambda", cfg.lambdas, "penalty strength(s)"); };
  std::vector<double> range;
  int points = 0;

  CLI::App* env = app.add_subcommand("envelope", "tabulate f_raw, h_lambda and G along a matrix ray");
  lambda(env);
  env->add_option("--ray", cfg.ray, "ray direction a11 a12 a22")->expected(3);
  env->add_option("--tilt", cfg.tilt, "tilt v1 v2")->expected(2);
  env->add_option("--range", range, "t range t0 t1 (default 0 4)")->expected(2);
  env->add_option("--points", points, "rows (default 101)");
  common(env);

  CLI::App* r1 = app.add_subcommand("relax1d", "discrete biconjugate of the 1-D density against the closed form");
  lambda(r1);
  r1->add_option("--range", range, "symmetric kappa range (default -8 8)")->expected(2);
  r1->add_option("--points", points, "intervals; the grid has points + 1 samples (default 4096)");
  common(r1);

  CLI::App* lam = app.add_subcommand("laminate", "build and realize an order-two laminate");
  lambda(lam);
  lam->add_option("--tilt", cfg.tilt, "tilt v1 v2")->expected(2);
  lam->add_option("--xi", cfg.xi, "Hessian a11 a12 a22")->expected(3);
  lam->add_option("--refinement", cfg.refinement, "inner periods per unit cell")->capture_default_str();
  lam->add_option("--copies", cfg.copies, "also insert M x M laminate copies into a quadratic cell, for each M");
  common(lam);

  CLI::App* jc = app.add_subcommand("jumpcost", "jump cost: closed form against profile minimization");
  jc->add_option("--a", cfg.jump_a, "gradient on one side")->expected(2);
  jc->add_option("--b", cfg.jump_b, "gradient on the other side")->expected(2);
  jc->add_option("--nu", cfg.jump_nu, "unit normal of the jump line")->expected(2);
  jc->add_option("--random", cfg.random, "number of seeded random data");
  jc->add_option("--points", points, "profile points (default 256)");
  common(jc);

  CLI::App* le = app.add_subcommand("limit-energy", "bulk, jump and total limit energy of a scene");
  le->add_option("scene", cfg.inputs, "scene file")->required();
  common(le);

  CLI::App* rec = app.add_subcommand("recovery", "mollified recovery sequence along a lambda ladder");
  rec->add_option("scene", cfg.inputs, "scene file")->required();
  lambda(rec);
  rec->add_option("--grid", cfg.grid, "nodes along the shorter side")->capture_default_str();
  rec->add_option("--ladder", cfg.ladder, "descending epsilon ladder (default dyadic)");
  rec->add_flag("--no-corrector", cfg.no_corrector, "skip the ridge corrector");
  common(rec);

  CLI::App* st = app.add_subcommand("selftest", "run the invariant suite");
  common(st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::vector<std::pair<CLI::App*, Command>> table{
      {env, Command::kEnvelope},  {r1, Command::kRelax1d},     {lam, Command::kLaminate},
      {jc, Command::kJumpcost},   {le, Command::kLimitEnergy}, {rec, Command::kRecovery},
      {st, Command::kSelftest}};
  for (const auto& [sub, cmd] : table) {
    if (!sub->parsed()) continue;
    cfg.command = cmd;
    if (const CLI::Option* o = sub->get_option_no_throw("--range"); o && o->count()) cfg.range = range;
    if (const CLI::Option* o = sub->get_option_no_throw("--points"); o && o->count()) cfg.points = points;
  }
  return run(cfg, out, err);
}

}  // namespace willmore::cli

#endif  // WILLMORE_CLI_HPP
