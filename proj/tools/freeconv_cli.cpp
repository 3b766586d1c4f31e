// freeconv command-line front end. Talks to the library through the C API only.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freeconv/freeconv.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(fc_status s) {
  switch (s) {
    case FC_INVALID_PARAMETER:
    case FC_NONPOSITIVE_IMAGINARY_PART:
    case FC_UNSUPPORTED_ORDER:
    case FC_PARSE_ERROR:
    case FC_IO_ERROR:
      return kExitUsage;
    default:
      return kExitNumeric;
  }
}

void check(fc_status s) {
  if (s != FC_OK) throw Failure{exit_code_for(s), std::string(fc_status_name(s)) + ": " + fc_last_error()};
}

struct MeasureDeleter {
  void operator()(fc_measure* m) const { fc_measure_free(m); }
};
struct TableDeleter {
  void operator()(fc_table* t) const { fc_table_free(t); }
};
using MeasurePtr = std::unique_ptr<fc_measure, MeasureDeleter>;
using TablePtr = std::unique_ptr<fc_table, TableDeleter>;

MeasurePtr parse_measure(const std::string& spec) {
  fc_measure* m = nullptr;
  check(fc_measure_parse(spec.c_str(), &m));
  return MeasurePtr(m);
}

std::string take(char* s) {
  std::string out(s);
  fc_string_free(s);
  return out;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw Failure{kExitUsage, "not a number: '" + text + "'"};
  return v;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw Failure{kExitUsage, "empty list"};
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto v = parse_numbers(text);
  if (v.size() != 2 || !(v[0] < v[1])) throw Failure{kExitUsage, "range must be 'lo,hi' with lo < hi: " + text};
  return {v[0], v[1]};
}

fc_complex parse_z(const std::string& text) {
  fc_complex z{};
  check(fc_parse_complex(text.c_str(), &z));
  return z;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw Failure{kExitUsage, "point counts must be >= 1"};
  if (n == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0)) throw Failure{kExitUsage, "eta range must be positive"};
  auto out = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : out) x = std::exp(x);
  if (n > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

// Options shared by every subcommand.
struct Output {
  std::string format = "csv";
  std::string path;

  void attach(CLI::App* app, const std::string& default_format) {
    format = default_format;
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--output,-o", path, "Write to this file instead of stdout");
  }

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kExitUsage, "cannot open '" + path + "' for writing"};
    out << text;
  }

  void table(const fc_table* t) const {
    char* s = nullptr;
    check(format == "json" ? fc_table_to_json(t, &s) : fc_table_to_csv(t, &s));
    write(take(s));
  }
};

struct Solver {
  fc_options opts{};

  void attach(CLI::App* app) {
    fc_options_default(&opts);
    app->add_option("--eta-eval", opts.eta_eval, "Imaginary part at which densities are read")->capture_default_str();
    app->add_option("--eta-start", opts.eta_start, "Imaginary part where eta sweeps start")->capture_default_str();
    app->add_option("--sweep-steps", opts.sweep_steps, "Geometric sweep steps from eta-start to eta-eval")
        ->capture_default_str();
    app->add_option("--max-iter", opts.max_iter, "Iteration cap for fixed point and Newton")->capture_default_str();
    app->add_option("--eta-floor", opts.eta_floor, "Smallest imaginary part accepted")->capture_default_str();
    app->add_option("--fp-tol", opts.fp_tol, "Fixed-point step tolerance")->capture_default_str();
    app->add_option("--newton-tol", opts.newton_tol, "Newton residual target")->capture_default_str();
  }
};

struct Ensemble {
  int n = 500;
  std::string group = "unitary";
  std::string a = "bernoulli:0.5";
  std::string b = "bernoulli:0.5";
  std::uint64_t seed = 0;
  int trials = 20;
  bool no_center = false;
  bool rotate_a = false;
  int threads = 0;
  std::string eigenvalues;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "Matrix dimension")->capture_default_str();
    app->add_option("--group", group, "Haar group")->check(CLI::IsMember({"unitary", "orthogonal"}))->capture_default_str();
    app->add_option("--a", a, "Spectrum of A (measure spec)")->capture_default_str();
    app->add_option("--b", b, "Spectrum of B (measure spec)")->capture_default_str();
    app->add_option("--seed", seed, "RNG seed")->capture_default_str();
    app->add_option("--trials", trials, "Number of trials")->capture_default_str();
    app->add_flag("--no-center", no_center, "Keep tr A and tr B instead of removing them");
    app->add_flag("--rotate-a", rotate_a, "Use V A V* with an independent Haar V");
    app->add_option("--threads", threads, "Worker threads (0: all cores; FREECONV_THREADS caps)")->capture_default_str();
    app->add_option("--eigenvalues", eigenvalues, "Also write per-trial eigenvalues (CSV) to this file");
  }

  struct Bound {
    MeasurePtr a, b;
    fc_ensemble cfg{};
  };

  Bound bind() const {
    Bound out{parse_measure(a), parse_measure(b)};
    fc_ensemble_default(&out.cfg);
    out.cfg.n = n;
    out.cfg.group = group == "orthogonal" ? FC_ORTHOGONAL : FC_UNITARY;
    out.cfg.spec_a = out.a.get();
    out.cfg.spec_b = out.b.get();
    out.cfg.seed = seed;
    out.cfg.trials = trials;
    out.cfg.center = no_center ? 0 : 1;
    out.cfg.rotate_a = rotate_a ? 1 : 0;
    out.cfg.threads = threads;
    return out;
  }

  void dump_eigenvalues(const fc_ensemble& cfg) const {
    if (eigenvalues.empty()) return;
    fc_table* t = nullptr;
    check(fc_rmt_eigenvalues(&cfg, &t));
    TablePtr owned(t);
    Output{"csv", eigenvalues}.table(owned.get());
  }
};

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string json_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "\"nan\"" : (x > 0 ? "\"inf\"" : "\"-inf\"");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_complex(fc_complex z) { return "[" + json_number(z.re) + ", " + json_number(z.im) + "]"; }

// Options of the selected subcommand under a [section] header naming the
// subcommand chain, so passing the file to --config reruns the same command.
std::string dump_selected(CLI::App& app) {
  std::string section;
  CLI::App* leaf = &app;
  while (true) {
    const auto subs = leaf->get_subcommands();
    if (subs.empty()) break;
    leaf = subs.front();
    section += (section.empty() ? "" : ".") + leaf->get_name();
  }
  std::istringstream lines(leaf->config_to_str(true, false));
  std::string out = "[" + section + "]\n";
  for (std::string line; std::getline(lines, line);) {
    if (line.empty() || line.front() == '[' || line.front() == '#') continue;
    out += line + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free additive convolution, subordination stability and random-matrix experiments"};
  app.fallthrough();
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "Print the resolved configuration (reusable with --config) and exit")
      ->configurable(false);
  app.set_config("--config", "", "Read options from a TOML/INI file");

  // convolve
  auto* convolve = app.add_subcommand("convolve", "Stieltjes transform and subordination functions at one z");
  std::string m1 = "bernoulli:0.5", m2 = "bernoulli:0.5", z_text = "0+1i";
  Solver conv_solver;
  Output conv_out;
  convolve->add_option("--m1", m1, "First measure")->capture_default_str();
  convolve->add_option("--m2", m2, "Second measure")->capture_default_str();
  convolve->add_option("--z", z_text, "Spectral parameter, e.g. 1+1e-9i (Im z = 0 runs an eta sweep)")
      ->capture_default_str();
  conv_solver.attach(convolve);
  conv_out.attach(convolve, "json");

  // density
  auto* density = app.add_subcommand("density", "Density of mu1 [+] mu2 on a uniform grid");
  std::string range = "-1,3";
  int points = 201;
  Solver dens_solver;
  Output dens_out;
  density->add_option("--m1", m1, "First measure")->capture_default_str();
  density->add_option("--m2", m2, "Second measure")->capture_default_str();
  density->add_option("--range", range, "Grid bounds lo,hi")->capture_default_str();
  density->add_option("--points", points, "Grid points")->capture_default_str();
  dens_solver.attach(density);
  dens_out.attach(density, "csv");

  // bulk
  auto* bulk = app.add_subcommand("bulk", "Intervals where the density exceeds a threshold");
  double threshold = 1e-3;
  Solver bulk_solver;
  Output bulk_out;
  bulk->add_option("--m1", m1, "First measure")->capture_default_str();
  bulk->add_option("--m2", m2, "Second measure")->capture_default_str();
  bulk->add_option("--range", range, "Grid bounds lo,hi")->capture_default_str();
  bulk->add_option("--points", points, "Grid points")->capture_default_str();
  bulk->add_option("--threshold", threshold, "Density threshold")->capture_default_str();
  bulk_solver.attach(bulk);
  bulk_out.attach(bulk, "csv");

  // edges
  auto* edges = app.add_subcommand("edges", "Support edges for bernoulli(xi) [+] two_point(zeta, theta)");
  double xi = 0.25, zeta = 0.25, theta = 1.0;
  Output edges_out;
  edges->add_option("--xi", xi, "Weight of bernoulli at 1, in (0, 1/2]")->capture_default_str();
  edges->add_option("--zeta", zeta, "Weight of two_point at theta, in [xi, 1/2]")->capture_default_str();
  edges->add_option("--theta", theta, "Second atom location, nonzero")->capture_default_str();
  edges_out.attach(edges, "csv");

  // atoms
  auto* atoms = app.add_subcommand("atoms", "Atoms of mu1 [+] mu2");
  Output atoms_out;
  atoms->add_option("--m1", m1, "First measure")->capture_default_str();
  atoms->add_option("--m2", m2, "Second measure")->capture_default_str();
  atoms_out.attach(atoms, "csv");

  // stability-map
  auto* stability = app.add_subcommand("stability-map", "Gamma and Im omega over an (E, eta) grid");
  std::string E_range = "0,2", eta_range = "1e-9,10";
  int E_points = 41, eta_points = 21;
  Solver stab_solver;
  Output stab_out;
  stability->add_option("--m1", m1, "First measure")->capture_default_str();
  stability->add_option("--m2", m2, "Second measure")->capture_default_str();
  stability->add_option("--E-range", E_range, "E bounds lo,hi")->capture_default_str();
  stability->add_option("--E-points", E_points, "E grid points (uniform)")->capture_default_str();
  stability->add_option("--eta-range", eta_range, "eta bounds lo,hi")->capture_default_str();
  stability->add_option("--eta-points", eta_points, "eta grid points (geometric)")->capture_default_str();
  stab_solver.attach(stability);
  stab_out.attach(stability, "csv");

  // continuity
  auto* continuity = app.add_subcommand("continuity", "Compare m_{A [+] B} with m_{alpha [+] beta} against Levy distances");
  std::string mA, mB, malpha, mbeta;
  Solver cont_solver;
  Output cont_out;
  continuity->add_option("--mA", mA, "Measure A")->required();
  continuity->add_option("--mB", mB, "Measure B")->required();
  continuity->add_option("--malpha", malpha, "Reference measure alpha")->required();
  continuity->add_option("--mbeta", mbeta, "Reference measure beta")->required();
  continuity->add_option("--E-range", E_range, "E bounds lo,hi")->capture_default_str();
  continuity->add_option("--E-points", E_points, "E grid points (uniform)")->capture_default_str();
  continuity->add_option("--eta-range", eta_range, "eta bounds lo,hi")->capture_default_str();
  continuity->add_option("--eta-points", eta_points, "eta grid points (geometric)")->capture_default_str();
  cont_solver.attach(continuity);
  cont_out.attach(continuity, "json");

  // rmt
  auto* rmt = app.add_subcommand("rmt", "Monte Carlo experiments for H = A + U B U*");
  rmt->fallthrough();
  std::string E_list = "1", eta_list = "0.0447213595499958";
  double E1 = 0.5, E2 = 1.5;
  std::string q = "identity";

  auto* local_law = rmt->add_subcommand("local-law", "|m_H - m| against the 1/(n eta^{3/2}) envelope");
  Ensemble ll_ens;
  Output ll_out;
  ll_ens.attach(local_law);
  local_law->add_option("--E", E_list, "Comma-separated energies")->capture_default_str();
  local_law->add_option("--eta", eta_list, "Comma-separated eta values")->capture_default_str();
  ll_out.attach(local_law, "csv");

  auto* counting = rmt->add_subcommand("counting", "Eigenvalue counts in [E1, E2) against the reference mass");
  Ensemble cnt_ens;
  Output cnt_out;
  cnt_ens.attach(counting);
  counting->add_option("--E1", E1, "Left end (included)")->capture_default_str();
  counting->add_option("--E2", E2, "Right end (excluded)")->capture_default_str();
  cnt_out.attach(counting, "csv");

  auto* concentration = rmt->add_subcommand("concentration", "Fluctuations of tr Q G_H(z) across trials");
  Ensemble conc_ens;
  Output conc_out;
  conc_ens.attach(concentration);
  concentration->add_option("--q", q, "Q matrix")->check(CLI::IsMember({"identity", "a", "b"}))->capture_default_str();
  concentration->add_option("--E", E_list, "Comma-separated energies")->capture_default_str();
  concentration->add_option("--eta", eta_list, "Comma-separated eta values")->capture_default_str();
  conc_out.attach(concentration, "csv");

  auto* subordination = rmt->add_subcommand("subordination", "Approximate subordination functions against the solver");
  Ensemble sub_ens;
  Output sub_out;
  sub_ens.attach(subordination);
  subordination->add_option("--E", E_list, "Comma-separated energies")->capture_default_str();
  subordination->add_option("--eta", eta_list, "Comma-separated eta values")->capture_default_str();
  sub_out.attach(subordination, "csv");

  for (auto* sub : app.get_subcommands({})) sub->configurable();
  for (auto* sub : rmt->get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (app.get_subcommands().empty() || (rmt->parsed() && rmt->get_subcommands().empty())) {
    std::cerr << "A subcommand is required\nRun with --help for more information.\n";
    return kExitUsage;
  }

  if (dump_config) {
    std::cout << dump_selected(app);
    return 0;
  }

  auto z_grid = [&] {
    std::vector<fc_complex> zs;
    for (double E : parse_numbers(E_list))
      for (double eta : parse_numbers(eta_list)) zs.push_back({E, eta});
    return zs;
  };

  try {
    if (convolve->parsed()) {
      const auto a = parse_measure(m1);
      const auto b = parse_measure(m2);
      fc_convolution r{};
      check(fc_convolve(a.get(), b.get(), parse_z(z_text), &conv_solver.opts, &r));
      if (conv_out.format == "json") {
        std::ostringstream os;
        os << "{\n \"z\": " << json_complex(r.z) << ",\n \"m\": " << json_complex(r.m)
           << ",\n \"omega1\": " << json_complex(r.omega1) << ",\n \"omega2\": " << json_complex(r.omega2)
           << ",\n \"gamma\": " << json_number(r.gamma) << ",\n \"residual\": " << json_number(r.residual)
           << ",\n \"density\": " << json_number(r.density) << ",\n \"iterations\": " << r.iterations << "\n}\n";
        conv_out.write(os.str());
      } else {
        std::ostringstream os;
        os << "z_re,z_im,m_re,m_im,omega1_re,omega1_im,omega2_re,omega2_im,gamma,residual,density,iterations\n"
           << json_number(r.z.re) << ',' << json_number(r.z.im) << ',' << json_number(r.m.re) << ','
           << json_number(r.m.im) << ',' << json_number(r.omega1.re) << ',' << json_number(r.omega1.im) << ','
           << json_number(r.omega2.re) << ',' << json_number(r.omega2.im) << ',' << json_number(r.gamma) << ','
           << json_number(r.residual) << ',' << json_number(r.density) << ',' << r.iterations << '\n';
        conv_out.write(os.str());
      }
    } else if (density->parsed() || bulk->parsed()) {
      const auto a = parse_measure(m1);
      const auto b = parse_measure(m2);
      const auto [lo, hi] = parse_range(range);
      fc_table* t = nullptr;
      if (density->parsed()) {
        check(fc_density_grid(a.get(), b.get(), lo, hi, points, &dens_solver.opts, &t));
        dens_out.table(TablePtr(t).get());
      } else {
        check(fc_find_bulk(a.get(), b.get(), lo, hi, points, threshold, &bulk_solver.opts, &t));
        bulk_out.table(TablePtr(t).get());
      }
    } else if (edges->parsed()) {
      double e[4];
      check(fc_twopoint_edges(xi, zeta, theta, e));
      if (edges_out.format == "json") {
        edges_out.write("[" + json_number(e[0]) + ", " + json_number(e[1]) + ", " + json_number(e[2]) + ", " +
                        json_number(e[3]) + "]\n");
      } else {
        edges_out.write(fixed6(e[0]) + " " + fixed6(e[1]) + " " + fixed6(e[2]) + " " + fixed6(e[3]) + "\n");
      }
    } else if (atoms->parsed()) {
      const auto a = parse_measure(m1);
      const auto b = parse_measure(m2);
      fc_table* t = nullptr;
      check(fc_atoms(a.get(), b.get(), &t));
      atoms_out.table(TablePtr(t).get());
    } else if (stability->parsed()) {
      const auto a = parse_measure(m1);
      const auto b = parse_measure(m2);
      const auto [Elo, Ehi] = parse_range(E_range);
      const auto [elo, ehi] = parse_range(eta_range);
      const auto Es = linspace(Elo, Ehi, E_points);
      const auto etas = logspace(elo, ehi, eta_points);
      fc_table* t = nullptr;
      fc_stability_summary summary{};
      check(fc_stability_map(a.get(), b.get(), Es.data(), Es.size(), etas.data(), etas.size(), &stab_solver.opts,
                             &t, &summary));
      stab_out.table(TablePtr(t).get());
    } else if (continuity->parsed()) {
      const auto A = parse_measure(mA);
      const auto B = parse_measure(mB);
      const auto al = parse_measure(malpha);
      const auto be = parse_measure(mbeta);
      const auto [Elo, Ehi] = parse_range(E_range);
      const auto [elo, ehi] = parse_range(eta_range);
      const auto Es = linspace(Elo, Ehi, E_points);
      const auto etas = logspace(elo, ehi, eta_points);
      fc_continuity r{};
      check(fc_continuity_check(A.get(), B.get(), al.get(), be.get(), Es.data(), Es.size(), etas.data(), etas.size(),
                                &cont_solver.opts, &r));
      if (cont_out.format == "json") {
        cont_out.write("{\n \"max_lhs\": " + json_number(r.max_lhs) + ",\n \"dL_sum\": " + json_number(r.dL_sum) +
                       ",\n \"empirical_Z\": " + json_number(r.empirical_Z) + "\n}\n");
      } else {
        cont_out.write("max_lhs,dL_sum,empirical_Z\n" + json_number(r.max_lhs) + "," + json_number(r.dL_sum) + "," +
                       json_number(r.empirical_Z) + "\n");
      }
    } else if (local_law->parsed()) {
      auto bound = ll_ens.bind();
      const auto Es = parse_numbers(E_list);
      const auto etas = parse_numbers(eta_list);
      fc_table* t = nullptr;
      check(fc_rmt_local_law(&bound.cfg, Es.data(), Es.size(), etas.data(), etas.size(), &t));
      ll_out.table(TablePtr(t).get());
      ll_ens.dump_eigenvalues(bound.cfg);
    } else if (counting->parsed()) {
      auto bound = cnt_ens.bind();
      fc_table* t = nullptr;
      check(fc_rmt_counting(&bound.cfg, E1, E2, &t));
      cnt_out.table(TablePtr(t).get());
      cnt_ens.dump_eigenvalues(bound.cfg);
    } else if (concentration->parsed()) {
      auto bound = conc_ens.bind();
      const auto zs = z_grid();
      const fc_q kind = q == "a" ? FC_Q_MATRIX_A : q == "b" ? FC_Q_MATRIX_B : FC_Q_IDENTITY;
      fc_table* t = nullptr;
      check(fc_rmt_concentration(&bound.cfg, kind, zs.data(), zs.size(), &t));
      conc_out.table(TablePtr(t).get());
      conc_ens.dump_eigenvalues(bound.cfg);
    } else if (subordination->parsed()) {
      auto bound = sub_ens.bind();
      const auto zs = z_grid();
      fc_table* t = nullptr;
      check(fc_rmt_subordination(&bound.cfg, zs.data(), zs.size(), &t));
      sub_out.table(TablePtr(t).get());
      sub_ens.dump_eigenvalues(bound.cfg);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
  return 0;
}
