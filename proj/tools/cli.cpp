#include "cli.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bloch/eigenframe.hpp"
#include "bloch/oracle.hpp"
#include "bloch/regime.hpp"
#include "bloch/sampling.hpp"
#include "bloch/solution.hpp"

namespace bloch::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string w_spec, r_spec, m0_spec, t_grid_spec, lambda_grid_spec;
  double t = 0.0;
  bool has_t = false;
  double meq = 1.0;
  std::string format;
  std::string output;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int samples = 1000;
  int column = 0;
  bool hz = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& spec, char sep, size_t count,
                                  const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      size_t pos = 0;
      vals.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": cannot parse '" + item + "'");
    }
  }
  if (vals.size() != count) {
    throw UsageError(flag + ": expected " + std::to_string(count) + " values");
  }
  return vals;
}

FieldVector parse_field(const Options& opt) {
  if (opt.w_spec.empty()) throw UsageError("--w a,b,c is required");
  auto v = parse_numbers(opt.w_spec, ',', 3, "--w");
  const double f = opt.hz ? 2.0 * std::numbers::pi : 1.0;
  return {f * v[0], f * v[1], f * v[2]};
}

RelaxationRates parse_rates(const Options& opt) {
  if (opt.r_spec.empty()) throw UsageError("--r a,b,c is required");
  auto v = parse_numbers(opt.r_spec, ',', 3, "--r");
  return {v[0], v[1], v[2]};
}

std::vector<double> parse_t_grid(const Options& opt) {
  if (opt.t_grid_spec.empty()) throw UsageError("--t-grid START:STOP:N is required");
  auto v = parse_numbers(opt.t_grid_spec, ':', 3, "--t-grid");
  const int n = static_cast<int>(v[2]);
  if (n < 1 || v[2] != n) throw UsageError("--t-grid: N must be a positive integer");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = (n == 1) ? v[0] : v[0] + (v[1] - v[0]) * i / (n - 1);
  }
  return grid;
}

json echo_system(const Options& opt) {
  json in;
  in["w"] = parse_numbers(opt.w_spec, ',', 3, "--w");
  in["r"] = parse_numbers(opt.r_spec, ',', 3, "--r");
  in["hz"] = opt.hz;
  return in;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Matrix3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  }
  return rows;
}

json vector_json(const Vector3& v) { return json::array({v(0), v(1), v(2)}); }

json finite_or_null(double x) {
  if (std::isfinite(x)) return json(x);
  return json();
}

json roots_json(const CubicSolution& sol) {
  json r;
  r["a"] = sol.a;
  r["b"] = sol.b;
  r["gamma"] = finite_or_null(sol.gamma);
  r["class"] = root_class_name(sol.root_class);
  r["z1"] = sol.z1;
  r["varpi"] = sol.varpi;
  r["varpi_sq"] = sol.varpi_sq;
  r["r_bar"] = sol.r_bar;
  r["s1"] = sol.s1().real();
  r["s2"] = complex_json(sol.s2());
  r["s3"] = complex_json(sol.s3());
  return r;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void require_format(const Options& opt, std::initializer_list<const char*> allowed) {
  if (opt.format.empty()) return;
  for (const char* f : allowed) {
    if (opt.format == f) return;
  }
  throw UsageError("--format " + opt.format + " is not supported by this command");
}

CubicSolution solve_system(const GammaMatrix& g, PartitionedSystem* p_out) {
  const PartitionedSystem p = partition(g);
  if (p_out) *p_out = p;
  return solve_roots(canonical_coeffs(p), p.r_bar);
}

int cmd_propagate(const Options& opt, std::ostream& out) {
  require_format(opt, {"json"});
  if (!opt.has_t) throw UsageError("--t SECONDS is required");
  const GammaMatrix g = build_gamma(parse_field(opt), parse_rates(opt));
  const Propagator p = propagator(g, opt.t);
  json doc;
  doc["schema"] = kSchema;
  doc["command"] = "propagate";
  doc["input"] = echo_system(opt);
  doc["input"]["t"] = opt.t;
  doc["branch"] = root_class_name(p.branch);
  doc["matrix"] = matrix_json(p.m);
  doc["roots"] = roots_json(p.roots);
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_roots(const Options& opt, std::ostream& out) {
  require_format(opt, {"json"});
  const GammaMatrix g = build_gamma(parse_field(opt), parse_rates(opt));
  const CubicSolution sol = solve_system(g, nullptr);
  json doc;
  doc["schema"] = kSchema;
  doc["command"] = "roots";
  doc["input"] = echo_system(opt);
  doc["roots"] = roots_json(sol);
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_steady_state(const Options& opt, std::ostream& out) {
  require_format(opt, {"json"});
  const GammaMatrix g = build_gamma(parse_field(opt), parse_rates(opt));
  const Magnetization m = steady_state(g, opt.meq);
  json doc;
  doc["schema"] = kSchema;
  doc["command"] = "steady-state";
  doc["input"] = echo_system(opt);
  doc["input"]["meq"] = opt.meq;
  doc["m_inf"] = json::array({m.mx, m.my, m.mz});
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_trajectory(const Options& opt, std::ostream& out) {
  require_format(opt, {"csv", "json"});
  const GammaMatrix g = build_gamma(parse_field(opt), parse_rates(opt));
  if (opt.m0_spec.empty()) throw UsageError("--m0 x,y,z is required");
  auto m0v = parse_numbers(opt.m0_spec, ',', 3, "--m0");
  const Magnetization m_init{m0v[0], m0v[1], m0v[2]};
  const std::vector<double> grid = parse_t_grid(opt);
  const auto samples = trajectory(g, m_init, opt.meq, grid);

  if (opt.format == "json") {
    json doc;
    doc["schema"] = kSchema;
    doc["command"] = "trajectory";
    doc["input"] = echo_system(opt);
    doc["input"]["m0"] = m0v;
    doc["input"]["meq"] = opt.meq;
    doc["input"]["t_grid"] = opt.t_grid_spec;
    json rows = json::array();
    for (const auto& [t, m] : samples) {
      rows.push_back(json::array({t, m.mx, m.my, m.mz}));
    }
    doc["samples"] = rows;
    out << doc.dump(2) << "\n";
    return kOk;
  }
  out << "t,mx,my,mz\n";
  for (const auto& [t, m] : samples) {
    out << csv_number(t) << ',' << csv_number(m.mx) << ',' << csv_number(m.my)
        << ',' << csv_number(m.mz) << "\n";
  }
  return kOk;
}

int cmd_regimes(const Options& opt, std::ostream& out) {
  require_format(opt, {"csv", "json"});
  if (opt.lambda_grid_spec.empty()) {
    throw UsageError("--lambda-grid L12MAX,L3MAX,N is required");
  }
  auto v = parse_numbers(opt.lambda_grid_spec, ',', 3, "--lambda-grid");
  const int n = static_cast<int>(v[2]);
  if (n < 1 || v[2] != n) throw UsageError("--lambda-grid: N must be a positive integer");
  const AtlasGrid grid = atlas_grid({0.0, v[0]}, {0.0, v[1]}, n, n);

  if (opt.format == "json") {
    json doc;
    doc["schema"] = kSchema;
    doc["command"] = "regimes";
    doc["input"]["lambda_grid"] = v;
    json cells = json::array();
    for (const auto& c : grid.cells) {
      cells.push_back(json::array({c.lambda12, c.lambda3, root_class_name(c.regime),
                                   c.z1_over_rdelta, c.varpi_over_rdelta}));
    }
    doc["cells"] = cells;
    out << doc.dump(2) << "\n";
    return kOk;
  }
  out << "lambda12,lambda3,class,z1_over_Rdelta,varpi_over_Rdelta\n";
  for (const auto& c : grid.cells) {
    out << csv_number(c.lambda12) << ',' << csv_number(c.lambda3) << ','
        << root_class_name(c.regime) << ',' << csv_number(c.z1_over_rdelta) << ','
        << csv_number(c.varpi_over_rdelta) << "\n";
  }
  return kOk;
}

int cmd_frame(const Options& opt, std::ostream& out) {
  require_format(opt, {"json"});
  const GammaMatrix g = build_gamma(parse_field(opt), parse_rates(opt));
  PartitionedSystem p;
  const CubicSolution sol = solve_system(g, &p);
  std::optional<int> column;
  if (opt.column != 0) column = opt.column;
  const EigenFrame frame = real_basis(p, sol, column);
  const Obliquity ob = obliquity(frame);

  json doc;
  doc["schema"] = kSchema;
  doc["command"] = "frame";
  doc["input"] = echo_system(opt);
  if (column) doc["input"]["column"] = *column;
  doc["class"] = root_class_name(sol.root_class);
  doc["column_used"] = frame.column_used;
  doc["basis"]["s1"] = vector_json(frame.s1);
  doc["basis"]["s2"] = vector_json(frame.s2);
  doc["basis"]["s3"] = vector_json(frame.s3);
  const EigenFrame unit = frame.normalized();
  doc["basis_normalized"]["s1"] = vector_json(unit.s1);
  doc["basis_normalized"]["s2"] = vector_json(unit.s2);
  doc["basis_normalized"]["s3"] = vector_json(unit.s3);
  doc["p_inverse"] = matrix_json(frame.p_inverse);
  doc["rates"]["r1s"] = frame.r1s;
  doc["rates"]["r2s"] = frame.r2s;
  doc["rates"]["r3s"] = frame.r3s;
  doc["varpi"] = frame.varpi;
  doc["obliquity"]["angle_s1_normal"] = ob.angle_s1_normal;
  doc["obliquity"]["plane_skew"] = ob.plane_skew;
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  require_format(opt, {"json"});
  if (opt.samples < 1) throw UsageError("--samples must be positive");

  double max_err = 0.0;
  json worst;
  const bool single_system = !opt.w_spec.empty() || !opt.r_spec.empty();
  SplitMix64 rng(opt.seed);

  for (int i = 0; i < opt.samples; ++i) {
    GammaMatrix g;
    double t = 0.0;
    if (single_system) {
      g = build_gamma(parse_field(opt), parse_rates(opt));
      const double scale =
          std::max({g.rates.r_bar(), 0.1 * g.field.omega_e(), 1e-30});
      const double t_max = 5.0 / scale;
      t = (opt.samples == 1) ? t_max : t_max * i / (opt.samples - 1);
    } else {
      const SystemSample s = sample_system(rng);
      g = build_gamma(s.field, s.rates);
      t = rng.uniform(0.0, 5.0 / g.rates.r_bar());
    }
    const Matrix3 closed = propagator(g, t).m;
    const Matrix3 reference = expm_reference(-g.m * t);
    const double err = (closed - reference).cwiseAbs().maxCoeff() /
                       reference.cwiseAbs().maxCoeff();
    if (err > max_err) {
      max_err = err;
      worst["w"] = vector_json(g.field.vec());
      worst["r"] = vector_json(g.rates.vec());
      worst["t"] = t;
    }
  }

  const bool pass = max_err <= opt.tol;
  json doc;
  doc["schema"] = kSchema;
  doc["command"] = "verify";
  doc["seed"] = opt.seed;
  doc["samples"] = opt.samples;
  doc["tol"] = opt.tol;
  doc["max_rel_error"] = max_err;
  doc["worst"] = worst;
  doc["pass"] = pass;
  out << doc.dump(2) << "\n";
  return pass ? kOk : kVerifyFailed;
}

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--w", opt.w_spec, "field components w1,w2,w3 [rad/s]");
  cmd->add_option("--r", opt.r_spec, "relaxation rates r1,r2,r3 [1/s]");
  cmd->add_flag("--hz", opt.hz, "interpret --w in Hz (multiplied by 2*pi)");
  cmd->add_option("--format", opt.format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--output", opt.output, "write the document to a file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"closed-form Bloch equation propagator toolkit", "blochprop"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* propagate = app.add_subcommand("propagate", "evaluate e^{-Gamma t}");
  add_common_flags(propagate, opt);
  propagate->add_option("--t", opt.t, "time [s]")->each([&opt](const std::string&) {
    opt.has_t = true;
  });

  CLI::App* trajectory = app.add_subcommand("trajectory", "sample M(t) on a time grid");
  add_common_flags(trajectory, opt);
  trajectory->add_option("--t-grid", opt.t_grid_spec, "time grid START:STOP:N");
  trajectory->add_option("--m0", opt.m0_spec, "initial magnetization x,y,z");
  trajectory->add_option("--meq", opt.meq, "equilibrium magnetization scalar");

  CLI::App* steady = app.add_subcommand("steady-state", "steady-state magnetization");
  add_common_flags(steady, opt);
  steady->add_option("--meq", opt.meq, "equilibrium magnetization scalar");

  CLI::App* roots = app.add_subcommand("roots", "characteristic root analysis");
  add_common_flags(roots, opt);

  CLI::App* regimes = app.add_subcommand("regimes", "damping-regime atlas grid");
  add_common_flags(regimes, opt);
  regimes->add_option("--lambda-grid", opt.lambda_grid_spec,
                      "scaled grid L12MAX,L3MAX,N");

  CLI::App* frame = app.add_subcommand("frame", "oblique eigenframe decomposition");
  add_common_flags(frame, opt);
  frame->add_option("--column", opt.column, "adjugate column 1|2|3")
      ->check(CLI::Range(1, 3));

  CLI::App* verify = app.add_subcommand("verify", "closed form vs oracle comparison");
  add_common_flags(verify, opt);
  verify->add_option("--samples", opt.samples, "number of systems or time samples");
  verify->add_option("--tol", opt.tol, "maximum relative error");
  verify->add_option("--seed", opt.seed, "random generator seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help() << "\n";
      return kOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.output.empty()) {
    file.open(opt.output);
    if (!file) {
      err << "usage error: cannot open output file " << opt.output << "\n";
      return kUsage;
    }
    sink = &file;
  }

  try {
    if (propagate->parsed()) return cmd_propagate(opt, *sink);
    if (trajectory->parsed()) return cmd_trajectory(opt, *sink);
    if (steady->parsed()) return cmd_steady_state(opt, *sink);
    if (roots->parsed()) return cmd_roots(opt, *sink);
    if (regimes->parsed()) return cmd_regimes(opt, *sink);
    if (frame->parsed()) return cmd_frame(opt, *sink);
    if (verify->parsed()) return cmd_verify(opt, *sink);
    err << "usage error: no command given\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const BlochError& e) {
    json doc;
    doc["schema"] = kSchema;
    doc["error"]["code"] = e.code_name();
    doc["error"]["message"] = e.what();
    err << doc.dump(2) << "\n";
    return kDomain;
  }
}

}  // namespace bloch::cli
