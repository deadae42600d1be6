#include "fmes/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fmes {

using nlohmann::json;

InverseIterationOptions SolverSettings::eigen() const {
  InverseIterationOptions o;
  o.tolerance = eigen_tolerance;
  o.max_iterations = eigen_max_iterations;
  o.inner_tolerance = eigen_inner_tolerance;
  o.inner_max_iterations = max_iterations;
  return o;
}

ExperimentConfig ExperimentConfig::baseline() {
  ExperimentConfig c;
  c.schemes = {
      {SchemeKind::theta_standard, 1.0, 0, 1, {10, 20, 40, 100}},
      {SchemeKind::theta_fmes, 1.0, 0, 1, {10, 20, 40, 100}},
  };
  return c;
}

void ExperimentConfig::validate() const {
  if (n_side < 2) throw std::invalid_argument("config: mesh.n_side must be >= 2");
  coeffs.validate();
  if (!(final_time > 0.0)) throw std::invalid_argument("config: time.final_time must be positive");
  if (reference_steps < 1) throw std::invalid_argument("config: time.reference_steps must be >= 1");
  for (const auto& entry : schemes) {
    if (entry.steps.empty()) throw std::invalid_argument("config: scheme " + to_string(entry.kind) + " has no steps");
    for (std::size_t n : entry.steps) {
      SchemeSpec spec{entry.kind, entry.sigma, entry.l, entry.m, final_time / static_cast<double>(n), n, 0.0};
      spec.validate();
      if (n > reference_steps || reference_steps % n != 0) {
        throw std::invalid_argument("config: step count " + std::to_string(n) + " does not divide reference_steps " +
                                    std::to_string(reference_steps));
      }
    }
  }
  if (table_iterations < 1) throw std::invalid_argument("config: table1.iterations must be >= 1");
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(j, {"mesh", "coefficients", "mass", "time", "schemes", "solver", "table1", "output_dir"}, "config");

  ExperimentConfig c = ExperimentConfig::baseline();
  try {
    if (j.contains("mesh")) {
      reject_unknown(j["mesh"], {"n_side"}, "mesh");
      read_if(j["mesh"], "n_side", c.n_side);
    }
    if (j.contains("coefficients")) {
      const json& cj = j["coefficients"];
      reject_unknown(cj, {"k_inner", "k_outer", "c", "mu_right_top", "mu_left_bottom"}, "coefficients");
      read_if(cj, "k_inner", c.coeffs.k_inner);
      read_if(cj, "k_outer", c.coeffs.k_outer);
      read_if(cj, "c", c.coeffs.c);
      read_if(cj, "mu_right_top", c.coeffs.mu_right_top);
      read_if(cj, "mu_left_bottom", c.coeffs.mu_left_bottom);
    }
    if (j.contains("mass")) {
      const auto mode = j["mass"].get<std::string>();
      if (mode == "consistent") {
        c.mass_mode = MassMode::consistent;
      } else if (mode == "lumped") {
        c.mass_mode = MassMode::lumped;
      } else {
        throw std::invalid_argument("config: mass must be 'consistent' or 'lumped'");
      }
    }
    if (j.contains("time")) {
      reject_unknown(j["time"], {"final_time", "reference_steps"}, "time");
      read_if(j["time"], "final_time", c.final_time);
      read_if(j["time"], "reference_steps", c.reference_steps);
    }
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const json& sj : j["schemes"]) {
        reject_unknown(sj, {"kind", "sigma", "l", "m", "steps"}, "schemes[]");
        SchemeEntry e;
        e.kind = scheme_kind_from_string(sj.at("kind").get<std::string>());
        read_if(sj, "sigma", e.sigma);
        read_if(sj, "l", e.l);
        read_if(sj, "m", e.m);
        read_if(sj, "steps", e.steps);
        c.schemes.push_back(std::move(e));
      }
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      reject_unknown(s,
                     {"outer_tolerance", "inner_tolerance", "max_iterations", "eigen_tolerance",
                      "eigen_inner_tolerance", "eigen_max_iterations"},
                     "solver");
      read_if(s, "outer_tolerance", c.solver.outer_tolerance);
      read_if(s, "inner_tolerance", c.solver.inner_tolerance);
      read_if(s, "max_iterations", c.solver.max_iterations);
      read_if(s, "eigen_tolerance", c.solver.eigen_tolerance);
      read_if(s, "eigen_inner_tolerance", c.solver.eigen_inner_tolerance);
      read_if(s, "eigen_max_iterations", c.solver.eigen_max_iterations);
    }
    if (j.contains("table1")) {
      reject_unknown(j["table1"], {"grids", "iterations"}, "table1");
      read_if(j["table1"], "grids", c.table_grids);
      read_if(j["table1"], "iterations", c.table_iterations);
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------

double epsilon_a(const FemSystem& sys, std::span<const double> y_n, std::span<const double> y_0, const EigenPair& pair,
                 double t_n) {
  return m_inner(sys, y_n, pair.phi1) - m_inner(sys, y_0, pair.phi1) * std::exp(-pair.lambda1 * t_n);
}

double epsilon_u(const FemSystem& sys, std::span<const double> y_n, std::span<const double> reference_n) {
  if (y_n.size() != reference_n.size()) throw std::invalid_argument("epsilon_u: dimension mismatch");
  const double denom = m_norm(sys, y_n);
  if (denom == 0.0) throw std::domain_error("epsilon_u: solution has zero norm");
  Vector diff(y_n.begin(), y_n.end());
  axpy(-1.0, reference_n, diff);
  return m_norm(sys, diff) / denom;
}

const Vector& ReferenceSolution::at(std::size_t coarse_steps, std::size_t n) const {
  if (coarse_steps == 0 || fine_steps_ % coarse_steps != 0) {
    throw std::invalid_argument("ReferenceSolution::at: step count does not divide the reference step count");
  }
  const auto it = states_.find(n * (fine_steps_ / coarse_steps));
  if (it == states_.end()) throw std::out_of_range("ReferenceSolution::at: level not retained");
  return it->second;
}

ReferenceSolution make_reference(const FemSystem& sys, std::span<const double> w0, double final_time,
                                 std::size_t n_steps, std::span<const std::size_t> coarse_steps,
                                 const StepperOptions& options) {
  if (n_steps < 1) throw std::invalid_argument("make_reference: n_steps must be >= 1");
  std::set<std::size_t> strides;
  for (std::size_t n : coarse_steps) {
    if (n == 0 || n > n_steps || n_steps % n != 0) {
      throw std::invalid_argument("make_reference: coarse step count " + std::to_string(n) +
                                  " does not divide reference step count " + std::to_string(n_steps));
    }
    strides.insert(n_steps / n);
  }

  SchemeSpec spec{SchemeKind::theta_standard, 1.0, 0, 1, final_time / static_cast<double>(n_steps), n_steps, 0.0};
  std::map<std::size_t, Vector> states;
  RunOptions run;
  run.stepper = options;
  run.sample_stride = 0;
  run.observer = [&](std::size_t level, std::span<const double> y) {
    const bool keep = std::any_of(strides.begin(), strides.end(), [&](std::size_t s) { return level % s == 0; });
    if (keep) states.emplace(level, Vector(y.begin(), y.end()));
  };
  run_scheme(spec, sys, w0, run);
  return ReferenceSolution(n_steps, final_time, std::move(states));
}

// ---------------------------------------------------------------------------

double RunResult::max_abs_eps_a() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, std::abs(r.eps_a));
  return m;
}

double RunResult::max_eps_u() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.eps_u);
  return m;
}

std::string RunResult::file_name() const {
  return to_string(spec.kind) + "_" + spec.parameter_label() + "_N" + std::to_string(spec.n_steps) + ".csv";
}

bool ExperimentReport::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.ok; });
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_run_csv(const RunResult& run, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,norm_m,eps_a,eps_u\n";
  for (const auto& r : run.records) {
    out << format_double(r.t) << ',' << format_double(r.norm_m) << ',' << format_double(r.eps_a) << ','
        << format_double(r.eps_u) << '\n';
  }
}

void write_eigenpair_csv(const ExperimentConfig& config, const EigenPair& pair, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "n_side,c,lambda1_bar,lambda1,iterations,residual\n";
  out << config.n_side << ',' << format_double(config.coeffs.c) << ',' << format_double(pair.lambda1_bar) << ','
      << format_double(pair.lambda1) << ',' << pair.iterations << ',' << format_double(pair.residual) << '\n';
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  std::filesystem::path dir = config.output_dir;
  if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0') dir = env;
  return run_experiment(config, dir);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  config.validate();
  const FemSystem sys = assemble(build_mesh(config.n_side), config.coeffs, config.mass_mode);

  ExperimentReport report;
  report.pair = inverse_iteration(sys, config.solver.eigen());
  // u0 = 1 lies in the P1 space, so its L2 projection is the all-ones vector.
  const Vector w0(sys.dimension(), 1.0);

  const bool write = !output_dir.empty();
  if (write) {
    std::filesystem::create_directories(output_dir);
    write_eigenpair_csv(config, report.pair, output_dir / "eigenpair.csv");
  }
  if (config.schemes.empty()) return report;

  std::vector<std::size_t> counts;
  bool needs_basis = false;
  for (const auto& e : config.schemes) {
    counts.insert(counts.end(), e.steps.begin(), e.steps.end());
    needs_basis = needs_basis || e.kind == SchemeKind::pade_modal;
  }
  const StepperOptions stepper = config.solver.stepper();
  const ReferenceSolution reference =
      make_reference(sys, w0, config.final_time, config.reference_steps, counts, stepper);
  std::optional<ModalBasis> basis;
  if (needs_basis) basis = modal_decompose(sys);

  const double y0_amplitude = m_inner(sys, w0, report.pair.phi1);
  for (const auto& entry : config.schemes) {
    for (std::size_t n_steps : entry.steps) {
      RunResult run;
      run.spec = SchemeSpec{entry.kind,
                            entry.sigma,
                            entry.l,
                            entry.m,
                            config.final_time / static_cast<double>(n_steps),
                            n_steps,
                            entry.kind == SchemeKind::theta_standard ? 0.0 : report.pair.lambda1};
      run.lambda1 = report.pair.lambda1;
      const auto start = std::chrono::steady_clock::now();
      try {
        RunOptions opts;
        opts.stepper = stepper;
        opts.sample_stride = 0;
        opts.basis = basis ? &*basis : nullptr;
        opts.observer = [&](std::size_t level, std::span<const double> y) {
          RunRecord rec;
          rec.t = static_cast<double>(level) * run.spec.tau;
          rec.norm_m = m_norm(sys, y);
          rec.eps_a = m_inner(sys, y, report.pair.phi1) - y0_amplitude * std::exp(-report.pair.lambda1 * rec.t);
          rec.eps_u = epsilon_u(sys, y, reference.at(n_steps, level));
          run.records.push_back(rec);
        };
        run_scheme(run.spec, sys, w0, opts);
        run.ok = true;
      } catch (const std::exception& e) {
        run.error = e.what();
      }
      run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (write && run.ok) write_run_csv(run, output_dir / run.file_name());
      report.runs.push_back(std::move(run));
    }
  }

  if (write) {
    std::ofstream out(output_dir / "summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv");
    out << "scheme,params,N,max_eps_a,max_eps_u,final_norm\n";
    for (const auto& run : report.runs) {
      if (!run.ok) continue;
      out << to_string(run.spec.kind) << ',' << run.spec.parameter_label() << ',' << run.spec.n_steps << ','
          << format_double(run.max_abs_eps_a()) << ',' << format_double(run.max_eps_u()) << ','
          << format_double(run.records.back().norm_m) << '\n';
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

Table1 run_table1(const ExperimentConfig& config) {
  Table1 table;
  table.grids = config.table_grids;
  InverseIterationOptions opts = config.solver.eigen();
  opts.min_iterations = std::max(opts.min_iterations, config.table_iterations);
  opts.max_iterations = std::max(opts.max_iterations, config.table_iterations);
  for (std::size_t n_side : config.table_grids) {
    const auto start = std::chrono::steady_clock::now();
    const FemSystem sys = assemble(build_mesh(n_side), config.coeffs, config.mass_mode);
    EigenPair pair = inverse_iteration(sys, opts);
    table.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    table.estimates.emplace_back(pair.history.begin(),
                                 pair.history.begin() + static_cast<std::ptrdiff_t>(config.table_iterations));
    table.pairs.push_back(std::move(pair));
  }
  return table;
}

void write_table1(const Table1& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "m";
  for (std::size_t g : table.grids) out << ",N" << g;
  out << '\n';
  const std::size_t rows = table.estimates.empty() ? 0 : table.estimates.front().size();
  for (std::size_t m = 0; m < rows; ++m) {
    out << m + 1;
    for (const auto& column : table.estimates) out << ',' << format_double(column[m]);
    out << '\n';
  }
}

void write_analysis(const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);
  {
    std::ofstream out(output_dir / "fmes_weight.csv");
    if (!out) throw std::runtime_error("cannot write fmes_weight.csv");
    out << "eta,sigma1\n";
    for (int i = 1; i <= 200; ++i) {
      const double eta = 0.025 * i;
      out << format_double(eta) << ',' << format_double(fmes_weight(eta)) << '\n';
    }
  }
  std::ofstream out(output_dir / "multipliers.csv");
  if (!out) throw std::runtime_error("cannot write multipliers.csv");
  const PadeCoefficients r01 = pade_coefficients(0, 1);
  const PadeCoefficients r11 = pade_coefficients(1, 1);
  const PadeCoefficients r02 = pade_coefficients(0, 2);
  const PadeCoefficients r22 = pade_coefficients(2, 2);
  out << "z,exp,r_sigma0.5,r_sigma1,R01,R11,R02,R22\n";
  for (int i = 0; i <= 200; ++i) {
    const double z = 0.05 * i;
    out << format_double(z) << ',' << format_double(std::exp(-z)) << ',' << format_double(amplification_factor(0.5, z))
        << ',' << format_double(amplification_factor(1.0, z)) << ',' << format_double(r01(z)) << ','
        << format_double(r11(z)) << ',' << format_double(r02(z)) << ',' << format_double(r22(z)) << '\n';
  }
}

}  // namespace fmes
