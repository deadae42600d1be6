#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fmes/assembly.hpp"
#include "fmes/schemes.hpp"
#include "fmes/spectral.hpp"

namespace fmes {

struct SchemeEntry {
  SchemeKind kind = SchemeKind::theta_standard;
  double sigma = 1.0;
  int l = 0;
  int m = 1;
  std::vector<std::size_t> steps;
};

struct SolverSettings {
  double outer_tolerance = 1e-10;
  double inner_tolerance = 1e-12;
  std::size_t max_iterations = 20000;
  double eigen_tolerance = 1e-13;
  double eigen_inner_tolerance = 1e-11;
  std::size_t eigen_max_iterations = 50;

  StepperOptions stepper() const { return {outer_tolerance, inner_tolerance, max_iterations}; }
  InverseIterationOptions eigen() const;
};

struct ExperimentConfig {
  std::size_t n_side = 26;
  ProblemCoefficients coeffs;
  MassMode mass_mode = MassMode::consistent;
  double final_time = 0.1;
  std::size_t reference_steps = 1000;
  std::vector<SchemeEntry> schemes;
  std::filesystem::path output_dir = "results";
  SolverSettings solver;
  std::vector<std::size_t> table_grids{26, 51, 101};
  std::size_t table_iterations = 10;

  /// c = 0, T = 0.1, u0 = 1; standard and FMES sigma = 1 at N in {10, 20, 40, 100}.
  static ExperimentConfig baseline();
  void validate() const;
};

/// Reads a JSON config; absent keys keep their baseline values.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Name of the variable that overrides `output_dir`.
inline constexpr const char* output_dir_env = "FMES_OUTPUT_DIR";

// ---------------------------------------------------------------------------
// Metrics

/// (y^n, phi1)_M - (y^0, phi1)_M exp(-lambda1 t^n)
double epsilon_a(const FemSystem& sys, std::span<const double> y_n, std::span<const double> y_0, const EigenPair& pair,
                 double t_n);

/// ||y^n - reference^n||_M / ||y^n||_M; throws std::domain_error on a zero denominator.
double epsilon_u(const FemSystem& sys, std::span<const double> y_n, std::span<const double> reference_n);

/// Fully implicit run with a fine step, retained at the levels shared with
/// every coarse step count.
class ReferenceSolution {
 public:
  ReferenceSolution(std::size_t fine_steps, double final_time, std::map<std::size_t, Vector> states)
      : fine_steps_(fine_steps), final_time_(final_time), states_(std::move(states)) {}

  std::size_t fine_steps() const { return fine_steps_; }
  double final_time() const { return final_time_; }
  const std::map<std::size_t, Vector>& states() const { return states_; }
  /// State at level n of a run with `coarse_steps` steps.
  const Vector& at(std::size_t coarse_steps, std::size_t n) const;

 private:
  std::size_t fine_steps_;
  double final_time_;
  std::map<std::size_t, Vector> states_;
};

/// Throws std::invalid_argument unless every coarse count divides n_steps.
ReferenceSolution make_reference(const FemSystem& sys, std::span<const double> w0, double final_time,
                                 std::size_t n_steps, std::span<const std::size_t> coarse_steps,
                                 const StepperOptions& options = {});

// ---------------------------------------------------------------------------
// Runs

struct RunRecord {
  double t = 0.0;
  double norm_m = 0.0;
  double eps_a = 0.0;
  double eps_u = 0.0;
};

struct RunResult {
  SchemeSpec spec;
  std::vector<RunRecord> records;
  double lambda1 = 0.0;
  double wall_seconds = 0.0;
  bool ok = false;
  std::string error;

  double max_abs_eps_a() const;
  double max_eps_u() const;
  std::string file_name() const;
};

struct ExperimentReport {
  EigenPair pair;
  std::vector<RunResult> runs;
  bool all_ok() const;
};

/// Assemble, eigensolve, run every scheme/step-count pair against the
/// reference, and write one CSV per run plus summary.csv and eigenpair.csv.
/// Pass an empty path to skip writing files.
ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir);
ExperimentReport run_experiment(const ExperimentConfig& config);

struct Table1 {
  std::vector<std::size_t> grids;
  std::vector<std::vector<double>> estimates;  // estimates[g][m-1]
  std::vector<EigenPair> pairs;
  std::vector<double> seconds;
};

Table1 run_table1(const ExperimentConfig& config);
void write_table1(const Table1& table, const std::filesystem::path& path);

/// Scalar tables: fmes_weight.csv (eta, sigma1) and multipliers.csv
/// (z, exp(-z), r(0.5, z), r(1, z), R01, R11, R02, R22).
void write_analysis(const std::filesystem::path& output_dir);

std::string format_double(double v);

}  // namespace fmes
