#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmes/assembly.hpp"
#include "fmes/solver.hpp"
#include "fmes/spectral.hpp"

namespace fmes {

// ---------------------------------------------------------------------------
// Scalar layer

/// Per-mode multiplier of the two-level weighted scheme,
/// r(sigma, eta) = (1 - (1 - sigma) eta) / (1 + sigma eta).
double amplification_factor(double sigma, double eta);

/// Weight sigma with r(sigma, eta) = exp(-eta). Tends to 1/2 as eta -> 0;
/// eta == 0 itself is rejected.
double fmes_weight(double eta);

struct PadeCoefficients {
  std::vector<double> p;  // p[k] multiplies z^k, degree l
  std::vector<double> q;  // degree m

  double numerator(double z) const;
  double denominator(double z) const;
  /// R_lm(z) = P(z) / Q(z), approximating exp(-z).
  double operator()(double z) const { return numerator(z) / denominator(z); }
};

PadeCoefficients pade_coefficients(int l, int m);

// ---------------------------------------------------------------------------
// Steppers

enum class SchemeKind { theta_standard, theta_fmes, pade_fmes, pade_modal };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& name);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::theta_standard;
  double sigma = 1.0;  // theta kinds
  int l = 0;           // pade kinds
  int m = 1;
  double tau = 0.01;
  std::size_t n_steps = 10;
  double lambda1 = 0.0;  // FMES kinds

  bool is_fmes() const { return kind != SchemeKind::theta_standard; }
  /// "1", "0.5" for theta kinds; "l0m2" for Pade kinds.
  std::string parameter_label() const;
  void validate() const;
};

struct StepperOptions {
  double outer_tolerance = 1e-10;
  double inner_tolerance = 1e-12;
  std::size_t max_iterations = 20000;
};

/// Advances one time level at a time. Holds the level operators so repeated
/// steps reuse them; `sys` (and `basis`, for the modal kind) must outlive it.
class Stepper {
 public:
  Stepper(const SchemeSpec& spec, const FemSystem& sys, const StepperOptions& options = {},
          const ModalBasis* basis = nullptr);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  Vector step(std::span<const double> y) const;
  const SchemeSpec& spec() const { return spec_; }

 private:
  struct Impl;
  SchemeSpec spec_;
  std::unique_ptr<Impl> impl_;
};

/// (M + sigma tau K) y^{n+1} = (M - (1 - sigma) tau K) y^n
Vector theta_step_standard(const FemSystem& sys, double sigma, double tau, std::span<const double> y_n,
                           const StepperOptions& options = {});

/// exp(lambda1 tau)(M + sigma tau K~) y^{n+1} = (M - (1 - sigma) tau K~) y^n, K~ = K - lambda1 M
Vector theta_step_fmes(const FemSystem& sys, double sigma, double tau, double lambda1, std::span<const double> y_n,
                       const StepperOptions& options = {});

/// y^{n+1} = exp(-lambda1 tau) R_lm(A~ tau) y^n for (l, m) in {(0,1), (1,1), (0,2)}.
Vector pade_step_fmes(const FemSystem& sys, int l, int m, double tau, double lambda1, std::span<const double> y_n,
                      const StepperOptions& options = {});

/// Same transition applied mode by mode in a dense basis; any l + m >= 1.
Vector pade_modal_step(const ModalBasis& basis, int l, int m, double tau, double lambda1,
                       std::span<const double> y_n);

/// Exact per-mode multiplier of a scheme for a mode with eigenvalue lambda_k.
double mode_multiplier(const SchemeSpec& spec, double lambda_k);

// ---------------------------------------------------------------------------
// Trajectories

struct LevelRecord {
  std::size_t level = 0;
  double t = 0.0;
  double norm_m = 0.0;
  double amplitude = 0.0;  // (y^n, phi1)_M, when phi1 is supplied
};

struct Trajectory {
  std::vector<LevelRecord> records;
  std::map<std::size_t, Vector> states;  // level -> solution at sampled levels
};

struct RunOptions {
  StepperOptions stepper;
  /// Store full vectors at levels divisible by this stride (0: only first and last).
  std::size_t sample_stride = 1;
  const Vector* phi1 = nullptr;
  const ModalBasis* basis = nullptr;
  std::function<void(std::size_t, std::span<const double>)> observer;
};

/// Thrown when a step fails; carries the level being computed.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, std::size_t level) : std::runtime_error(what), level_(level) {}
  std::size_t level() const { return level_; }

 private:
  std::size_t level_;
};

Trajectory run_scheme(const SchemeSpec& spec, const FemSystem& sys, std::span<const double> w0,
                      const RunOptions& options = {});

}  // namespace fmes
