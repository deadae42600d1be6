#include "fmes/schemes.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fmes {

double amplification_factor(double sigma, double eta) {
  const double denom = 1.0 + sigma * eta;
  if (denom == 0.0) throw std::invalid_argument("amplification_factor: pole at 1 + sigma*eta = 0");
  return (1.0 - (1.0 - sigma) * eta) / denom;
}

double fmes_weight(double eta) {
  if (eta == 0.0) throw std::invalid_argument("fmes_weight: eta must be nonzero (limit value is 1/2)");
  if (std::abs(eta) < 1e-2) {
    const double e2 = eta * eta;
    return 0.5 + eta / 12.0 * (1.0 - e2 / 60.0 * (1.0 - e2 / 42.0));
  }
  return 1.0 / (-std::expm1(-eta)) - 1.0 / eta;
}

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

double horner(const std::vector<double>& c, double z) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
  return s;
}

}  // namespace

double PadeCoefficients::numerator(double z) const { return horner(p, z); }
double PadeCoefficients::denominator(double z) const { return horner(q, z); }

PadeCoefficients pade_coefficients(int l, int m) {
  if (l < 0 || m < 0) throw std::invalid_argument("pade_coefficients: indices must be non-negative");
  if (l + m < 1) throw std::invalid_argument("pade_coefficients: l + m must be at least 1");
  PadeCoefficients c;
  const double lm = factorial(l + m);
  for (int k = 0; k <= l; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c.p.push_back(sign * factorial(l) / lm * factorial(l + m - k) / (factorial(k) * factorial(l - k)));
  }
  for (int k = 0; k <= m; ++k) {
    c.q.push_back(factorial(m) / lm * factorial(l + m - k) / (factorial(k) * factorial(m - k)));
  }
  return c;
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::theta_standard: return "theta_standard";
    case SchemeKind::theta_fmes: return "theta_fmes";
    case SchemeKind::pade_fmes: return "pade_fmes";
    case SchemeKind::pade_modal: return "pade_modal";
  }
  return "unknown";
}

SchemeKind scheme_kind_from_string(const std::string& name) {
  for (auto kind : {SchemeKind::theta_standard, SchemeKind::theta_fmes, SchemeKind::pade_fmes, SchemeKind::pade_modal}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown scheme kind '" + name + "'");
}

std::string SchemeSpec::parameter_label() const {
  char buf[64];
  if (kind == SchemeKind::theta_standard || kind == SchemeKind::theta_fmes) {
    std::snprintf(buf, sizeof buf, "%g", sigma);
  } else {
    std::snprintf(buf, sizeof buf, "l%dm%d", l, m);
  }
  return buf;
}

void SchemeSpec::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("scheme: tau must be positive");
  if (n_steps < 1) throw std::invalid_argument("scheme: n_steps must be at least 1");
  switch (kind) {
    case SchemeKind::theta_standard:
    case SchemeKind::theta_fmes:
      if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("scheme: sigma must lie in (0, 1]");
      break;
    case SchemeKind::pade_fmes: {
      const bool supported = (l == 0 && m == 1) || (l == 1 && m == 1) || (l == 0 && m == 2);
      if (!supported) {
        throw std::invalid_argument("pade_fmes supports (l, m) in {(0,1), (1,1), (0,2)}; use pade_modal for (" +
                                    std::to_string(l) + "," + std::to_string(m) + ")");
      }
      break;
    }
    case SchemeKind::pade_modal:
      if (l < 0 || m < 0 || l + m < 1) throw std::invalid_argument("scheme: Pade indices need l, m >= 0, l + m >= 1");
      break;
  }
}

double mode_multiplier(const SchemeSpec& spec, double lambda_k) {
  switch (spec.kind) {
    case SchemeKind::theta_standard:
      return amplification_factor(spec.sigma, lambda_k * spec.tau);
    case SchemeKind::theta_fmes:
      return std::exp(-spec.lambda1 * spec.tau) * amplification_factor(spec.sigma, (lambda_k - spec.lambda1) * spec.tau);
    case SchemeKind::pade_fmes:
    case SchemeKind::pade_modal:
      return std::exp(-spec.lambda1 * spec.tau) * pade_coefficients(spec.l, spec.m)((lambda_k - spec.lambda1) * spec.tau);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

struct Stepper::Impl {
  const FemSystem* sys = nullptr;
  const ModalBasis* basis = nullptr;
  StepperOptions options;

  SparseMatrix shifted;   // K~ (FMES kinds)
  SparseMatrix lhs;       // level operator, when it is an explicit matrix
  SparseMatrix rhs;       // explicit right-hand-side operator (theta kinds)
  Vector lhs_inverse_diagonal;

  // Pade sparse path
  PadeCoefficients pade;
  std::unique_ptr<MassSolver> mass_solver;
  LinearOperator composite;
  double decay = 1.0;  // exp(-lambda1 tau)

  Vector solve(std::span<const double> b, std::span<const double> guess) const {
    const CgOptions cg{options.outer_tolerance, options.max_iterations};
    if (mass_solver) return cg_solve(composite, b, cg, lhs_inverse_diagonal, guess).x;
    return cg_solve(LinearOperator::from_matrix(lhs), b, cg, lhs_inverse_diagonal, guess).x;
  }
};

Stepper::Stepper(const SchemeSpec& spec, const FemSystem& sys, const StepperOptions& options, const ModalBasis* basis)
    : spec_(spec), impl_(std::make_unique<Impl>()) {
  spec_.validate();
  Impl& im = *impl_;
  im.sys = &sys;
  im.options = options;
  const double tau = spec_.tau;
  const double sigma = spec_.sigma;
  im.decay = std::exp(-spec_.lambda1 * tau);

  switch (spec_.kind) {
    case SchemeKind::theta_standard:
      im.lhs = linear_combination(1.0, sys.mass, sigma * tau, sys.stiffness);
      im.rhs = linear_combination(1.0, sys.mass, -(1.0 - sigma) * tau, sys.stiffness);
      break;
    case SchemeKind::theta_fmes: {
      im.shifted = compose_shifted(sys.stiffness, sys.mass, spec_.lambda1);
      const double growth = std::exp(spec_.lambda1 * tau);
      im.lhs = linear_combination(growth, sys.mass, growth * sigma * tau, im.shifted);
      im.rhs = linear_combination(1.0, sys.mass, -(1.0 - sigma) * tau, im.shifted);
      break;
    }
    case SchemeKind::pade_fmes: {
      im.shifted = compose_shifted(sys.stiffness, sys.mass, spec_.lambda1);
      im.pade = pade_coefficients(spec_.l, spec_.m);
      const auto& q = im.pade.q;
      im.lhs = linear_combination(q[0], sys.mass, q[1] * tau, im.shifted);
      if (q.size() > 2) {
        // Q(A~ tau) with A~ = M^{-1} K~, multiplied through by M:
        // v -> q0 M v + q1 tau K~ v + q2 tau^2 K~ M^{-1} K~ v
        im.mass_solver = std::make_unique<MassSolver>(sys.mass, CgOptions{options.inner_tolerance, options.max_iterations});
        const double c2 = q[2] * tau * tau;
        const Impl* self = &im;
        im.composite = {sys.dimension(), [self, c2](std::span<const double> in, std::span<double> out) {
                          self->lhs.multiply(in, out);
                          const Vector kv = self->shifted * in;
                          const Vector minv_kv = self->mass_solver->solve(kv);
                          const Vector quad = self->shifted * minv_kv;
                          axpy(c2, quad, out);
                        }};
        Vector diag = im.lhs.diagonal_entries();
        const Vector lumped = sys.mass.row_sums();
        const auto offsets = im.shifted.row_offsets();
        const auto cols = im.shifted.columns();
        const auto vals = im.shifted.values();
        for (std::size_t i = 0; i < sys.dimension(); ++i) {
          double s = 0.0;
          for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) s += vals[k] * vals[k] / lumped[cols[k]];
          diag[i] += c2 * s;
        }
        im.lhs_inverse_diagonal = jacobi_inverse_diagonal(diag);
        return;
      }
      break;
    }
    case SchemeKind::pade_modal:
      if (basis == nullptr) throw std::invalid_argument("pade_modal stepper requires a modal basis");
      if (basis->size() != sys.dimension()) throw std::invalid_argument("modal basis dimension mismatch");
      im.basis = basis;
      im.pade = pade_coefficients(spec_.l, spec_.m);
      return;
  }
  im.lhs_inverse_diagonal = jacobi_inverse_diagonal(im.lhs.diagonal_entries());
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

Vector Stepper::step(std::span<const double> y) const {
  const Impl& im = *impl_;
  if (y.size() != im.sys->dimension()) throw std::invalid_argument("Stepper::step: dimension mismatch");

  switch (spec_.kind) {
    case SchemeKind::theta_standard:
      return im.solve(im.rhs * y, y);
    case SchemeKind::theta_fmes: {
      Vector guess(y.begin(), y.end());
      scale(im.decay, guess);
      return im.solve(im.rhs * y, guess);
    }
    case SchemeKind::pade_fmes: {
      // Q(A~ tau) z = P(A~ tau) y, times M; then y^{n+1} = exp(-lambda1 tau) z.
      Vector b = im.sys->mass * y;
      scale(im.pade.p[0], b);
      if (im.pade.p.size() > 1) axpy(im.pade.p[1] * spec_.tau, im.shifted * y, b);
      Vector z = im.solve(b, y);
      scale(im.decay, z);
      return z;
    }
    case SchemeKind::pade_modal:
      return pade_modal_step(*im.basis, spec_.l, spec_.m, spec_.tau, spec_.lambda1, y);
  }
  return {};
}

// ---------------------------------------------------------------------------

Vector theta_step_standard(const FemSystem& sys, double sigma, double tau, std::span<const double> y_n,
                           const StepperOptions& options) {
  SchemeSpec spec{SchemeKind::theta_standard, sigma, 0, 1, tau, 1, 0.0};
  return Stepper(spec, sys, options).step(y_n);
}

Vector theta_step_fmes(const FemSystem& sys, double sigma, double tau, double lambda1, std::span<const double> y_n,
                       const StepperOptions& options) {
  SchemeSpec spec{SchemeKind::theta_fmes, sigma, 0, 1, tau, 1, lambda1};
  return Stepper(spec, sys, options).step(y_n);
}

Vector pade_step_fmes(const FemSystem& sys, int l, int m, double tau, double lambda1, std::span<const double> y_n,
                      const StepperOptions& options) {
  SchemeSpec spec{SchemeKind::pade_fmes, 1.0, l, m, tau, 1, lambda1};
  return Stepper(spec, sys, options).step(y_n);
}

Vector pade_modal_step(const ModalBasis& basis, int l, int m, double tau, double lambda1,
                       std::span<const double> y_n) {
  const PadeCoefficients pade = pade_coefficients(l, m);
  const double decay = std::exp(-lambda1 * tau);
  Vector a = basis.coefficients(y_n);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= decay * pade((basis.eigenvalues[k] - lambda1) * tau);
  return basis.synthesize(a);
}

Trajectory run_scheme(const SchemeSpec& spec, const FemSystem& sys, std::span<const double> w0,
                      const RunOptions& options) {
  if (w0.size() != sys.dimension()) throw std::invalid_argument("run_scheme: initial vector dimension mismatch");
  Trajectory traj;
  auto record = [&](std::size_t level, const Vector& y) {
    LevelRecord rec;
    rec.level = level;
    rec.t = static_cast<double>(level) * spec.tau;
    rec.norm_m = m_norm(sys, y);
    if (options.phi1 != nullptr) rec.amplitude = m_inner(sys, y, *options.phi1);
    traj.records.push_back(rec);
    const bool sampled = level == 0 || level == spec.n_steps ||
                         (options.sample_stride > 0 && level % options.sample_stride == 0);
    if (sampled) traj.states[level] = y;
    if (options.observer) options.observer(level, y);
  };

  Vector y(w0.begin(), w0.end());
  record(0, y);
  if (spec.n_steps == 0) return traj;

  const Stepper stepper(spec, sys, options.stepper, options.basis);
  traj.records.reserve(spec.n_steps + 1);
  for (std::size_t n = 1; n <= spec.n_steps; ++n) {
    try {
      y = stepper.step(y);
    } catch (const std::exception& e) {
      throw StepError("run_scheme: step to level " + std::to_string(n) + " failed: " + e.what(), n);
    }
    record(n, y);
  }
  return traj;
}

}  // namespace fmes
