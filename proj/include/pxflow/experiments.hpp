#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pxflow/assembly.hpp"
#include "pxflow/norms.hpp"
#include "pxflow/solver.hpp"

namespace pxf {

/// Parameters of one manufactured-solution configuration on (0,1)^2.
/// The velocity is a rotational field with an x-dependent radial power, the
/// pressure a radial power normalized to zero mean; both powers are tied to
/// the variable exponent so the intended fractional regularity is sharp.
class ManufacturedCase {
 public:
  static ManufacturedCase make(int case_id, double alpha, double beta, double gamma,
                               double p_minus, double delta = 1e-5, double mu0 = 0.5);

  int case_id() const { return case_id_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double delta() const { return delta_; }
  double mu0() const { return mu0_; }
  const ExponentField& exponent() const { return exponent_; }

  double rho_v(Vec2 x) const;
  double rho_q(Vec2 x) const;

  Vec2 velocity(Vec2 x) const;
  Mat2 velocity_gradient(Vec2 x) const;  // throws at x = 0
  double pressure_unshifted(Vec2 x) const;
  double pressure(Vec2 x) const { return pressure_unshifted(x) - mean_shift(); }
  Mat2 stress_exact(Vec2 x) const;  // S with the pointwise exponent at Dv(x)

  /// Integral mean of |x|^{rho_q(x)} over the unit square (level-8 structured
  /// mesh, degree-10 quadrature); computed on first use and cached.
  double mean_shift() const;

  double theory_velocity_rate() const;
  double theory_pressure_rate() const;

 private:
  int case_id_ = 1;
  double alpha_ = 1, beta_ = 1, gamma_ = 1;
  double p_minus_ = 2, p_plus_ = 3;
  double delta_ = 1e-5, mu0_ = 0.5;
  double eps_shift_ = 1e-4;
  ExponentField exponent_;
  mutable std::optional<double> shift_;

  double p_at(Vec2 x) const { return exponent_(x); }
  Vec2 grad_p(Vec2 x) const;
};

/// Weak-form right-hand side making the exact pair a solution of the
/// continuous problem; assembled with degree-10 quadrature.
Eigen::VectorXd consistency_rhs(const ManufacturedCase& mc, const Problem& pb);

struct ErrorRecord {
  int level = 0;
  double h = 1.0;
  double e_v = 0.0;
  double e_q = 0.0;
  std::optional<double> eoc_v;
  std::optional<double> eoc_q;
  double theory_v = 0.0;
  double theory_q = 0.0;
  int newton_iterations = 0;
  bool converged = false;
  double stability = 0.0;  // ||q_h||_{p'_h} + ||Dv_h||_{p_h}, if requested
};

struct StudyResult {
  std::vector<ErrorRecord> records;
  bool aborted = false;
  std::string abort_reason;
};

struct StudyOptions {
  NewtonConfig newton;
  bool compute_stability = false;
  std::ostream* progress = nullptr;
};

/// Runs levels 0..max_level with mesh continuation and records the error
/// quantities, EOCs, and expected rates. Newton failure aborts with partial
/// results flagged.
StudyResult run_convergence_study(const ManufacturedCase& mc, const MixedPair& pair,
                                  int max_level, const StudyOptions& opts = {});

/// Electro-rheological setup: a dipole field between two electrode holes
/// drives the power-law index through the material function p_hat.
struct ERScenario {
  double chi_E = 1.0;
  double delta = 1e-5;
  double mu0 = 0.5;

  static constexpr double hole_radius = 5.0 / 80.0;
  static Vec2 electrode(int sign) { return {sign * 5.0 / 8.0, 0.0}; }

  static Vec2 field_E(Vec2 x);   // throws inside an electrode disc
  static Mat2 grad_E(Vec2 x);
  static double p_hat(double t) { return 2.0 + 2.0 / (1.0 + 10.0 * t); }
  static double exponent(Vec2 x) { return p_hat(field_E(x).norm()); }
  static Vec2 mechanical_force(Vec2 x) { return {x.y, 0.0}; }
  Vec2 force(Vec2 x, bool with_field) const;
};

struct ERRunResult {
  NewtonReport report;
  double max_speed = 0.0;
  double pressure_mean = 0.0;
  std::vector<std::string> files;
};

struct ERDemoResult {
  ERRunResult with_field;
  ERRunResult no_field;
};

/// Solves the scenario on the given mesh (Taylor-Hood, homogeneous Dirichlet)
/// with and without the electric field and writes VTK outputs.
ERDemoResult run_er_demo(const Triangulation& mesh, const std::string& out_dir,
                         bool field_case = true, bool nofield_case = true);

}  // namespace pxf
