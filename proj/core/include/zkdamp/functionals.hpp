#pragma once

#include <optional>
#include <span>
#include <vector>

#include "zkdamp/damping.hpp"
#include "zkdamp/grid.hpp"

namespace zkdamp {

/// Integrands of the Hamiltonian balance law, sampled at one instant.
struct HamiltonianTerms {
  /// int grad(a).grad(u^2) with the analytic gradient of a.
  double grad_a_dot_grad_u2 = 0.0;
  /// int a |grad u|^2.
  double a_grad_sq = 0.0;
  /// int a u^3 (alias-free cube).
  double a_cube = 0.0;
  /// 2 int grad(u).grad(a u) with a u differentiated spectrally. Equal to
  /// grad_a_dot_grad_u2 + 2 a_grad_sq for a resolved profile; this form is
  /// the one the discrete flow balances exactly.
  double product_flux = 0.0;
};

/// Integrands of the weighted (Kato) identity for a rho weight.
struct KatoTerms {
  double weighted_mass = 0.0;   // int u^2 rho
  double weighted_flux = 0.0;   // int (2 u_x1^2 + |grad u|^2) rho'
  double mass_rho3 = 0.0;       // int u^2 rho'''
  double cube_rho1 = 0.0;       // int u^3 rho'
  double damping_rho = 0.0;     // int a u^2 rho
  double local_grad_sq = 0.0;   // int_{|x1| <= r} |grad u|^2
};

/// One time sample of the monitored functionals.
struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;
  double H = 0.0;
  double grad_sq = 0.0;
  double h1_sq = 0.0;
  double dissipation = 0.0;
  double local_E = 0.0;
  double local_grad_sq_weighted = 0.0;
  std::optional<HamiltonianTerms> hamiltonian;
  std::optional<KatoTerms> kato;
};

using History = std::vector<EnergyRecord>;

struct RecorderOptions {
  /// Radius of the slab Q_R used for local_E; negative selects the profile's R.
  double local_radius = -1.0;
  /// Rho weight for the weighted quantities; built from weight_r when absent.
  std::optional<WeightFunction> rho;
  double weight_r = 2.0;
  bool hamiltonian_terms = true;
  bool kato_terms = true;
};

/// Evaluates EnergyRecords from spectral states. Immutable after
/// construction; safe to share across threads.
class Recorder {
 public:
  Recorder(const DampingProfile& profile, RecorderOptions options = {});

  [[nodiscard]] EnergyRecord operator()(double t, const SpectralField& u_hat) const;
  [[nodiscard]] EnergyRecord operator()(double t, const RealField& u) const;

  [[nodiscard]] double local_radius() const { return local_radius_; }
  [[nodiscard]] const WeightFunction& rho() const { return rho_; }
  [[nodiscard]] const DampingProfile& profile() const { return profile_; }

 private:
  DampingProfile profile_;
  RecorderOptions options_;
  double local_radius_;
  WeightFunction rho_;
  RealField rho_w_, rho_d1_, rho_d3_;
  RealField local_mask_, weight_mask_;
  // Per-axis i*xi multipliers in half-spectrum order, Nyquist zeroed.
  std::vector<std::vector<double>> xi_;
};

double energy(const RealField& u);
/// int |grad u|^2 - (1/3) int u^3 with a spectral gradient and alias-free cube.
double hamiltonian(const RealField& u);
/// Alias-free int u^3 computed as int u * dealias(u^2).
double cube_integral(const RealField& u);

/// Trapezoidal running integral of `value` over the record times.
std::vector<double> running_integral(const History& history, double (*value)(const EnergyRecord&));

/// max_t |2E(t) + 2 int_0^t dissipation - 2E(0)| / (2E(0)).
double l2_balance_residual(const History& history);

/// max_t |H(t) + int_0^t flux - H(0) - int_0^t a u^3| / (|H(0)| + 1), where
/// flux is the exactly-balanced grid form (product_flux).
double h_balance_residual(const History& history);
/// Same identity with the analytic grad(a) terms int grad(a).grad(u^2) + 2 int a|grad u|^2.
double h_balance_residual_analytic(const History& history);

struct KatoReport {
  double lhs = 0.0;       // int_0^T int |grad u|^2 rho'
  double rhs = 0.0;       // int u0^2 rho + int_0^T int u^2 rho''' + 2/3 int_0^T int u^3 rho'
  double local_lhs = 0.0; // int_0^T int_{Q_r} |grad u|^2
  double identity_residual = 0.0;
  /// max_t (lhs(t) - rhs(t)); nonpositive when the bound holds at every sample.
  double worst_margin = 0.0;
  bool bound_holds = false;
};

KatoReport kato_check(const History& history, const WeightFunction& weight);

struct InequalityReport {
  double lhs = 0.0;
  double gradient_term = 0.0;
  double l2_terms = 0.0;
  double epsilon = 0.0;
  double min_constant = 0.0;
  /// Largest min_constant over the rescalings s f (s > 0) and the x1 shifts
  /// of f by whole grid cells: the smallest c covering that whole family.
  double orbit_sup_constant = 0.0;

  /// lhs <= epsilon * gradient_term + c * l2_terms, with relative slack 1e-12.
  [[nodiscard]] bool holds_with(double c) const;
};

/// Exponent 2(6-n)/(4-n) on the L2 norm in the weighted cubic estimate.
double lemma23_exponent(int dim);

InequalityReport lemma23_report(const RealField& f, const WeightFunction& psi, double epsilon);

/// Exponents of a Gagliardo-Nirenberg inequality
///   ||D^j f||_p <= c sum_{|beta|=m} ||D^beta f||_q^theta ||f||_r^(1-theta).
struct GnExponents {
  int j = 0;
  int m = 1;
  double p = 3.0;
  double q = 2.0;
  double r = 2.0;
  double theta = -1.0;  // negative: solve from the scaling relation
  int derivative_axis = 0;
};

struct GnReport {
  double theta = 0.0;
  double lhs = 0.0;
  double rhs_factor = 0.0;
  double min_constant = 0.0;
  /// The cubic instance ||u||_3^3 <= c ||grad u||_2^(n/2) ||u||_2^((6-n)/2).
  double cube_lhs = 0.0;
  double cube_rhs_factor = 0.0;
  double cube_constant = 0.0;
};

/// Solves the scaling relation for theta; throws when theta lies outside
/// [j/m, 1] or a supplied theta does not satisfy it.
double gn_theta(const GnExponents& e, int dim);
GnReport gn_report(const RealField& f, const GnExponents& exponents = {});

struct ObservabilityReport {
  double R = 0.0;
  double T = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

/// Trapezoidal integrals over [0, T] of local_E (recorded on Q_R) and of the
/// dissipation. T < 0 selects the final record time.
ObservabilityReport observability_ratio(const History& history, double R, double T = -1.0);

struct DecayConstant {
  double b = 0.0;
  /// (2 alpha0 - epsilon) b, the exponential rate of the Hamiltonian bound.
  double rate = 0.0;
};

DecayConstant compute_b(double alpha0, double epsilon, double a_inf);

/// (1/(2 alpha0) + c/2) / (T + 1/(2 alpha0) + c/2).
double contraction_constant(double alpha0, double observability_constant, double T);

}  // namespace zkdamp
