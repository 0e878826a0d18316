#include "zkdamp/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

#include "zkdamp/spectral.hpp"

namespace zkdamp {

namespace {

RealField slab_mask(const GridSpec& grid, double radius) {
  return RealField::sample(grid, [&](const std::array<double, 3>& x) { return std::abs(x[0]) <= radius ? 1.0 : 0.0; });
}

}  // namespace

Recorder::Recorder(const DampingProfile& profile, RecorderOptions options)
    : profile_(profile), options_(std::move(options)) {
  const GridSpec& g = profile_.grid;
  local_radius_ = options_.local_radius >= 0.0 ? options_.local_radius : profile_.R;
  if (options_.rho) {
    if (options_.rho->kind != WeightKind::rho) throw std::invalid_argument("Recorder: weight must be of kind rho");
    rho_ = *options_.rho;
  } else {
    rho_ = make_weight(g, options_.weight_r, WeightKind::rho);
  }
  rho_w_ = rho_.broadcast(g, rho_.w);
  rho_d1_ = rho_.broadcast(g, rho_.d1);
  rho_d3_ = rho_.broadcast(g, rho_.d3);
  local_mask_ = slab_mask(g, local_radius_);
  weight_mask_ = slab_mask(g, rho_.r);

  SpectralField probe(g);
  xi_.assign(static_cast<std::size_t>(g.dim), std::vector<double>(g.spectral_size()));
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const auto k = probe.wavevector(i);
    for (int a = 0; a < g.dim; ++a) {
      xi_[a][i] = 2 * std::abs(k[a]) == g.points[a] ? 0.0 : g.frequency(a, k[a]);
    }
  }
}

EnergyRecord Recorder::operator()(double t, const RealField& u) const { return (*this)(t, transform(u)); }

EnergyRecord Recorder::operator()(double t, const SpectralField& u_hat) const {
  const GridSpec& g = u_hat.grid();
  if (!(g == profile_.grid)) throw std::invalid_argument("Recorder: state grid does not match damping profile");
  const auto engine = FourierEngine::for_grid(g);
  SpectralField scratch(g), work(g);
  RealField u(g);
  engine->backward(u_hat, u, scratch);

  SpectralField deriv(g);
  auto spectral_gradient = [&](const SpectralField& F, std::vector<RealField>& out) {
    out.assign(static_cast<std::size_t>(g.dim), RealField(g));
    for (int a = 0; a < g.dim; ++a) {
      const auto& xi = xi_[a];
      for (std::size_t i = 0; i < F.size(); ++i) deriv[i] = std::complex<double>(0.0, xi[i]) * F[i];
      engine->backward(deriv, out[a], scratch);
    }
  };
  std::vector<RealField> grad;
  spectral_gradient(u_hat, grad);

  RealField sq = u * u;
  engine->forward(sq, work);
  dealias_in_place(work);
  RealField sq_dealiased(g);
  engine->backward(work, sq_dealiased, scratch);

  const RealField& a = profile_.a;
  const std::size_t n = u.size();
  double s_u2 = 0, s_grad = 0, s_cube = 0, s_diss = 0, s_local = 0, s_wgrad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double gs = 0.0;
    for (int k = 0; k < g.dim; ++k) gs += grad[k][i] * grad[k][i];
    const double u2 = u[i] * u[i];
    s_u2 += u2;
    s_grad += gs;
    s_cube += u[i] * sq_dealiased[i];
    s_diss += a[i] * u2;
    s_local += local_mask_[i] * u2;
    s_wgrad += rho_d1_[i] * gs;
  }
  const double dv = g.cell_volume();
  EnergyRecord rec;
  rec.t = t;
  rec.E = 0.5 * s_u2 * dv;
  rec.grad_sq = s_grad * dv;
  rec.H = rec.grad_sq - s_cube * dv / 3.0;
  rec.h1_sq = s_u2 * dv + rec.grad_sq;
  rec.dissipation = s_diss * dv;
  rec.local_E = s_local * dv;
  rec.local_grad_sq_weighted = s_wgrad * dv;

  if (options_.hamiltonian_terms) {
    RealField au = a * u;
    engine->forward(au, work);
    std::vector<RealField> grad_au;
    spectral_gradient(work, grad_au);
    double s_ga = 0, s_agrad = 0, s_acube = 0, s_prod = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double dot_a = 0.0, dot_prod = 0.0, gs = 0.0;
      for (int k = 0; k < g.dim; ++k) {
        dot_a += profile_.grad_a[k][i] * grad[k][i];
        dot_prod += grad[k][i] * grad_au[k][i];
        gs += grad[k][i] * grad[k][i];
      }
      s_ga += 2.0 * u[i] * dot_a;
      s_agrad += a[i] * gs;
      s_acube += a[i] * u[i] * sq_dealiased[i];
      s_prod += 2.0 * dot_prod;
    }
    rec.hamiltonian = HamiltonianTerms{s_ga * dv, s_agrad * dv, s_acube * dv, s_prod * dv};
  }

  if (options_.kato_terms) {
    KatoTerms kt;
    double s_mass = 0, s_flux = 0, s_m3 = 0, s_c1 = 0, s_arho = 0, s_lg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double gs = 0.0;
      for (int k = 0; k < g.dim; ++k) gs += grad[k][i] * grad[k][i];
      const double u2 = u[i] * u[i];
      s_mass += u2 * rho_w_[i];
      s_flux += (2.0 * grad[0][i] * grad[0][i] + gs) * rho_d1_[i];
      s_m3 += u2 * rho_d3_[i];
      s_c1 += u[i] * sq_dealiased[i] * rho_d1_[i];
      s_arho += a[i] * u2 * rho_w_[i];
      s_lg += weight_mask_[i] * gs;
    }
    kt.weighted_mass = s_mass * dv;
    kt.weighted_flux = s_flux * dv;
    kt.mass_rho3 = s_m3 * dv;
    kt.cube_rho1 = s_c1 * dv;
    kt.damping_rho = s_arho * dv;
    kt.local_grad_sq = s_lg * dv;
    rec.kato = kt;
  }
  return rec;
}

double energy(const RealField& u) {
  return 0.5 * quadrature(u * u);
}

double cube_integral(const RealField& u) { return quadrature_weighted(u, dealiased_product(u, u)); }

double hamiltonian(const RealField& u) {
  const auto grad = gradient(transform(u));
  double g2 = 0.0;
  for (const auto& g : grad) g2 += quadrature(g * g);
  return g2 - cube_integral(u) / 3.0;
}

std::vector<double> running_integral(const History& history, double (*value)(const EnergyRecord&)) {
  std::vector<double> out(history.size(), 0.0);
  for (std::size_t i = 1; i < history.size(); ++i) {
    const double dt = history[i].t - history[i - 1].t;
    out[i] = out[i - 1] + 0.5 * dt * (value(history[i]) + value(history[i - 1]));
  }
  return out;
}

double l2_balance_residual(const History& history) {
  if (history.size() < 2) throw std::invalid_argument("l2_balance_residual: history needs at least two records");
  const auto diss = running_integral(history, [](const EnergyRecord& r) { return r.dissipation; });
  const double e0 = history.front().E;
  double worst = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    worst = std::max(worst, std::abs(2.0 * history[i].E + 2.0 * diss[i] - 2.0 * e0));
  }
  return e0 > 0.0 ? worst / (2.0 * e0) : worst;
}

namespace {

void require_hamiltonian_terms(const History& history, const char* who) {
  if (history.size() < 2) throw std::invalid_argument(std::string(who) + ": history needs at least two records");
  for (const auto& r : history) {
    if (!r.hamiltonian) throw std::invalid_argument(std::string(who) + ": records lack Hamiltonian integrands");
  }
}

double h_residual(const History& history, double (*flux)(const EnergyRecord&)) {
  const auto flux_int = running_integral(history, flux);
  const auto source = running_integral(history, [](const EnergyRecord& r) { return r.hamiltonian->a_cube; });
  const double h0 = history.front().H;
  double worst = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    worst = std::max(worst, std::abs(history[i].H + flux_int[i] - h0 - source[i]));
  }
  return worst / (std::abs(h0) + 1.0);
}

}  // namespace

double h_balance_residual(const History& history) {
  require_hamiltonian_terms(history, "h_balance_residual");
  return h_residual(history, [](const EnergyRecord& r) { return r.hamiltonian->product_flux; });
}

double h_balance_residual_analytic(const History& history) {
  require_hamiltonian_terms(history, "h_balance_residual_analytic");
  return h_residual(history, [](const EnergyRecord& r) {
    return r.hamiltonian->grad_a_dot_grad_u2 + 2.0 * r.hamiltonian->a_grad_sq;
  });
}

KatoReport kato_check(const History& history, const WeightFunction& weight) {
  if (weight.kind != WeightKind::rho) throw std::invalid_argument("kato_check: weight must be of kind rho");
  if (history.empty()) throw std::invalid_argument("kato_check: empty history");
  for (const auto& r : history) {
    if (!r.kato) throw std::invalid_argument("kato_check: records lack weighted-identity integrands");
  }
  const auto flux = running_integral(history, [](const EnergyRecord& r) { return r.kato->weighted_flux; });
  const auto m3 = running_integral(history, [](const EnergyRecord& r) { return r.kato->mass_rho3; });
  const auto c1 = running_integral(history, [](const EnergyRecord& r) { return r.kato->cube_rho1; });
  const auto damp = running_integral(history, [](const EnergyRecord& r) { return r.kato->damping_rho; });
  const auto lhs = running_integral(history, [](const EnergyRecord& r) { return r.local_grad_sq_weighted; });
  const auto local = running_integral(history, [](const EnergyRecord& r) { return r.kato->local_grad_sq; });

  const double mass0 = history.front().kato->weighted_mass;
  KatoReport rep;
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double identity = 0.5 * history[i].kato->weighted_mass + 0.5 * flux[i] - 0.5 * m3[i] - c1[i] / 3.0 +
                            damp[i] - 0.5 * mass0;
    worst = std::max(worst, std::abs(identity));
    const double rhs = mass0 + m3[i] + 2.0 / 3.0 * c1[i];
    rep.worst_margin = std::max(rep.worst_margin, lhs[i] - rhs);
  }
  rep.identity_residual = mass0 > 0.0 ? worst / (0.5 * mass0) : worst;
  rep.lhs = lhs.back();
  rep.rhs = mass0 + m3.back() + 2.0 / 3.0 * c1.back();
  rep.local_lhs = local.back();
  rep.bound_holds = rep.worst_margin <= 1e-12 * std::max(1.0, std::abs(rep.rhs));
  return rep;
}

}  // namespace zkdamp
