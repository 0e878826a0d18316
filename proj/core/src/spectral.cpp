#include "zkdamp/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace zkdamp {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grids do not match");
}

}  // namespace

struct FourierEngine::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

FourierEngine::FourierEngine(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  grid_.validate();
  std::array<int, 3> n{grid_.points[0], grid_.points[1], grid_.points[2]};
  const int rank = grid_.dim;
  std::lock_guard lock(planner_mutex());
  double* real = fftw_alloc_real(grid_.size());
  fftw_complex* cplx = fftw_alloc_complex(grid_.spectral_size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->r2c = fftw_plan_dft_r2c(rank, n.data(), real, cplx, flags);
  plans_->c2r = fftw_plan_dft_c2r(rank, n.data(), cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FourierEngine: FFTW planning failed");
}

FourierEngine::~FourierEngine() {
  std::lock_guard lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

std::shared_ptr<const FourierEngine> FourierEngine::for_grid(const GridSpec& grid) {
  using Key = std::tuple<int, std::array<int, 3>, std::array<double, 3>>;
  static std::mutex cache_mutex;
  static std::map<Key, std::shared_ptr<const FourierEngine>> cache;
  const Key key{grid.dim, grid.points, grid.half_length};
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto engine = std::make_shared<const FourierEngine>(grid);
  cache.emplace(key, engine);
  return engine;
}

void FourierEngine::forward(const RealField& in, SpectralField& out) const {
  auto src = in.values();
  auto dst = out.coeffs();
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(src.data()),
                       reinterpret_cast<fftw_complex*>(dst.data()));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& c : dst) c *= scale;
}

void FourierEngine::backward(const SpectralField& in, RealField& out, SpectralField& scratch) const {
  auto src = in.coeffs();
  auto tmp = scratch.coeffs();
  std::copy(src.begin(), src.end(), tmp.begin());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(tmp.data()), out.values().data());
}

SpectralField transform(const RealField& f) {
  std::size_t bad = 0;
  if (!f.all_finite(&bad)) {
    const auto x = f.position(bad);
    std::ostringstream os;
    os << "transform: non-finite value " << f[bad] << " at sample " << bad << " (x = " << x[0] << ", "
       << x[1] << ", " << x[2] << ")";
    throw std::domain_error(os.str());
  }
  SpectralField out(f.grid());
  FourierEngine::for_grid(f.grid())->forward(f, out);
  return out;
}

RealField inverse_transform(const SpectralField& F) {
  RealField out(F.grid());
  SpectralField scratch(F.grid());
  FourierEngine::for_grid(F.grid())->backward(F, out, scratch);
  return out;
}

SpectralField derivative(const SpectralField& F, int axis, int order) {
  const GridSpec& g = F.grid();
  if (axis < 0 || axis >= g.dim) {
    throw std::invalid_argument("derivative: axis " + std::to_string(axis) + " outside [0, " +
                                std::to_string(g.dim - 1) + "]");
  }
  if (order != 1 && order != 2) {
    throw std::invalid_argument("derivative: order must be 1 or 2, got " + std::to_string(order));
  }
  const int nyquist = g.points[axis] / 2;
  SpectralField out(g);
  for (std::size_t i = 0; i < F.size(); ++i) {
    const int k = F.wavevector(i)[axis];
    const double xi = g.frequency(axis, k);
    if (order == 1) {
      out[i] = (std::abs(k) == nyquist) ? SpectralField::Complex{} : SpectralField::Complex{0.0, xi} * F[i];
    } else {
      out[i] = -xi * xi * F[i];
    }
  }
  return out;
}

bool dealias_keeps(const GridSpec& grid, const std::array<int, 3>& k) {
  for (int a = 0; a < grid.dim; ++a) {
    if (3 * std::abs(k[a]) > grid.points[a]) return false;
  }
  return true;
}

void dealias_in_place(SpectralField& F) {
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (!dealias_keeps(F.grid(), F.wavevector(i))) F[i] = {};
  }
}

SpectralField dealias(const SpectralField& F) {
  SpectralField out = F;
  dealias_in_place(out);
  return out;
}

double quadrature(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

double quadrature_weighted(const RealField& f, const RealField& w) {
  require_same_grid(f.grid(), w.grid(), "quadrature_weighted");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * w[i];
  return s * f.grid().cell_volume();
}

std::vector<RealField> gradient(const SpectralField& F) {
  std::vector<RealField> out;
  out.reserve(F.grid().dim);
  for (int a = 0; a < F.grid().dim; ++a) out.push_back(inverse_transform(derivative(F, a, 1)));
  return out;
}

RealField dealiased_product(const RealField& f, const RealField& g) {
  return inverse_transform(dealias(transform(f * g)));
}

}  // namespace zkdamp
