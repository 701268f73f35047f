#include "autoten/corcondia.hpp"

#include <cmath>
#include <stdexcept>

#include "autoten/errors.hpp"

namespace autoten {

KruskalModel absorb_weights(const KruskalModel& m) {
  m.validate();
  KruskalModel out = m;
  for (Eigen::Index r = 0; r < m.weights.size(); ++r) {
    const double s = std::cbrt(m.weights(r));
    for (auto& f : out.factors) f.col(r) *= s;
  }
  out.weights.setOnes();
  out.normalized = false;
  out.zero_components.clear();
  return out;
}

CoreTensor fit_core(const DenseTensor3& t, const KruskalModel& m) {
  for (const auto& f : m.factors) {
    if (!f.allFinite()) throw NumericalError("fit_core: factor matrix is not finite", 0);
  }
  if (m.dims() != t.dims()) throw std::invalid_argument("fit_core: model and tensor dims differ");
  const KruskalModel absorbed = absorb_weights(m);
  const auto rank = m.rank();

  // Contract one mode at a time; each step replaces a mode size by R.
  Dims shape = t.dims();
  DenseTensor3 current = t;
  for (int mode = 1; mode <= 3; ++mode) {
    const Matrix projected = pinv(absorbed.factors[mode - 1]) * unfold(current, mode);
    shape[std::size_t(mode - 1)] = rank;
    if (!projected.allFinite()) throw NumericalError("fit_core: core is not finite", 0);
    current = fold(projected, mode, shape);
  }
  return CoreTensor{std::move(current)};
}

double core_consistency(const CoreTensor& g) {
  const std::size_t rank = g.rank();
  double s = 0.0;
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t q = 0; q < rank; ++q)
      for (std::size_t p = 0; p < rank; ++p) {
        const double target = (p == q && q == r) ? 1.0 : 0.0;
        const double d = g(p, q, r) - target;
        s += d * d;
      }
  return 100.0 * (1.0 - s / double(rank));
}

double corcondia(const DenseTensor3& t, const KruskalModel& m) {
  return core_consistency(fit_core(t, m));
}

}  // namespace autoten
