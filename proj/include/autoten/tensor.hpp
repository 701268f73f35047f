#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace autoten {

/// Column-major dense matrix; element (r, c) lives at r + c * rows.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Mode sizes (I, J, K).
using Dims = std::array<std::size_t, 3>;

inline std::size_t numel(const Dims& d) noexcept { return d[0] * d[1] * d[2]; }

/**
 * Dense third-order tensor.
 *
 * Entry (i, j, k) is stored at i + j * I + k * I * J, so the first mode varies
 * fastest. With this layout the mode-1 unfolding is the raw buffer viewed as
 * an I x (J * K) column-major matrix.
 */
class DenseTensor3 {
public:
  /// Zero tensor.
  explicit DenseTensor3(const Dims& dims);
  /// Takes ownership of `values`; throws if the length is wrong or any value is not finite.
  DenseTensor3(const Dims& dims, std::vector<double> values);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + dims_[0] * (j + dims_[1] * k);
  }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return values_[index(i, j, k)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return values_[index(i, j, k)];
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool operator==(const DenseTensor3&) const = default;

private:
  Dims dims_;
  std::vector<double> values_;
};

/**
 * CP model: x(i,j,k) = sum_r weights[r] * A(i,r) * B(j,r) * C(k,r).
 *
 * `normalized` is set by normalize_model(); in that state every factor column
 * has unit norm and weights are non-negative. `zero_components` lists the
 * components whose column collapsed to zero during normalization.
 */
struct KruskalModel {
  Vector weights;
  std::array<Matrix, 3> factors;
  bool normalized = false;
  std::vector<std::size_t> zero_components;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(weights.size()); }
  Dims dims() const noexcept {
    return {static_cast<std::size_t>(factors[0].rows()), static_cast<std::size_t>(factors[1].rows()),
            static_cast<std::size_t>(factors[2].rows())};
  }
  /// Throws if column counts disagree with the rank or weights are not finite.
  void validate() const;
};

/// Kolda-Bader matricization. `mode` is 1, 2 or 3.
Matrix unfold(const DenseTensor3& t, int mode);

/// Inverse of unfold() for the given mode and tensor shape.
DenseTensor3 fold(const Matrix& m, int mode, const Dims& dims);

/// Column-wise Kronecker product; column r is kron(a[:, r], b[:, r]).
Matrix khatri_rao(const Matrix& a, const Matrix& b);

DenseTensor3 reconstruct(const KruskalModel& m, const Dims& dims);

double frobenius_norm(const DenseTensor3& t);

/// ||t - reconstruct(m)||_F / ||t||_F.
double relative_error(const DenseTensor3& t, const KruskalModel& m);

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are dropped.
Matrix pinv(const Matrix& m, double rel_tol = 1e-12);

}  // namespace autoten
