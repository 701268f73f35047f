#include "autoten/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace autoten {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

Dims unfold_shape(int mode, const Dims& d) {
  switch (mode) {
    case 1: return {d[0], d[1] * d[2], 0};
    case 2: return {d[1], d[0] * d[2], 0};
    default: return {d[2], d[0] * d[1], 0};
  }
}

}  // namespace

DenseTensor3::DenseTensor3(const Dims& dims) : dims_(dims), values_(numel(dims), 0.0) {}

DenseTensor3::DenseTensor3(const Dims& dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (values_.size() != numel(dims_)) {
    throw std::invalid_argument("tensor value count " + std::to_string(values_.size()) +
                                " does not match dims product " + std::to_string(numel(dims_)));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("tensor values must be finite");
  }
}

void KruskalModel::validate() const {
  const auto r = weights.size();
  for (const auto& f : factors) {
    if (f.cols() != r) {
      throw std::invalid_argument("factor has " + std::to_string(f.cols()) + " columns, rank is " +
                                  std::to_string(r));
    }
  }
  if (!weights.allFinite()) throw std::invalid_argument("model weights must be finite");
}

Matrix unfold(const DenseTensor3& t, int mode) {
  check_mode(mode);
  const auto [I, J, K] = t.dims();
  const auto v = t.values();
  switch (mode) {
    case 1:
      return Eigen::Map<const Matrix>(v.data(), Eigen::Index(I), Eigen::Index(J * K));
    case 2: {
      Matrix m(J, I * K);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < I; ++i) m(j, i + k * I) = t(i, j, k);
      return m;
    }
    default:
      // K x (I*J) with column i + j*I is the transpose of the (I*J) x K view.
      return Eigen::Map<const Matrix>(v.data(), Eigen::Index(I * J), Eigen::Index(K)).transpose();
  }
}

DenseTensor3 fold(const Matrix& m, int mode, const Dims& dims) {
  check_mode(mode);
  const auto shape = unfold_shape(mode, dims);
  if (std::size_t(m.rows()) != shape[0] || std::size_t(m.cols()) != shape[1]) {
    throw std::invalid_argument("matrix shape " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " cannot fold into mode " +
                                std::to_string(mode) + " of the requested dims");
  }
  const auto [I, J, K] = dims;
  std::vector<double> values(numel(dims));
  switch (mode) {
    case 1:
      Eigen::Map<Matrix>(values.data(), m.rows(), m.cols()) = m;
      break;
    case 2:
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < I; ++i) values[i + I * (j + J * k)] = m(j, i + k * I);
      break;
    default:
      Eigen::Map<Matrix>(values.data(), Eigen::Index(I * J), Eigen::Index(K)) = m.transpose();
      break;
  }
  return DenseTensor3(dims, std::move(values));
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("khatri_rao: column counts differ (" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.cols()) + ")");
  }
  Matrix out(a.rows() * b.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.cols(); ++r) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.col(r).segment(i * b.rows(), b.rows()) = a(i, r) * b.col(r);
    }
  }
  return out;
}

DenseTensor3 reconstruct(const KruskalModel& m, const Dims& dims) {
  m.validate();
  for (int n = 0; n < 3; ++n) {
    if (std::size_t(m.factors[n].rows()) != dims[n]) {
      throw std::invalid_argument("factor " + std::to_string(n + 1) + " has " +
                                  std::to_string(m.factors[n].rows()) + " rows, expected " +
                                  std::to_string(dims[n]));
    }
  }
  const Matrix unfolded =
      m.factors[0] * m.weights.asDiagonal() * khatri_rao(m.factors[2], m.factors[1]).transpose();
  std::vector<double> values(unfolded.data(), unfolded.data() + unfolded.size());
  return DenseTensor3(dims, std::move(values));
}

double frobenius_norm(const DenseTensor3& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return std::sqrt(s);
}

double relative_error(const DenseTensor3& t, const KruskalModel& m) {
  const double norm = frobenius_norm(t);
  if (norm == 0.0) throw std::domain_error("relative_error: tensor has zero norm");
  const DenseTensor3 approx = reconstruct(m, t.dims());
  double s = 0.0;
  const auto x = t.values();
  const auto y = approx.values();
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double d = x[n] - y[n];
    s += d * d;
  }
  return std::sqrt(s) / norm;
}

Matrix pinv(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace autoten
