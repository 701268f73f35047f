#include <gtest/gtest.h>

#include "autoten/tensor.hpp"
#include "oracles.hpp"

using namespace autoten;
using autoten::testing::max_abs_diff;
using autoten::testing::random_matrix;
using autoten::testing::random_model;
using autoten::testing::random_tensor;
using autoten::testing::triple_loop;

namespace {

DenseTensor3 index_tensor() {
  DenseTensor3 t({2, 2, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) t(i, j, k) = double(4 * i + 2 * j + k);
  return t;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> init) {
  Matrix m(Eigen::Index(init.size()), Eigen::Index(init.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : init) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST(DenseTensor3, LayoutIsFirstModeFastest) {
  DenseTensor3 t({2, 3, 4});
  t(1, 2, 3) = 7.0;
  EXPECT_EQ(t.values()[1 + 2 * 2 + 3 * 6], 7.0);
}

TEST(DenseTensor3, RejectsWrongLengthAndNonFinite) {
  EXPECT_THROW(DenseTensor3({2, 2, 2}, std::vector<double>(7, 0.0)), std::invalid_argument);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(DenseTensor3({2, 2, 2}, v), std::invalid_argument);
  v[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(DenseTensor3({2, 2, 2}, v), std::invalid_argument);
}

TEST(Unfold, Mode1OfIndexTensor) {
  EXPECT_EQ(unfold(index_tensor(), 1), rows({{0, 2, 1, 3}, {4, 6, 5, 7}}));
}

TEST(Unfold, Mode3OfIndexTensor) {
  EXPECT_EQ(unfold(index_tensor(), 3), rows({{0, 4, 2, 6}, {1, 5, 3, 7}}));
}

TEST(Unfold, Mode2ColumnIndexIsIPlusKTimesI) {
  const auto t = random_tensor({3, 4, 5}, 11);
  const Matrix m = unfold(t, 2);
  ASSERT_EQ(m.rows(), 4);
  ASSERT_EQ(m.cols(), 15);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(m(Eigen::Index(j), Eigen::Index(i + k * 3)), t(i, j, k));
}

TEST(Unfold, ScalarTensorAnyMode) {
  const DenseTensor3 t({1, 1, 1}, {5.0});
  for (int mode = 1; mode <= 3; ++mode) EXPECT_EQ(unfold(t, mode), rows({{5}}));
}

TEST(Unfold, InvalidModeThrows) {
  EXPECT_THROW(unfold(index_tensor(), 0), std::invalid_argument);
  EXPECT_THROW(unfold(index_tensor(), 4), std::invalid_argument);
}

TEST(Fold, InvertsMode1Example) {
  EXPECT_EQ(fold(rows({{0, 2, 1, 3}, {4, 6, 5, 7}}), 1, {2, 2, 2}), index_tensor());
}

TEST(Fold, ScalarMode2) {
  EXPECT_EQ(fold(rows({{5}}), 2, {1, 1, 1}), DenseTensor3({1, 1, 1}, {5.0}));
}

TEST(Fold, ShapeMismatchThrows) {
  EXPECT_THROW(fold(Matrix::Zero(2, 3), 1, {2, 2, 2}), std::invalid_argument);
  EXPECT_THROW(fold(Matrix::Zero(2, 4), 2, {3, 2, 2}), std::invalid_argument);
}

TEST(Fold, RoundTripAllModesAndShapes) {
  std::uint64_t seed = 1;
  for (std::size_t I = 1; I <= 5; ++I)
    for (std::size_t J = 1; J <= 6; ++J)
      for (std::size_t K = 1; K <= 7; ++K) {
        const Dims d{I, J, K};
        const auto t = random_tensor(d, seed++);
        for (int mode = 1; mode <= 3; ++mode) ASSERT_EQ(fold(unfold(t, mode), mode, d), t);
      }
}

TEST(KhatriRao, SmallExample) {
  const Matrix kr = khatri_rao(rows({{1, 0}, {0, 1}}), rows({{1, 2}, {3, 4}}));
  Matrix expected(4, 2);
  expected << 1, 0, 3, 0, 0, 2, 0, 4;
  EXPECT_EQ(kr, expected);
}

TEST(KhatriRao, OnesRowIsIdentity) {
  const Matrix b = random_matrix(4, 3, 5);
  EXPECT_EQ(khatri_rao(Matrix::Ones(1, 3), b), b);
}

TEST(KhatriRao, ColumnMismatchThrows) {
  EXPECT_THROW(khatri_rao(Matrix::Ones(2, 2), Matrix::Ones(2, 3)), std::invalid_argument);
}

TEST(KhatriRao, GramIdentity) {
  std::uint64_t seed = 100;
  for (Eigen::Index ra = 1; ra <= 20; ra += 3)
    for (Eigen::Index rb = 1; rb <= 20; rb += 4)
      for (Eigen::Index c = 1; c <= 5; ++c) {
        const Matrix a = random_matrix(ra, c, seed++);
        const Matrix b = random_matrix(rb, c, seed++);
        const Matrix kr = khatri_rao(a, b);
        // Explicit Kronecker columns as the reference.
        for (Eigen::Index r = 0; r < c; ++r)
          for (Eigen::Index i = 0; i < ra; ++i)
            for (Eigen::Index j = 0; j < rb; ++j) ASSERT_EQ(kr(i * rb + j, r), a(i, r) * b(j, r));
        const Matrix lhs = kr.transpose() * kr;
        const Matrix rhs = (a.transpose() * a).cwiseProduct(b.transpose() * b);
        ASSERT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
      }
}

TEST(Reconstruct, RankOneOuterProduct) {
  KruskalModel m;
  m.weights = Vector::Constant(1, 2.0);
  m.factors[0] = rows({{1}, {1}});
  m.factors[1] = rows({{1}, {0}});
  m.factors[2] = rows({{1}, {1}});
  const auto t = reconstruct(m, {2, 2, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(t(i, 0, k), 2.0);
      EXPECT_EQ(t(i, 1, k), 0.0);
    }
}

TEST(Reconstruct, ZeroWeightsGiveZeroTensor) {
  auto m = random_model({3, 4, 2}, 3, 9);
  m.weights.setZero();
  EXPECT_EQ(frobenius_norm(reconstruct(m, {3, 4, 2})), 0.0);
}

TEST(Reconstruct, MatchesTripleLoop) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dims d{1 + seed % 5, 2 + seed % 4, 1 + seed % 6};
    auto m = random_model(d, 1 + seed % 5, seed * 31);
    m.weights = autoten::testing::random_matrix(Eigen::Index(m.rank()), 1, seed + 999).col(0);
    EXPECT_LE(max_abs_diff(reconstruct(m, d), triple_loop(m)), 1e-12);
  }
}

TEST(Reconstruct, DimensionMismatchThrows) {
  const auto m = random_model({3, 3, 3}, 2, 1);
  EXPECT_THROW(reconstruct(m, {3, 3, 4}), std::invalid_argument);
}

TEST(Reconstruct, MatricizedCpIdentity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dims d{2 + seed % 4, 3 + seed % 3, 2 + seed % 5};
    auto m = random_model(d, 1 + seed % 4, seed + 7);
    m.weights = random_matrix(Eigen::Index(m.rank()), 1, seed + 70).col(0);
    const Matrix lhs = unfold(reconstruct(m, d), 1);
    const Matrix rhs = m.factors[0] * m.weights.asDiagonal() *
                       khatri_rao(m.factors[2], m.factors[1]).transpose();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FrobeniusNorm, Examples) {
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseTensor3({2, 2, 2}, std::vector<double>(8, 1.0))), std::sqrt(8.0));
  EXPECT_EQ(frobenius_norm(DenseTensor3({2, 2, 2})), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(index_tensor()), std::sqrt(140.0));
}

TEST(RelativeError, ExactFitIsZero) {
  const auto m = random_model({3, 4, 5}, 2, 3);
  EXPECT_EQ(relative_error(reconstruct(m, {3, 4, 5}), m), 0.0);
}

TEST(RelativeError, ZeroWeightsGiveOne) {
  auto m = random_model({3, 4, 5}, 2, 3);
  m.weights.setZero();
  EXPECT_DOUBLE_EQ(relative_error(random_tensor({3, 4, 5}, 8), m), 1.0);
}

TEST(RelativeError, MatchesExplicitNorms) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dims d{3, 4, 5};
    const auto t = random_tensor(d, seed);
    const auto m = random_model(d, 3, seed + 50);
    const auto approx = triple_loop(m);
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < t.size(); ++n) {
      num += (t.values()[n] - approx.values()[n]) * (t.values()[n] - approx.values()[n]);
      den += t.values()[n] * t.values()[n];
    }
    EXPECT_NEAR(relative_error(t, m), std::sqrt(num / den), 1e-12);
  }
}

TEST(RelativeError, ZeroTensorIsDomainError) {
  EXPECT_THROW(relative_error(DenseTensor3({2, 2, 2}), random_model({2, 2, 2}, 1, 0)),
               std::domain_error);
}

TEST(Pinv, MoorePenroseConditionsOnRankDeficientMatrix) {
  const Matrix a = random_matrix(6, 2, 1) * random_matrix(2, 4, 2);  // rank 2
  const Matrix p = pinv(a);
  EXPECT_LE((a * p * a - a).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((p * a * p - p).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(((a * p).transpose() - a * p).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(((p * a).transpose() - p * a).cwiseAbs().maxCoeff(), 1e-10);
}
