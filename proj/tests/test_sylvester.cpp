#include <doctest.h>

#include "mostowkit/matcore.hpp"
#include "mostowkit/sylvester.hpp"
#include "mostowkit/validate.hpp"
#include "oracles.hpp"

using namespace mostowkit;
namespace v = mostowkit::validate;

namespace {

Mat right_half_plane(Rng& rng, Eigen::Index n) {
  Mat m = v::random_gaussian(rng, n);
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  double lo = 0.0;
  for (const cplx& l : es.eigenvalues()) lo = std::min(lo, l.real());
  return m + (0.5 - lo) * identity(n);
}

}  // namespace

TEST_CASE("trivial problems") {
  Rng rng(31);
  const Mat r = v::random_gaussian(rng, 3);
  CHECK((sylvester::solve(identity(3), identity(3), r) - r / 2.0).norm() <= 1e-14);
  CHECK((sylvester::integral_solution({identity(3), identity(3), r}) - r / 2.0).norm() <= 1e-9);
  RVec a(3), b(3);
  a << 1, 2, 5;
  b << 0.5, 3, 7;
  const Mat x = sylvester::solve(a.cast<cplx>().asDiagonal().toDenseMatrix(),
                                 b.cast<cplx>().asDiagonal().toDenseMatrix(), r);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(std::abs(x(i, j) - r(i, j) / (a(i) + b(j))) <= 1e-14);
  }
  Mat d13 = Mat::Zero(2, 2);
  d13(0, 0) = 1;
  d13(1, 1) = 3;
  Mat e12 = Mat::Zero(2, 2);
  e12(0, 1) = 1;
  CHECK((sylvester::integral_solution({d13, d13, e12}) - e12 / 4.0).norm() <= 1e-9);
}

TEST_CASE("residual, linearity, Kronecker oracle") {
  Rng rng(32);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 1 + k % 6;
    const Mat a = right_half_plane(rng, n), b = right_half_plane(rng, n);
    const Mat r1 = v::random_gaussian(rng, n), r2 = v::random_gaussian(rng, n);
    const Mat x = sylvester::solve(a, b, r1);
    CHECK((a * x + x * b - r1).norm() <= 1e-9 * (a.norm() + b.norm()) * x.norm());
    CHECK(oracle::rel(x, oracle::sylvester_kron(a, b, r1)) <= 1e-10);
    const cplx alpha(0.7, -1.3);
    const Mat lin = sylvester::solve(a, b, Mat(alpha * r1 + r2));
    CHECK((lin - alpha * x - sylvester::solve(a, b, r2)).norm() <= 1e-10 * lin.norm());
    CHECK(oracle::rel(sylvester::integral_solution({a, b, r1}), x) <= 1e-8);
  }
}

TEST_CASE("Hermitian structure") {
  Rng rng(33);
  for (int k = 0; k < 10; ++k) {
    const Mat a = right_half_plane(rng, 4);
    const Mat r = v::random_hermitian(rng, 4);
    const Mat x = sylvester::solve(Mat(a.adjoint()), a, r);
    CHECK((x - x.adjoint()).norm() <= 1e-10 * x.norm());
  }
}

TEST_CASE("errors") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  try {
    sylvester::solve(a, Mat(-a), identity(2));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpectraOverlap);
  }
  Mat jordan = identity(2);
  jordan(0, 1) = 1.0;
  try {
    sylvester::solve(jordan, identity(2), identity(2));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotDiagonalizable);
  }
  try {
    sylvester::integral_solution({Mat(-a), a, identity(2)});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergentIntegral);
  }
}
