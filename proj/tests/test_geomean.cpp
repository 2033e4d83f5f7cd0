#include <doctest.h>

#include "mostowkit/geomean.hpp"
#include "mostowkit/matcore.hpp"
#include "mostowkit/validate.hpp"
#include "oracles.hpp"

using namespace mostowkit;
namespace v = mostowkit::validate;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("gm examples and identities") {
  Rng rng(41);
  const Mat a = v::random_pd(rng, 3, 10);
  CHECK(oracle::rel(geomean::gm(a, a), a) <= 1e-12);
  CHECK((geomean::gm(diag2(1, 4), diag2(4, 1)) - diag2(2, 2)).norm() <= 1e-14);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index n = 1 + k % 4;
    const Mat p = v::random_pd(rng, n, 20), q = v::random_pd(rng, n, 20);
    const Mat g = geomean::gm(p, q);
    CHECK((g * p.inverse() * g - q).norm() <= 1e-10 * q.norm());
    CHECK(oracle::rel(geomean::gm(q, p), g) <= 1e-10);
    CHECK(oracle::rel(Mat(g.inverse()), geomean::gm(Mat(p.inverse()), Mat(q.inverse()))) <= 1e-9);
    CHECK(norm2(g) <= std::sqrt(norm2(p) * norm2(q)) + 1e-10);
    CHECK(oracle::rel(g, Mat(p * geomean::positive_root(p, q))) <= 1e-12);
    CHECK(classify(g).is_positive_definite);
  }
  CHECK_THROWS_AS(geomean::gm(diag2(1, -1), identity(2)), Error);
}

TEST_CASE("dgm examples") {
  Rng rng(42);
  const Mat x = v::random_hermitian(rng, 2), y = v::random_hermitian(rng, 2);
  CHECK((geomean::dgm(identity(2), identity(2), x, y).D - (x + y) / 2.0).norm() <= 1e-14);
  const double a[2] = {1.5, 0.4}, b[2] = {0.3, 2.0};
  const Mat d = geomean::dgm(diag2(a[0], a[1]), diag2(b[0], b[1]), x, y).D;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double ci = std::sqrt(b[i] / a[i]), cj = std::sqrt(b[j] / a[j]);
      CHECK(std::abs(d(i, j) - (y(i, j) + ci * cj * x(i, j)) / (ci + cj)) <= 1e-13);
    }
  }
}

TEST_CASE("dgm against finite differences, invariants") {
  Rng rng(43);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Mat a = v::random_pd(rng, n, 10), b = v::random_pd(rng, n, 10);
    const Mat x = v::random_hermitian(rng, n), y = v::random_hermitian(rng, n);
    const auto r = geomean::dgm(a, b, x, y);
    const double h = 1e-5;
    const Mat fd = (geomean::gm(a + h * x, b + h * y) - geomean::gm(a - h * x, b - h * y)) / (2 * h);
    CHECK(oracle::rel(fd, r.D) <= 1e-6);
    CHECK((r.C.adjoint() * r.D + r.D * r.C - y - r.C.adjoint() * x * r.C).norm() <=
          1e-9 * (r.D.norm() + y.norm() + x.norm()));
    CHECK((r.D - r.D.adjoint()).norm() <= 1e-10 * r.D.norm());
    // Positivity of the derivative map.
    const Mat px = x * x.adjoint(), py = y * y.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(geomean::dgm(a, b, px, py).D));
    CHECK(es.eigenvalues()(0) >= -1e-10);
  }
}

TEST_CASE("dgm_bound") {
  CHECK(geomean::dgm_bound(identity(2), identity(2), geomean::BoundVariant::commuting_half) ==
        doctest::Approx(1.0));
  CHECK(geomean::dgm_bound(identity(2), identity(2), geomean::BoundVariant::commuting_pi4) ==
        doctest::Approx(kPi / 2));
  try {
    Rng rng(44);
    geomean::dgm_bound(v::random_pd(rng, 3, 5), v::random_pd(rng, 3, 5),
                       geomean::BoundVariant::commuting_half);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotCommuting);
  }
  Rng rng(45);
  // Commuting pair: shared eigenvectors.
  const Mat u = v::random_unitary(rng, 3);
  RVec da(3), db(3);
  da << 1, 2, 5;
  db << 3, 0.5, 2;
  const Mat a = hermitian_part(u * da.cast<cplx>().asDiagonal() * u.adjoint());
  const Mat b = hermitian_part(u * db.cast<cplx>().asDiagonal() * u.adjoint());
  const double half = geomean::dgm_bound(a, b, geomean::BoundVariant::commuting_half);
  CHECK(half <= geomean::dgm_bound(a, b, geomean::BoundVariant::commuting_pi4));
  double sup = 0.0;
  for (int k = 0; k < 200; ++k) {
    Mat x = v::random_hermitian(rng, 3), y = v::random_hermitian(rng, 3);
    x /= norm2(x);
    y /= norm2(y);
    sup = std::max(sup, norm2(geomean::dgm(a, b, x, y).D));
  }
  CHECK(sup <= half + 1e-8);
}

TEST_CASE("bound domination on random pairs") {
  Rng rng(46);
  for (int k = 0; k < 5; ++k) {
    const Mat a = v::random_pd(rng, 3, 8), b = v::random_pd(rng, 3, 8);
    const double bound = geomean::dgm_bound(a, b, geomean::BoundVariant::general);
    for (NormKind nk : {NormKind::spectral, NormKind::frobenius}) {
      for (int d = 0; d < 200; ++d) {
        Mat x = v::random_hermitian(rng, 3), y = v::random_hermitian(rng, 3);
        x /= norm(x, nk);
        y /= norm(y, nk);
        CHECK(norm(geomean::dgm(a, b, x, y).D, nk) <= bound + 1e-8);
      }
    }
    const auto est = v::estimate_opnorm_pair(
        [&](const Mat& x, const Mat& y) { return geomean::dgm(a, b, x, y).D; }, 3,
        v::Domain::hermitian, NormKind::frobenius, 16, 7);
    CHECK(est.value <= bound + 1e-6);
  }
}

TEST_CASE("opnorm at the identity direction") {
  CHECK(geomean::dgm_opnorm_identity_value(identity(3), identity(3)) == doctest::Approx(1.0));
  Rng rng(47);
  const Mat p = v::random_pd(rng, 3, 10);
  CHECK(geomean::dgm_opnorm_identity_value(p, p) == doctest::Approx(1.0).epsilon(1e-10));
  const Mat a = diag2(1, 4), b = diag2(4, 1);
  const double val = geomean::dgm_opnorm_identity_value(a, b);
  double sup = 0.0;
  for (int k = 0; k < 500; ++k) {
    Mat x = v::random_hermitian(rng, 2), y = v::random_hermitian(rng, 2);
    x /= norm2(x);
    y /= norm2(y);
    sup = std::max(sup, norm2(geomean::dgm(a, b, x, y).D));
  }
  CHECK(sup <= val + 1e-8);
}
