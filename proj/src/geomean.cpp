#include "mostowkit/geomean.hpp"

#include <cmath>

#include "mostowkit/matcore.hpp"
#include "mostowkit/sylvester.hpp"

namespace mostowkit::geomean {

namespace {

void require_pd_pair(const Mat& a, const Mat& b) {
  require_square(a, "geomean A");
  require_square(b, "geomean B");
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::NotSquare, "geomean: size mismatch");
  }
  for (const Mat* m : {&a, &b}) {
    const MatrixClassReport r = classify(*m);
    if (!r.is_positive_definite) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "geomean: argument is not Hermitian positive definite");
    }
  }
}

double min_real_eigenvalue(const Mat& c) {
  Eigen::ComplexEigenSolver<Mat> es(c, false);
  double m = es.eigenvalues()(0).real();
  for (const cplx& l : es.eigenvalues()) m = std::min(m, l.real());
  return m;
}

}  // namespace

Mat gm(const Mat& a, const Mat& b) {
  require_pd_pair(a, b);
  if (a.size() == 0) return a;
  const Mat ah = sqrt_pd(a);
  const Mat aih = inv_sqrt_pd(a);
  const Mat inner = hermitian_part(aih * b * aih);
  return hermitian_part(ah * sqrt_pd(inner) * ah);
}

Mat positive_root(const Mat& a, const Mat& b) {
  require_pd_pair(a, b);
  if (a.size() == 0) return a;
  const Mat ah = sqrt_pd(a);
  const Mat aih = inv_sqrt_pd(a);
  const Mat inner = hermitian_part(aih * b * aih);
  return aih * sqrt_pd(inner) * ah;
}

Mat derivative_from_root(const Mat& c, const Mat& x, const Mat& y) {
  return sylvester::solve(c.adjoint(), c, y + c.adjoint() * x * c);
}

GeoMeanDerivative dgm(const Mat& a, const Mat& b, const Mat& x, const Mat& y) {
  GeoMeanDerivative out;
  out.C = positive_root(a, b);
  out.D = derivative_from_root(out.C, x, y);
  out.A = a;
  out.B = b;
  out.X = x;
  out.Y = y;
  return out;
}

double dgm_bound(const Mat& a, const Mat& b, BoundVariant variant) {
  const Mat c = positive_root(a, b);
  if (c.size() == 0) return 0.0;
  const double cn = norm2(c);
  const double factor = 1.0 + cn * cn;
  if (variant == BoundVariant::general) {
    return decay_integral(c, DecayMode::quadrature) * factor;
  }
  const double comm = (a * b - b * a).norm();
  if (comm > tol::cls * norm2(a) * norm2(b)) {
    throw Error(ErrorCode::NotCommuting, "dgm_bound: A and B do not commute");
  }
  const double lmin = min_real_eigenvalue(c);
  if (variant == BoundVariant::commuting_pi4) {
    return kPi / (4.0 * lmin) * factor;
  }
  return 1.0 / (2.0 * lmin) * factor;
}

double dgm_opnorm_identity_value(const Mat& a, const Mat& b) {
  const Mat id = identity(a.rows());
  return norm2(dgm(a, b, id, id).D);
}

}  // namespace mostowkit::geomean
