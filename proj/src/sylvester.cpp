#include "mostowkit/sylvester.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mostowkit/matcore.hpp"
#include "mostowkit/quadrature.hpp"

namespace mostowkit::sylvester {

namespace {

struct Spectral {
  Vec values;
  Mat v;
  Mat vinv;
  double kappa = 1.0;
};

Spectral decompose(const Mat& m) {
  Spectral s;
  const Eigen::Index n = m.rows();
  if (is_hermitian(m, 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
    s.values = es.eigenvalues().cast<cplx>();
    s.v = es.eigenvectors();
    s.vinv = s.v.adjoint();
    return s;
  }
  if (is_normal(m)) {
    Eigen::ComplexSchur<Mat> schur(m);
    s.values = schur.matrixT().diagonal();
    s.v = schur.matrixU();
    s.vinv = s.v.adjoint();
    return s;
  }
  Eigen::ComplexEigenSolver<Mat> es(m);
  s.values = es.eigenvalues();
  s.v = es.eigenvectors();
  const RVec sv = singular_values(s.v);
  s.kappa = sv(0) / sv(n - 1);
  if (!(s.kappa <= tol::cond_cap)) {
    throw Error(ErrorCode::NotDiagonalizable,
                "Sylvester coefficient has ill-conditioned eigenvectors");
  }
  s.vinv = s.v.partialPivLu().inverse();
  return s;
}

void check_shapes(const Problem& p) {
  require_square(p.A, "sylvester A");
  require_square(p.B, "sylvester B");
  if (p.R.rows() != p.A.rows() || p.R.cols() != p.B.rows()) {
    throw Error(ErrorCode::NotSquare, "sylvester: incompatible shapes");
  }
}

}  // namespace

Mat solve(const Problem& p) {
  check_shapes(p);
  if (p.R.size() == 0) return p.R;
  const Spectral a = decompose(p.A);
  const Spectral b = decompose(p.B);
  const double scale = norm2(p.A) + norm2(p.B);
  Mat denom(p.A.rows(), p.B.rows());
  for (Eigen::Index i = 0; i < denom.rows(); ++i) {
    for (Eigen::Index j = 0; j < denom.cols(); ++j) {
      denom(i, j) = a.values(i) + b.values(j);
      if (!(std::abs(denom(i, j)) > tol::sep * scale)) {
        throw Error(ErrorCode::SpectraOverlap,
                    "spectra of A and -B are not separated");
      }
    }
  }
  auto apply = [&](const Mat& r) -> Mat {
    Mat t = a.vinv * r * b.v;
    t.array() /= denom.array();
    return a.v * t * b.vinv;
  };
  Mat x = apply(p.R);
  const Mat resid = p.R - p.A * x - x * p.B;
  x += apply(resid);
  return x;
}

Mat solve(const Mat& a, const Mat& b, const Mat& r) { return solve(Problem{a, b, r}); }

Mat integral_solution(const Problem& p) {
  check_shapes(p);
  if (p.R.size() == 0) return p.R;
  const Spectral a = decompose(p.A);
  const Spectral b = decompose(p.B);
  double lam_a = std::numeric_limits<double>::infinity();
  double lam_b = lam_a;
  double lmax = 0.0;
  for (const cplx& l : a.values) {
    lam_a = std::min(lam_a, l.real());
    lmax = std::max(lmax, std::abs(l));
  }
  for (const cplx& l : b.values) {
    lam_b = std::min(lam_b, l.real());
    lmax = std::max(lmax, std::abs(l));
  }
  if (!(lam_a > 0.0 && lam_b > 0.0)) {
    throw Error(ErrorCode::DivergentIntegral,
                "integral_solution: spectra must lie in the right half plane");
  }
  const double lam = lam_a + lam_b;
  // ||exp(-tA) R exp(-tB)|| <= kappa_a kappa_b ||R|| exp(-lam t); the
  // integral itself is at least of order ||X||, bounded below by
  // ||R|| / (||A|| + ||B||), so pick T for a relative tail of 1e-15.
  const double rel_tail = 1e-15;
  const double ratio = a.kappa * b.kappa * (norm2(p.A) + norm2(p.B)) / lam;
  const double t_end = (std::log(1.0 / rel_tail) + std::log(ratio)) / lam;
  std::vector<double> breaks{0.0};
  for (double s = 1.0 / lmax; s < t_end; s *= 2.0) breaks.push_back(s);
  breaks.push_back(t_end);
  const Mat rt = a.vinv * p.R * b.v;
  auto integrand = [&](double t) -> Mat {
    Mat m = rt;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(i, j) *= std::exp(-t * (a.values(i) + b.values(j)));
      }
    }
    return a.v * m * b.vinv;
  };
  const double abs_tol = 1e-15 * p.R.norm() / lam;
  return quad::integrate(integrand, breaks, abs_tol, 1e-13).value;
}

}  // namespace mostowkit::sylvester
