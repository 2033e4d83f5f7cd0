#include "mostowkit/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "mostowkit/quadrature.hpp"

namespace mostowkit {

std::string_view to_string(NormKind k) {
  return k == NormKind::spectral ? "spectral" : "frobenius";
}

NormKind norm_kind_from_string(std::string_view s) {
  if (s == "spectral") return NormKind::spectral;
  if (s == "frobenius") return NormKind::frobenius;
  throw Error(ErrorCode::Parse, "unknown norm kind: " + std::string(s));
}

Branch Branch::at(double a) {
  if (!(a >= -kPi && a < kPi)) {
    throw Error(ErrorCode::BranchCut, "branch angle must lie in [-pi, pi)");
  }
  return Branch{false, a};
}

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::IllConditioned: return "ILL_CONDITIONED";
    case ErrorCode::BranchCut: return "BRANCH_CUT";
    case ErrorCode::NotPositiveDefinite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::SpectrumNotPositive: return "SPECTRUM_NOT_POSITIVE";
    case ErrorCode::DivergentIntegral: return "DIVERGENT_INTEGRAL";
    case ErrorCode::ModeInapplicable: return "MODE_INAPPLICABLE";
    case ErrorCode::SegmentSingular: return "SEGMENT_SINGULAR";
    case ErrorCode::SpectraOverlap: return "SPECTRA_OVERLAP";
    case ErrorCode::NotDiagonalizable: return "NOT_DIAGONALIZABLE";
    case ErrorCode::NotCommuting: return "NOT_COMMUTING";
    case ErrorCode::EigenvalueOnCut: return "EIGENVALUE_ON_CUT";
    case ErrorCode::BranchExhausted: return "BRANCH_EXHAUSTED";
    case ErrorCode::DeltaOutOfRange: return "DELTA_OUT_OF_RANGE";
    case ErrorCode::SpreadTooWide: return "SPREAD_TOO_WIDE";
    case ErrorCode::Hypothesis: return "HYPOTHESIS";
    case ErrorCode::NotLinear: return "NOT_LINEAR";
    case ErrorCode::MapUndefined: return "MAP_UNDEFINED";
    case ErrorCode::NotSquare: return "NOT_SQUARE";
    case ErrorCode::NotUnitary: return "NOT_UNITARY";
    case ErrorCode::Parse: return "PARSE";
  }
  return "UNKNOWN";
}

namespace {

double scale_of(const Mat& m) {
  const double s = m.norm();
  return s > 0.0 ? s : 1.0;
}

}  // namespace

RVec singular_values(const Mat& m) {
  if (m.size() == 0) return RVec();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  return singular_values(m)(0);
}

double norm(const Mat& m, NormKind which) {
  return which == NormKind::spectral ? norm2(m) : m.norm();
}

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorCode::NotSquare, os.str());
  }
}

double cond(const Mat& m) {
  require_square(m, "cond");
  if (m.size() == 0) return 1.0;
  const RVec s = singular_values(m);
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > tol::sing * smax)) {
    throw Error(ErrorCode::Singular, "matrix is numerically singular");
  }
  return smax / smin;
}

Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Mat skew_hermitian_part(const Mat& m) { return 0.5 * (m - m.adjoint()); }

RMat real_symmetric_part(const Mat& m) {
  const RMat r = m.real();
  return 0.5 * (r + r.transpose());
}

RMat real_skew_part(const Mat& m) {
  const RMat r = m.real();
  return 0.5 * (r - r.transpose());
}

bool is_hermitian(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol * scale_of(m);
}

bool is_normal(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double s = scale_of(m);
  return (m * m.adjoint() - m.adjoint() * m).norm() <= tol * s * s;
}

MatrixClassReport classify(const Mat& m) {
  require_square(m, "classify");
  MatrixClassReport r;
  const Eigen::Index n = m.rows();
  const double s = scale_of(m);
  const Mat id = identity(n);
  r.hermitian_residual = (m - m.adjoint()).norm() / s;
  r.unitary_residual = (m.adjoint() * m - id).norm();
  r.real_residual = m.imag().norm() / s;
  r.symmetric_residual = (m - m.transpose()).norm() / s;
  r.skew_symmetric_residual = (m + m.transpose()).norm() / s;
  r.circular_residual = (m.conjugate() * m - id).norm();
  double pd = r.hermitian_residual;
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m),
                                          Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    const double lmax = std::max(std::abs(es.eigenvalues()(n - 1)), 1e-300);
    if (!(lmin > 0.0)) pd = std::max(pd, 1.0 - lmin / lmax);
  }
  r.positive_definite_residual = pd;
  r.is_hermitian = r.hermitian_residual <= tol::cls;
  r.is_positive_definite = r.positive_definite_residual <= tol::cls;
  r.is_unitary = r.unitary_residual <= tol::cls;
  r.is_real = r.real_residual <= tol::cls;
  r.is_symmetric = r.symmetric_residual <= tol::cls;
  r.is_skew_symmetric = r.skew_symmetric_residual <= tol::cls;
  r.is_circular = r.circular_residual <= tol::cls;
  return r;
}

EigDecomposition eig(const Mat& m) {
  require_square(m, "eig");
  EigDecomposition d;
  if (m.size() == 0) return d;
  if (is_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
    d.values = es.eigenvalues().cast<cplx>();
    d.vectors = es.eigenvectors();
    d.kind = EigDecomposition::Kind::hermitian;
  } else {
    Eigen::ComplexEigenSolver<Mat> es(m);
    d.values = es.eigenvalues();
    d.vectors = es.eigenvectors();
    d.kind = EigDecomposition::Kind::general;
  }
  return d;
}

Mat hermitian_function(const Mat& h, const std::function<double(double)>& f) {
  if (h.size() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  RVec fv(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) fv(i) = f(es.eigenvalues()(i));
  const Mat& v = es.eigenvectors();
  return v * fv.cast<cplx>().asDiagonal() * v.adjoint();
}

Mat normal_function(const Mat& m, const std::function<cplx(cplx)>& f) {
  if (m.size() == 0) return m;
  if (m.rows() == 1) return Mat::Constant(1, 1, f(m(0, 0)));
  Eigen::ComplexSchur<Mat> schur(m);
  const Mat& u = schur.matrixU();
  Vec fv(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) fv(i) = f(schur.matrixT()(i, i));
  return u * fv.asDiagonal() * u.adjoint();
}

Mat mexp(const Mat& m) {
  require_square(m, "mexp");
  if (m.size() == 0) return m;
  if (is_hermitian(m, 1e-15)) {
    return hermitian_function(m, [](double x) { return std::exp(x); });
  }
  if (is_normal(m)) {
    return normal_function(m, [](cplx z) { return std::exp(z); });
  }
  return m.exp();
}

cplx log_branch(cplx z, Branch branch) {
  const double a = branch.cut();
  double th = std::arg(z);
  while (th < a) th += 2.0 * kPi;
  while (th >= a + 2.0 * kPi) th -= 2.0 * kPi;
  return {std::log(std::abs(z)), th};
}

namespace {

Vec eigenvalues_of(const Mat& m) {
  if (m.rows() == 1) return Vec::Constant(1, m(0, 0));
  if (is_normal(m)) {
    Eigen::ComplexSchur<Mat> schur(m, false);
    return schur.matrixT().diagonal();
  }
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  return es.eigenvalues();
}

}  // namespace

Mat mlog(const Mat& m, Branch branch) {
  require_square(m, "mlog");
  if (m.size() == 0) return m;
  const double scale = norm2(m);
  const cplx ray = std::polar(1.0, branch.cut());
  for (const cplx& l : eigenvalues_of(m)) {
    if (!(std::abs(l) > tol::sing * scale)) {
      throw Error(ErrorCode::Singular, "mlog: matrix is singular");
    }
    if (std::abs(l - std::abs(l) * ray) <= tol::sing * scale) {
      throw Error(ErrorCode::BranchCut, "mlog: eigenvalue on the branch cut");
    }
  }
  if (is_normal(m)) {
    return normal_function(m, [branch](cplx z) { return log_branch(z, branch); });
  }
  const double shift = branch.cut() + kPi;
  const Mat rotated = std::polar(1.0, -shift) * m;
  Mat out = rotated.log();
  out.diagonal().array() += cplx(0.0, shift);
  return out;
}

namespace {

void require_pd(const Mat& p, const char* what) {
  require_square(p, what);
  if (!is_hermitian(p)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(what) + ": matrix is not Hermitian");
  }
  if (p.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(p),
                                        Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(what) + ": matrix is not positive definite");
  }
}

}  // namespace

Mat sqrt_pd(const Mat& p) {
  require_pd(p, "sqrt_pd");
  return hermitian_function(p, [](double x) { return std::sqrt(x); });
}

Mat inv_sqrt_pd(const Mat& p) {
  require_pd(p, "inv_sqrt_pd");
  return hermitian_function(p, [](double x) { return 1.0 / std::sqrt(x); });
}

Mat pow_pd(const Mat& p, double exponent) {
  require_pd(p, "pow_pd");
  return hermitian_function(p,
                            [exponent](double x) { return std::pow(x, exponent); });
}

namespace {

// Eigen-decomposition with an eigenvector conditioning guard.
struct Diagonalization {
  Vec values;
  Mat v;
  Mat vinv;
  double kappa = 1.0;
  bool unitary = false;
};

Diagonalization diagonalize(const Mat& m) {
  Diagonalization d;
  const Eigen::Index n = m.rows();
  if (n == 0) return d;
  if (is_hermitian(m, 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
    d.values = es.eigenvalues().cast<cplx>();
    d.v = es.eigenvectors();
    d.vinv = d.v.adjoint();
    d.unitary = true;
    return d;
  }
  if (is_normal(m)) {
    Eigen::ComplexSchur<Mat> schur(m);
    d.values = schur.matrixT().diagonal();
    d.v = schur.matrixU();
    d.vinv = d.v.adjoint();
    d.unitary = true;
    return d;
  }
  Eigen::ComplexEigenSolver<Mat> es(m);
  d.values = es.eigenvalues();
  d.v = es.eigenvectors();
  const RVec s = singular_values(d.v);
  d.kappa = s(0) / s(n - 1);
  if (!(d.kappa <= tol::cond_cap)) {
    throw Error(ErrorCode::NotDiagonalizable,
                "eigenvector matrix conditioning exceeds cond_cap");
  }
  d.vinv = d.v.partialPivLu().inverse();
  return d;
}

}  // namespace

Mat sqrt_positive_spectrum(const Mat& m) {
  require_square(m, "sqrt_positive_spectrum");
  if (m.size() == 0) return m;
  Diagonalization d;
  try {
    d = diagonalize(m);
  } catch (const Error& e) {
    throw Error(ErrorCode::SpectrumNotPositive, e.what());
  }
  RVec r(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const cplx l = d.values(i);
    if (!(l.real() > 0.0) || std::abs(l.imag()) > tol::cls * std::abs(l)) {
      throw Error(ErrorCode::SpectrumNotPositive,
                  "sqrt_positive_spectrum: eigenvalue not positive real");
    }
    r(i) = std::sqrt(l.real());
  }
  return d.v * r.cast<cplx>().asDiagonal() * d.vinv;
}

double decay_integral(const Mat& c, DecayMode mode) {
  require_square(c, "decay_integral");
  const Eigen::Index n = c.rows();
  if (n == 0) return 0.0;
  const Diagonalization d = diagonalize(c);
  double lam = std::numeric_limits<double>::infinity();
  double lmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    lam = std::min(lam, d.values(i).real());
    lmax = std::max(lmax, std::abs(d.values(i)));
  }
  if (!(lam > tol::sing * lmax)) {
    throw Error(ErrorCode::DivergentIntegral,
                "decay_integral: spectrum not in the open right half plane");
  }
  switch (mode) {
    case DecayMode::commuting_exact: {
      if (!is_hermitian(c)) {
        throw Error(ErrorCode::ModeInapplicable,
                    "commuting_exact requires a Hermitian argument");
      }
      return 1.0 / (2.0 * lam);
    }
    case DecayMode::hermitian_part_bound: {
      Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(c),
                                            Eigen::EigenvaluesOnly);
      const double h = es.eigenvalues()(0);
      if (!(h > 0.0)) {
        throw Error(ErrorCode::ModeInapplicable,
                    "Hermitian part of the argument is not positive definite");
      }
      return 1.0 / (2.0 * h);
    }
    case DecayMode::quadrature:
      break;
  }
  // The integral is at least 1/(2 lam) because the spectral radius of
  // exp(-tC) is exp(-t lam); the tail beyond T is at most
  // kappa^2 exp(-2 lam T) / (2 lam), so T below makes the tail a relative
  // 1e-16 of the value.
  const double rel_tail = 1e-16;
  const double t_end =
      (std::log(1.0 / rel_tail) + 2.0 * std::log(d.kappa)) / (2.0 * lam);
  std::vector<double> breaks{0.0};
  for (double b = 1.0 / lmax; b < t_end; b *= 2.0) breaks.push_back(b);
  breaks.push_back(t_end);

  auto integrand = [&](double t) -> double {
    if (d.unitary) {
      return std::exp(-2.0 * lam * t);
    }
    Vec e(n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) = std::exp(-t * d.values(i));
    const Mat m = d.v * e.asDiagonal() * d.vinv;
    const double s = norm2(m);
    return s * s;
  };
  const auto res = quad::integrate(integrand, breaks, 0.0, 1e-14);
  return res.value;
}

namespace {

void require_segment(const Mat& a) {
  const double scale = norm2(a);
  for (const cplx& l : eigenvalues_of(a)) {
    if (std::abs(l.imag()) <= tol::sing * scale &&
        l.real() <= tol::sing * scale) {
      throw Error(ErrorCode::SegmentSingular,
                  "eigenvalue on the closed negative real axis");
    }
  }
}

}  // namespace

Mat dlog_apply(const Mat& a, const Mat& x) {
  require_square(a, "dlog_apply");
  if (x.rows() != a.rows() || x.cols() != a.cols()) {
    throw Error(ErrorCode::NotSquare, "dlog_apply: size mismatch");
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return x;
  require_segment(a);
  const Mat am = a - identity(n);
  auto integrand = [&](double t) -> Mat {
    const Mat m = t * am + identity(n);
    const Mat inv = m.partialPivLu().inverse();
    return Mat(inv * x * inv);
  };
  const double scale = std::max(x.norm(), 1e-300);
  const auto res = quad::integrate(integrand, 0.0, 1.0, 1e-15 * scale, 1e-13);
  return res.value;
}

Mat dlog_pd(const Mat& a, const Mat& x) {
  require_pd(a, "dlog_pd");
  const Eigen::Index n = a.rows();
  if (n == 0) return x;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  const RVec& l = es.eigenvalues();
  const Mat& v = es.eigenvectors();
  Mat y = v.adjoint() * x * v;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dl = l(i) - l(j);
      const double g = dl == 0.0 ? 1.0 / l(j) : std::log1p(dl / l(j)) / dl;
      y(i, j) *= g;
    }
  }
  return v * y * v.adjoint();
}

}  // namespace mostowkit
