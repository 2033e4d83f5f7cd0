#include "mostowkit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mostowkit/geomean.hpp"
#include "mostowkit/matcore.hpp"
#include "mostowkit/quadrature.hpp"

namespace mostowkit::bounds {

namespace {

RVec hermitian_eigenvalues(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Vec spectrum(const Mat& m) {
  if (m.rows() == 1) return Vec::Constant(1, m(0, 0));
  Eigen::ComplexSchur<Mat> schur(m, false);
  return schur.matrixT().diagonal();
}

// Powers of Q = Z^*Z and of conj(Q) through the SVD of Z.
Mat gram_power(const Eigen::JacobiSVD<Mat>& svd, double p, bool conjugate) {
  const RVec s = svd.singularValues().array().pow(2.0 * p);
  const Mat v = conjugate ? Mat(svd.matrixV().conjugate()) : svd.matrixV();
  return v * s.cast<cplx>().asDiagonal() * v.adjoint();
}

// The bounds need -1 outside the spectrum of W^T W.
void check_hypothesis(const Mat& w) {
  if (w.rows() == 0) return;
  for (const cplx& l : spectrum(Mat(w.transpose() * w))) {
    if (std::abs(l + 1.0) <= tol::sing) {
      throw Error(ErrorCode::Hypothesis, "bipolar_bounds: -1 lies in the spectrum of W^T W");
    }
  }
}

}  // namespace

double beta(const Mat& z) {
  require_square(z, "beta");
  if (z.size() == 0) return 0.0;
  cond(z);  // singularity check
  const Mat q = hermitian_part(z.adjoint() * z);
  const Mat c = geomean::positive_root(q, q.conjugate());
  return decay_integral(c, DecayMode::quadrature);
}

double k_of_Z(const Mat& z) {
  const double c = cond(z);
  return beta(z) * c * (1.0 + std::pow(c, 4));
}

double c_of_W(const Mat& w) {
  require_square(w, "c_of_W");
  const Eigen::Index n = w.rows();
  if (n == 0) return 1.0;
  const Mat id = identity(n);
  if (w == id) return 1.0;
  const double scale = std::max(norm2(w), 1.0);
  const Vec ev = spectrum(w);
  for (const cplx& l : ev) {
    if (std::abs(l.imag()) <= tol::sing * scale && l.real() <= tol::sing * scale) {
      throw Error(ErrorCode::SegmentSingular,
                  "c_of_W: t(W - I) + I is singular on [0, 1]");
    }
  }
  const bool normal = is_normal(w);
  const Mat wm = w - id;
  auto integrand = [&](double t) -> double {
    if (normal) {
      double m = 0.0;
      for (const cplx& l : ev) m = std::max(m, 1.0 / std::norm(1.0 + t * (l - 1.0)));
      return m;
    }
    const RVec s = singular_values(t * wm + id);
    const double smin = s(s.size() - 1);
    return 1.0 / (smin * smin);
  };
  return quad::integrate(integrand, 0.0, 1.0, 0.0, 1e-13).value;
}

MostowBoundReport mostow_bounds(const Mat& z, const decompose::MostowFactors& f,
                                NormKind norm_kind) {
  MostowBoundReport r;
  r.norm_kind = norm_kind;
  if (z.size() == 0) return r;
  r.beta = beta(z);
  r.condZ = cond(z);
  const double c = r.condZ;
  r.k = r.beta * c * (1.0 + std::pow(c, 4));

  const RVec p1e = hermitian_eigenvalues(f.P1);
  const double p1_norm = p1e(p1e.size() - 1);
  const double p1_inv_norm = 1.0 / p1e(0);
  const double p1_cond = p1_norm * p1_inv_norm;
  Eigen::SelfAdjointEigenSolver<RMat> se(f.S, Eigen::EigenvaluesOnly);
  const double p2_inv_norm = std::exp(-se.eigenvalues()(0));

  const double tail = 1.0 + p1_norm * r.k;
  r.b_P2 = r.k;
  r.b_P1 = p1_cond * p2_inv_norm / 2.0 * tail;
  r.b_W = p1_inv_norm * p2_inv_norm / 2.0 * tail;
  r.b_P1_alt = p1_norm * p1_norm * p2_inv_norm * tail;

  Eigen::JacobiSVD<Mat> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  const double z_norm = s(0);
  const double zinv_norm = 1.0 / s(s.size() - 1);
  const Mat cq_m14 = gram_power(svd, -0.25, true);
  const Mat q_m12 = gram_power(svd, -0.5, false);
  const Mat cq_14 = gram_power(svd, 0.25, true);
  const Mat q_12 = gram_power(svd, 0.5, false);
  const double inner_minus = norm2(cq_m14 * q_m12 * cq_m14);
  const double inner_plus = norm2(cq_14 * q_12 * cq_14);
  r.b_P2_gram = z_norm * r.beta * inner_minus *
                    (1.0 + std::pow(zinv_norm, 4) * inner_plus * inner_plus);
  return r;
}

MostowBoundReport mostow_bounds(const Mat& z, NormKind norm_kind) {
  return mostow_bounds(z, decompose::mostow(z), norm_kind);
}

SplitBound unitary_split_bound(const decompose::UnitarySplit& split,
                               DeltaPolicy policy) {
  double spread = 0.0;
  if (split.T.size() > 0) {
    Eigen::SelfAdjointEigenSolver<RMat> es(split.T, Eigen::EigenvaluesOnly);
    spread = es.eigenvalues()(es.eigenvalues().size() - 1) - es.eigenvalues()(0);
  }
  double delta = policy.automatic ? spread + tol::margin_delta : policy.delta;
  if (!policy.automatic && !(delta > spread)) {
    throw Error(ErrorCode::SpreadTooWide,
                "unitary_split_bound: delta does not cover the spectral spread");
  }
  if (!(delta < kPi - tol::angle)) {
    throw Error(ErrorCode::SpreadTooWide,
                "unitary_split_bound: spectral spread of W2 reaches pi");
  }
  SplitBound out;
  out.fourier = fourier_an(delta, tol::fourier);
  out.bound = out.fourier.double_l1_sum;
  return out;
}

SplitBound unitary_split_bound(const Mat& w, DeltaPolicy policy) {
  return unitary_split_bound(decompose::unitary_split_auto(w), policy);
}

double polar_comparison_bound(const Mat& w2) {
  return decay_integral(w2, DecayMode::quadrature);
}

BipolarBoundReport bipolar_bounds(const Mat& z, const decompose::BipolarFactors& f,
                                  NormKind norm_kind) {
  BipolarBoundReport r;
  r.norm_kind = norm_kind;
  r.alpha = f.alpha;
  const Mat& w = f.mostow.W;
  const Eigen::Index n = w.rows();
  const Mat wtw = w.transpose() * w;
  check_hypothesis(w);
  r.k = k_of_Z(z);

  const Mat p1 = f.mostow.P1;
  const Mat p1_inv = p1.partialPivLu().inverse();
  const RVec p1e = n > 0 ? hermitian_eigenvalues(p1) : RVec();
  const double p1_norm = n > 0 ? p1e(n - 1) : 0.0;
  const double p1_cond = n > 0 ? p1e(n - 1) / p1e(0) : 1.0;
  const double p1_inv_norm = n > 0 ? 1.0 / p1e(0) : 0.0;
  const Mat e_minus_s =
      n > 0 ? hermitian_function(Mat(-f.S.cast<cplx>()), [](double x) { return std::exp(x); })
            : Mat(0, 0);
  const double ems_spec = norm2(e_minus_s);

  r.b_S = norm(e_minus_s, norm_kind) * r.k;
  r.b_K = norm(p1_inv, norm_kind) * (p1_cond * ems_spec / 2.0) * (1.0 + p1_norm * r.k);
  const double common = p1_inv_norm * ems_spec / 2.0 * (1.0 + p1_norm * r.k);

  r.fourier = unitary_split_bound(f.split).fourier;
  const double sum_abs = r.fourier.double_l1_sum / 2.0;
  r.C_eL = c_of_W(f.split.W1.cast<cplx>());
  r.C_eiT = c_of_W(f.split.W2);
  r.C_WtW = c_of_W(wtw);
  r.b_L = 2.0 * r.C_eL * sum_abs * common;
  r.b_T = 2.0 * r.C_eiT * sum_abs * common;
  r.b_L_direct = 1.0 + r.C_WtW;
  r.b_T_direct = r.C_WtW;

  bool right_half = true;
  if (n > 0) {
    for (const cplx& l : spectrum(f.split.W2)) right_half = right_half && l.real() > 0.0;
  }
  if (right_half && n > 0) r.polar_comparison = polar_comparison_bound(f.split.W2);
  return r;
}

BipolarBoundReport bipolar_bounds(const Mat& z, NormKind norm_kind) {
  // Check the hypothesis before the branch search, which may fail first.
  check_hypothesis(decompose::mostow(z).W);
  return bipolar_bounds(z, decompose::bipolar(z), norm_kind);
}

}  // namespace mostowkit::bounds
