#include "mostowkit/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mostowkit/geomean.hpp"
#include "mostowkit/matcore.hpp"
#include "mostowkit/sylvester.hpp"

namespace mostowkit::decompose {

namespace {

Mat inverse(const Mat& m) { return m.partialPivLu().inverse(); }

// exp(i theta T) for real symmetric T, symmetric by construction.
Mat expi_symmetric(const RMat& t, double theta = 1.0) {
  const Eigen::Index n = t.rows();
  if (n == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (t + t.transpose()));
  Vec e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e(i) = std::polar(1.0, theta * es.eigenvalues()(i));
  }
  const Mat v = es.eigenvectors().cast<cplx>();
  return v * e.asDiagonal() * v.transpose();
}

RMat exp_symmetric(const RMat& s) {
  if (s.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s + s.transpose()));
  const RVec e = es.eigenvalues().array().exp();
  const RMat& v = es.eigenvectors();
  return v * e.asDiagonal() * v.transpose();
}

Vec spectrum(const Mat& m) {
  if (m.size() == 0) return Vec();
  if (m.rows() == 1) return Vec::Constant(1, m(0, 0));
  Eigen::ComplexSchur<Mat> schur(m, false);
  return schur.matrixT().diagonal();
}

double angular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

// Structured initial factorization through the SVD of Z.
void initial_factors(const Mat& z, const Eigen::JacobiSVD<Mat>& svd, Mat& w,
                     Mat& p1, RMat& p2) {
  const RVec& s = svd.singularValues();
  const Mat& v = svd.matrixV();
  const Eigen::Index n = z.rows();
  // With Q = Z^*Z = V S^2 V^*, Q # conj(Q) = V S |M^*| S V^* where
  // M = S^{-1} V^* conj(V) S and |M^*| = (M M^*)^{1/2}.
  Mat m = v.adjoint() * v.conjugate();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) *= s(j) / s(i);
  }
  Eigen::JacobiSVD<Mat> msvd(m, Eigen::ComputeFullU);
  const Mat abs_mt = msvd.matrixU() *
                     msvd.singularValues().cast<cplx>().asDiagonal() *
                     msvd.matrixU().adjoint();
  const Mat vs = v * s.cast<cplx>().asDiagonal();
  const Mat g = hermitian_part(vs * abs_mt * vs.adjoint());
  p2 = real_symmetric_part(sqrt_pd(g));
  // Polar factorization of Y = Z P2^{-1} = W P1.
  const Mat y = z * inverse(p2.cast<cplx>());
  Eigen::JacobiSVD<Mat> ysvd(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
  w = ysvd.matrixU() * ysvd.matrixV().adjoint();
  p1 = hermitian_part(ysvd.matrixV() *
                      ysvd.singularValues().cast<cplx>().asDiagonal() *
                      ysvd.matrixV().adjoint());
}

}  // namespace

MostowTangent mostow_tangent(const Mat& w, const Mat& p1, const Mat& p2,
                             const Mat& a) {
  MostowTangent t;
  const Eigen::Index n = w.rows();
  if (n == 0) {
    t.DW = t.DP1 = t.DP2 = t.X = t.Y1 = t.Y2 = Mat(0, 0);
    return t;
  }
  const Mat p1i = inverse(p1);
  const Mat p2i = inverse(p2);
  const Mat z = w * p1 * p2;
  const Mat q = a.adjoint() * z + z.adjoint() * a;
  const Mat c = p2i * p1i * p1i * p2;
  const Mat g = geomean::derivative_from_root(c, q, q.conjugate());
  t.Y2 = sylvester::solve(p2, p2, g);
  const Mat base = w.adjoint() * a - p1 * t.Y2;
  const Mat nmat = base * p2i;
  const Mat mmat = nmat * p1i;
  t.DP1 = sylvester::solve(p1i, p1i, mmat + mmat.adjoint());
  t.X = sylvester::solve(p1, p1, nmat - nmat.adjoint());
  t.DW = w * t.X;
  t.DP2 = t.Y2;
  const Mat p1ih = inv_sqrt_pd(hermitian_part(p1));
  t.Y1 = cplx(0.0, -1.0) * p1ih * t.DP1 * p1ih;
  return t;
}

MostowFactors mostow(const Mat& z) {
  require_square(z, "mostow");
  MostowFactors f;
  const Eigen::Index n = z.rows();
  if (n == 0) {
    f.W = f.P1 = Mat(0, 0);
    f.K = f.S = f.P2 = RMat(0, 0);
    return f;
  }
  Eigen::JacobiSVD<Mat> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  if (!(s(n - 1) > tol::sing * s(0))) {
    throw Error(ErrorCode::Singular, "mostow: matrix is numerically singular");
  }
  if (!(s(0) / s(n - 1) < tol::cond_cap)) {
    throw Error(ErrorCode::IllConditioned, "mostow: cond(Z) exceeds cond_cap");
  }
  Mat w, p1;
  RMat p2;
  initial_factors(z, svd, w, p1, p2);

  RMat S = real_symmetric_part(
      hermitian_function(p2.cast<cplx>(), [](double x) { return std::log(x); }));
  RMat K = real_skew_part(
      cplx(0.0, -1.0) *
      hermitian_function(p1, [](double x) { return std::log(x); }));

  // Newton polishing on the structured parameters (W, K, S): the correction
  // is the tangent of the factor maps applied to the residual.
  const double zn = z.norm();
  for (int it = 0; it < 4; ++it) {
    const Mat ik = cplx(0.0, 1.0) * K.cast<cplx>();
    p1 = hermitian_function(ik, [](double x) { return std::exp(x); });
    p2 = exp_symmetric(S);
    const Mat p2c = p2.cast<cplx>();
    const Mat e = z - w * p1 * p2c;
    if (e.norm() <= 4.0 * std::numeric_limits<double>::epsilon() * zn) break;
    const MostowTangent d = mostow_tangent(w, p1, p2c, e);
    const Mat ds = dlog_pd(p2c, d.DP2);
    const Mat dk = cplx(0.0, -1.0) * dlog_pd(p1, d.DP1);
    w = w * mexp(skew_hermitian_part(d.X));
    S += real_symmetric_part(ds);
    K += real_skew_part(dk);
  }
  const Mat ik = cplx(0.0, 1.0) * K.cast<cplx>();
  f.W = w;
  f.K = K;
  f.S = S;
  f.P1 = hermitian_function(ik, [](double x) { return std::exp(x); });
  f.P2 = exp_symmetric(S);
  f.alpha = Branch::principal_branch();
  return f;
}

MostowTangent d_mostow(const MostowFactors& f, const Mat& a) {
  return mostow_tangent(f.W, f.P1, f.P2.cast<cplx>(), a);
}

MostowTangent d_mostow(const Mat& z, const Mat& a) {
  if (a.rows() != z.rows() || a.cols() != z.cols()) {
    throw Error(ErrorCode::NotSquare, "d_mostow: direction shape mismatch");
  }
  return d_mostow(mostow(z), a);
}

UnitarySplit unitary_split(const Mat& w, Branch sheet, Branch log_branch) {
  require_square(w, "unitary_split");
  const Eigen::Index n = w.rows();
  if ((w.adjoint() * w - identity(n)).norm() > tol::cls) {
    throw Error(ErrorCode::NotUnitary, "unitary_split: W is not unitary");
  }
  UnitarySplit out;
  out.sheet = sheet;
  out.log_branch = log_branch;
  if (n == 0) {
    out.W1 = out.T = RMat(0, 0);
    out.W2 = out.L = Mat(0, 0);
    return out;
  }
  const Mat wtw = w.transpose() * w;
  Mat logwtw;
  try {
    logwtw = mlog(0.5 * (wtw + wtw.transpose()), sheet);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BranchCut) {
      throw Error(ErrorCode::EigenvalueOnCut,
                  "unitary_split: eigenvalue of W^T W on the cut");
    }
    throw;
  }
  out.T = real_symmetric_part(cplx(0.0, -0.5) * logwtw);
  out.W2 = expi_symmetric(out.T);
  out.W1 = (w * out.W2.adjoint()).real();
  try {
    out.L = mlog(out.W1.cast<cplx>(), log_branch);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BranchCut) {
      throw Error(ErrorCode::EigenvalueOnCut,
                  "unitary_split: eigenvalue of W1 on the cut");
    }
    throw;
  }
  return out;
}

UnitarySplit unitary_split(const Mat& w, Branch alpha) {
  return unitary_split(w, alpha, alpha);
}

double split_structure_residual(const UnitarySplit& s) {
  if (s.L.size() == 0) return 0.0;
  const RMat lr = s.L.real();
  return std::max(s.L.imag().norm(), (lr + lr.transpose()).norm());
}

bool real_split_search(const Mat& w, UnitarySplit& out) {
  require_square(w, "unitary_split");
  const Eigen::Index n = w.rows();
  if (n == 0) {
    out = unitary_split(w, Branch::principal_branch());
    return true;
  }
  const Vec sw = spectrum(w.transpose() * w);
  std::vector<double> args;
  for (const cplx& l : sw) args.push_back(std::arg(l));
  std::sort(args.begin(), args.end());

  std::vector<Branch> candidates{Branch::principal_branch()};
  auto add = [&](double a) {
    while (a >= kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    candidates.push_back(Branch::at(a));
  };
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i + 1] - args[i] > 1e-8) add(0.5 * (args[i] + args[i + 1]));
  }
  // Cut above every argument: each eigenvalue moves to the upper sheet.
  if (kPi - args.back() > 1e-8) add(0.5 * (args.back() + kPi));
  // Cut just above -pi: every eigenvalue stays on the principal sheet.
  if (args.front() + kPi > 1e-8) add(0.5 * (args.front() - kPi));

  const double gate = 1e-6;
  bool found = false;
  double best_score = -1.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Branch& sheet = candidates[c];
    UnitarySplit s;
    try {
      s = unitary_split(w, sheet, Branch::principal_branch());
    } catch (const Error&) {
      continue;
    }
    if (split_structure_residual(s) > 1e-8) continue;
    double score = std::numeric_limits<double>::infinity();
    for (double a : args) score = std::min(score, angular_distance(a, sheet.cut()));
    for (const cplx& l : spectrum(s.W1.cast<cplx>())) {
      score = std::min(score, std::abs(l + 1.0));
    }
    if (c == 0 && score > gate) {
      out = s;
      return true;
    }
    if (score > best_score) {
      best_score = score;
      out = s;
      found = true;
    }
  }
  return found;
}

namespace {

// Midpoint of the widest arc of [-pi, 0) free of the given angles.
double widest_lower_gap(const std::vector<double>& angles) {
  std::vector<double> pts{-kPi, 0.0};
  for (double a : angles) {
    double x = a;
    if (x >= kPi) x -= 2.0 * kPi;
    if (x >= -kPi && x <= 0.0) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  double best = -1.0, mid = -kPi / 2;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] > best) {
      best = pts[i + 1] - pts[i];
      mid = 0.5 * (pts[i] + pts[i + 1]);
    }
  }
  if (best <= 1e-9) {
    throw Error(ErrorCode::BranchExhausted, "no admissible branch angle");
  }
  return mid;
}

std::vector<double> args_of(const Vec& v) {
  std::vector<double> out;
  for (const cplx& l : v) out.push_back(std::arg(l));
  return out;
}

bool collides(double alpha, const std::vector<double>& angles) {
  for (double a : angles) {
    if (angular_distance(a, alpha) < 1e-6) return true;
  }
  return false;
}

}  // namespace

UnitarySplit unitary_split_auto(const Mat& w) {
  UnitarySplit out;
  if (real_split_search(w, out)) return out;
  std::vector<double> angles = args_of(spectrum(w.transpose() * w));
  double alpha = widest_lower_gap(angles);
  for (int attempt = 0; attempt < 2; ++attempt) {
    UnitarySplit s;
    try {
      s = unitary_split(w, Branch::at(alpha));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EigenvalueOnCut) throw;
      s.W1.resize(0, 0);
    }
    std::vector<double> w1 = args_of(spectrum(s.W1.cast<cplx>()));
    std::vector<double> w2 = args_of(spectrum(s.W2));
    if (s.W1.size() != 0 && !collides(alpha, w1) && !collides(alpha, w2)) {
      return s;
    }
    if (s.W1.size() == 0) {
      // Split with the WtW-only angle to learn the factor spectra.
      s = unitary_split(w, Branch::at(alpha), Branch::principal_branch());
      w1 = args_of(spectrum(s.W1.cast<cplx>()));
      w2 = args_of(spectrum(s.W2));
    }
    angles.insert(angles.end(), w1.begin(), w1.end());
    angles.insert(angles.end(), w2.begin(), w2.end());
    alpha = widest_lower_gap(angles);
  }
  throw Error(ErrorCode::BranchExhausted, "no admissible branch angle");
}

BipolarFactors bipolar(const Mat& z, BipolarOptions opts) {
  BipolarFactors b;
  b.mostow = mostow(z);
  if (opts.automatic) {
    if (!real_split_search(b.mostow.W, b.split)) {
      throw Error(ErrorCode::BranchExhausted,
                  "bipolar: no sheet gives a real logarithm of W1");
    }
  } else {
    b.split = unitary_split(b.mostow.W, opts.sheet, Branch::principal_branch());
    if (split_structure_residual(b.split) > 1e-8) {
      throw Error(ErrorCode::BranchCut,
                  "bipolar: W1 has no real logarithm on this sheet");
    }
  }
  b.L = real_skew_part(b.split.L);
  b.T = b.split.T;
  b.K = b.mostow.K;
  b.S = b.mostow.S;
  b.alpha = b.split.sheet;
  return b;
}

BipolarFactors bipolar_with_sheet(const Mat& z, Branch sheet) {
  return bipolar(z, BipolarOptions{false, sheet});
}

SplitTangent d_unitary_split(const UnitarySplit& split, const Mat& s_dir) {
  SplitTangent t;
  t.S_dir = s_dir;
  const Eigen::Index n = split.W2.rows();
  if (n == 0) {
    t.DW1 = t.DW2 = t.X = t.Y = Mat(0, 0);
    return t;
  }
  const Mat& w2 = split.W2;
  const Mat h = expi_symmetric(split.T, 0.5);
  const Mat hi = h.adjoint();
  const Mat w2h3 = w2 * h;
  const Mat st = s_dir.transpose();
  t.Y = sylvester::solve(w2, w2, w2h3 * s_dir * hi + hi * st * w2h3);
  t.X = sylvester::solve(w2, w2, w2 * s_dir - st * w2);
  t.DW1 = split.W1.cast<cplx>() * t.X;
  t.DW2 = h * t.Y * h;
  return t;
}

SplitTangent d_unitary_split(const Mat& w, const Mat& s_dir) {
  return d_unitary_split(unitary_split_auto(w), s_dir);
}

}  // namespace mostowkit::decompose
