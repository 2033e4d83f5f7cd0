#include <doctest.h>

#include "mostowkit/decompose.hpp"
#include "mostowkit/matcore.hpp"
#include "mostowkit/validate.hpp"
#include "oracles.hpp"

using namespace mostowkit;
namespace v = mostowkit::validate;

namespace {

const cplx I1(0.0, 1.0);

Mat expi(const RMat& t) { return oracle::expm_taylor(Mat(I1 * t.cast<cplx>())); }
Mat expr(const RMat& t) { return oracle::expm_taylor(Mat(t.cast<cplx>())); }

void check_mostow(const Mat& z, const decompose::MostowFactors& f, double tol) {
  const Eigen::Index n = z.rows();
  CHECK(oracle::rel(Mat(f.W * f.P1 * f.P2.cast<cplx>()), z) <= tol);
  CHECK((f.W.adjoint() * f.W - identity(n)).norm() <= tol);
  CHECK((f.K + f.K.transpose()).norm() <= tol * std::max(1.0, f.K.norm()));
  CHECK((f.S - f.S.transpose()).norm() <= tol * std::max(1.0, f.S.norm()));
  CHECK((f.P1.conjugate() * f.P1 - identity(n)).norm() <= tol * f.P1.squaredNorm());
  CHECK(classify(f.P1).is_positive_definite);
  CHECK(classify(f.P2.cast<cplx>()).is_positive_definite);
  CHECK(oracle::rel(expi(f.K), f.P1) <= tol);
  CHECK(oracle::rel(expr(f.S), f.P2.cast<cplx>()) <= tol);
}

}  // namespace

TEST_CASE("mostow structural collapses") {
  Rng rng(51);
  const Mat u = v::random_unitary(rng, 3);
  auto f = decompose::mostow(u);
  CHECK((f.W - u).norm() <= 1e-12);
  CHECK(f.K.norm() <= 1e-12);
  CHECK(f.S.norm() <= 1e-12);

  RMat sym = RMat::Random(3, 3);
  sym = sym * sym.transpose() + RMat::Identity(3, 3);
  f = decompose::mostow(sym.cast<cplx>());
  CHECK((f.W - identity(3)).norm() <= 1e-12);
  CHECK(f.K.norm() <= 1e-12);
  CHECK(oracle::rel(expr(f.S), sym.cast<cplx>()) <= 1e-12);

  RMat k0(2, 2);
  k0 << 0, 0.3, -0.3, 0;
  f = decompose::mostow(expi(k0));
  CHECK((f.W - identity(2)).norm() <= 1e-12);
  CHECK(f.S.norm() <= 1e-12);
  CHECK((f.K - k0).norm() <= 1e-12);
}

TEST_CASE("mostow round trip and uniqueness") {
  Rng rng(52);
  for (int k = 0; k < 40; ++k) {
    const Eigen::Index n = 1 + k % 8;
    const double c = std::exp(rng.uniform() * std::log(1e4));
    const Mat z = v::random_with_cond(rng, n, c);
    const auto f = decompose::mostow(z);
    check_mostow(z, f, 1e-9);
    const auto g = decompose::mostow(Mat(f.W * f.P1 * f.P2.cast<cplx>()));
    CHECK((g.W - f.W).norm() <= 1e-9);
    CHECK((g.K - f.K).norm() <= 1e-9 * std::max(1.0, f.K.norm()));
    CHECK((g.S - f.S).norm() <= 1e-9 * std::max(1.0, f.S.norm()));
  }
  Mat sing = Mat::Zero(2, 2);
  sing(0, 0) = 1;
  try {
    decompose::mostow(sing);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
  Mat ill = identity(2);
  ill(1, 1) = 1e-9;
  try {
    decompose::mostow(ill);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
  }
}

TEST_CASE("d_mostow examples") {
  Rng rng(53);
  const Mat a = skew_hermitian_part(v::random_gaussian(rng, 3));
  auto t = decompose::d_mostow(identity(3), a);
  CHECK((t.DW - a).norm() <= 1e-12);
  CHECK(t.DP1.norm() <= 1e-12);
  CHECK(t.DP2.norm() <= 1e-12);
  const Mat ah = v::random_hermitian(rng, 3);
  t = decompose::d_mostow(identity(3), ah);
  CHECK((t.DP2 - ah.real().cast<cplx>()).norm() <= 1e-12);
  CHECK((t.DP1 - I1 * ah.imag().cast<cplx>()).norm() <= 1e-12);
  CHECK(t.DW.norm() <= 1e-12);
}

TEST_CASE("d_mostow invariants and finite differences") {
  Rng rng(54);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Mat z = v::random_with_cond(rng, n, 1 + 9 * rng.uniform());
    const Mat a = v::random_gaussian(rng, n);
    const auto f = decompose::mostow(z);
    const auto t = decompose::d_mostow(f, a);
    CHECK((t.X + t.X.adjoint()).norm() <= 1e-9 * t.X.norm() + 1e-14);
    CHECK(t.Y1.imag().norm() <= 1e-9 * t.Y1.norm() + 1e-14);
    CHECK((t.Y1 + t.Y1.transpose()).norm() <= 1e-9 * t.Y1.norm() + 1e-14);
    CHECK(t.Y2.imag().norm() <= 1e-9 * t.Y2.norm() + 1e-14);
    CHECK((t.Y2 - t.Y2.transpose()).norm() <= 1e-9 * t.Y2.norm() + 1e-14);
    const Mat p2 = f.P2.cast<cplx>();
    const Mat h1 = sqrt_pd(f.P1);
    const Mat recon = f.W * t.X * f.P1 * p2 + f.W * h1 * (I1 * t.Y1) * h1 * p2 + f.W * f.P1 * t.Y2;
    CHECK(oracle::rel(recon, a) <= 1e-9);
    const double h = 1e-5;
    const auto fp = decompose::mostow(z + h * a), fm = decompose::mostow(z - h * a);
    CHECK(oracle::rel(Mat((fp.W - fm.W) / (2 * h)), t.DW) <= 1e-5);
    CHECK(oracle::rel(Mat((fp.P1 - fm.P1) / (2 * h)), t.DP1) <= 1e-5);
    CHECK(oracle::rel(Mat((fp.P2 - fm.P2).cast<cplx>() / (2 * h)), t.DP2) <= 1e-5);
    // Linearity in the direction.
    const Mat b = v::random_gaussian(rng, n);
    const double alpha = -1.7;  // the factor maps are real-linear only
    const auto tl = decompose::d_mostow(f, Mat(alpha * a + b));
    const auto tb = decompose::d_mostow(f, b);
    CHECK((tl.DW - alpha * t.DW - tb.DW).norm() <= 1e-9 * tl.DW.norm() + 1e-12);
    CHECK((tl.DP1 - alpha * t.DP1 - tb.DP1).norm() <= 1e-9 * tl.DP1.norm() + 1e-12);
    CHECK((tl.DP2 - alpha * t.DP2 - tb.DP2).norm() <= 1e-9 * tl.DP2.norm() + 1e-12);
  }
}

TEST_CASE("unitary_split examples") {
  RMat rot(2, 2);
  rot << std::cos(0.7), std::sin(0.7), -std::sin(0.7), std::cos(0.7);
  auto s = decompose::unitary_split(rot.cast<cplx>());
  CHECK((s.W1 - rot).norm() <= 1e-14);
  CHECK((s.W2 - identity(2)).norm() <= 1e-14);
  CHECK(s.T.norm() <= 1e-14);

  const cplx e = std::polar(1.0, 1.2);
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = e;
  w(1, 1) = e;
  s = decompose::unitary_split(w);
  CHECK((s.W1 - RMat::Identity(2, 2)).norm() <= 1e-14);
  CHECK((s.W2 - w).norm() <= 1e-14);

  Rng rng(55);
  const Mat v0 = v::random_unitary(rng, 3);
  RMat q = RMat::Random(3, 3);
  q = Eigen::HouseholderQR<RMat>(q).householderQ();
  RVec th(3);
  th << 0.3, -1.0, 1.4;
  Vec ph(3);
  for (int i = 0; i < 3; ++i) ph(i) = std::polar(1.0, th(i));
  const Mat sym = q.cast<cplx>() * ph.asDiagonal() * q.transpose().cast<cplx>();
  s = decompose::unitary_split(sym);
  CHECK((s.W1 - RMat::Identity(3, 3)).norm() <= 1e-12);
  CHECK((s.W2 - sym).norm() <= 1e-12);
  (void)v0;
}

TEST_CASE("unitary_split invariants and branches") {
  Rng rng(56);
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index n = 1 + k % 6;
    const Mat w = v::random_unitary(rng, n);
    const auto s = decompose::unitary_split_auto(w);
    CHECK(oracle::rel(Mat(s.W1.cast<cplx>() * s.W2), w) <= 1e-9);
    CHECK((s.W1.transpose() * s.W1 - RMat::Identity(n, n)).norm() <= 1e-10);
    CHECK((s.W2 - s.W2.transpose()).norm() <= 1e-10);
    CHECK((s.W2.adjoint() * s.W2 - identity(n)).norm() <= 1e-10);
    CHECK(oracle::rel(oracle::expm_taylor(s.L), s.W1.cast<cplx>()) <= 1e-9);
    CHECK(oracle::rel(expi(s.T), s.W2) <= 1e-9);
    // A cut below all arguments of the spectrum of W^T W gives the same
    // factors as the principal branch.
    const Mat wtw = w.transpose() * w;
    Eigen::ComplexEigenSolver<Mat> es(wtw, false);
    double lo = kPi;
    for (const cplx& l : es.eigenvalues()) lo = std::min(lo, std::arg(l));
    decompose::UnitarySplit p;
    bool principal_ok = true;
    try {
      p = decompose::unitary_split(w, Branch::principal_branch(), Branch::principal_branch());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EigenvalueOnCut);
      principal_ok = false;
    }
    if (principal_ok && lo > -kPi + 0.02) {
      const auto b = decompose::unitary_split(w, Branch::at(0.5 * (lo - kPi)),
                                              Branch::principal_branch());
      CHECK((p.W1 - b.W1).norm() <= 1e-10);
      CHECK((p.W2 - b.W2).norm() <= 1e-10);
    }
  }
  // -1 in the spectrum of W^T W under the principal branch.
  Mat w = identity(2);
  w(0, 0) = I1;
  try {
    decompose::unitary_split(w);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EigenvalueOnCut);
  }
  try {
    decompose::unitary_split(Mat(2.0 * identity(2)));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnitary);
  }
}

TEST_CASE("auto branch on diag(-1, 1)") {
  Mat w = identity(2);
  w(0, 0) = -1.0;
  const auto s = decompose::unitary_split_auto(w);
  CHECK((s.W1 - w.real()).norm() <= 1e-14);
  CHECK((s.W2 - identity(2)).norm() <= 1e-14);
  CHECK(s.sheet.cut() >= -kPi);
  CHECK(s.sheet.cut() < 0.0);
  CHECK(oracle::rel(oracle::expm_taylor(s.L), w) <= 1e-12);
}

TEST_CASE("d_unitary_split") {
  RMat r(2, 2);
  r << 0, 0.8, -0.8, 0;
  auto t = decompose::d_unitary_split(identity(2), r.cast<cplx>());
  CHECK((t.X - r.cast<cplx>()).norm() <= 1e-14);
  CHECK(t.Y.norm() <= 1e-14);
  RMat m(2, 2);
  m << 0.5, 0.2, 0.2, -1.0;
  t = decompose::d_unitary_split(identity(2), Mat(I1 * m.cast<cplx>()));
  CHECK(t.X.norm() <= 1e-14);
  CHECK((t.Y - I1 * m.cast<cplx>()).norm() <= 1e-14);

  Rng rng(57);
  auto check_at = [&](const Mat& w) {
    const Eigen::Index n = w.rows();
    const Mat sd = skew_hermitian_part(v::random_gaussian(rng, n));
    const auto split = decompose::unitary_split_auto(w);
    const auto tg = decompose::d_unitary_split(split, sd);
    CHECK(tg.X.imag().norm() <= 1e-10 * tg.X.norm() + 1e-14);
    CHECK((tg.X + tg.X.transpose()).norm() <= 1e-10 * tg.X.norm() + 1e-14);
    CHECK(tg.Y.real().norm() <= 1e-10 * tg.Y.norm() + 1e-14);
    CHECK((tg.Y - tg.Y.transpose()).norm() <= 1e-10 * tg.Y.norm() + 1e-14);
    // W2 S W2^{-1} = X + W2^{1/2} Y W2^{-1/2}
    Eigen::SelfAdjointEigenSolver<RMat> es(split.T);
    Vec half(n);
    for (Eigen::Index i = 0; i < n; ++i) half(i) = std::polar(1.0, 0.5 * es.eigenvalues()(i));
    const Mat vv = es.eigenvectors().cast<cplx>();
    const Mat h = vv * half.asDiagonal() * vv.transpose();
    const Mat lhs = split.W2 * sd * split.W2.adjoint();
    CHECK((lhs - tg.X - h * tg.Y * h.adjoint()).norm() <= 1e-9 * lhs.norm());
    const double step = 1e-5;
    const auto sp = decompose::unitary_split(Mat(w * oracle::expm_taylor(Mat(step * sd))),
                                             split.sheet, split.log_branch);
    const auto sm = decompose::unitary_split(Mat(w * oracle::expm_taylor(Mat(-step * sd))),
                                             split.sheet, split.log_branch);
    CHECK(oracle::rel(Mat((sp.W1 - sm.W1).cast<cplx>() / (2 * step)), tg.DW1) <= 1e-5);
    CHECK(oracle::rel(Mat((sp.W2 - sm.W2) / (2 * step)), tg.DW2) <= 1e-5);
  };
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = std::polar(1.0, 0.4);
  d(1, 1) = std::polar(1.0, -0.3);
  check_at(d);
  for (int k = 0; k < 10; ++k) check_at(v::random_unitary(rng, 2 + k % 3));
}

TEST_CASE("bipolar") {
  auto b = decompose::bipolar(identity(3));
  CHECK(b.L.norm() + b.T.norm() + b.K.norm() + b.S.norm() <= 1e-14);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = std::exp(0.5);
  d(1, 1) = std::exp(-0.2);
  b = decompose::bipolar(d);
  CHECK(std::abs(b.S(0, 0) - 0.5) <= 1e-14);
  CHECK(std::abs(b.S(1, 1) + 0.2) <= 1e-14);
  CHECK(b.L.norm() + b.T.norm() + b.K.norm() <= 1e-14);

  Rng rng(58);
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index n = 1 + k % 8;
    const Mat z = v::random_with_cond(rng, n, std::exp(rng.uniform() * std::log(1e4)));
    const auto f = decompose::bipolar(z);
    const Mat rec = expr(f.L) * expi(f.T) * expi(f.K) * expr(f.S);
    CHECK(oracle::rel(rec, z) <= 1e-9);
    CHECK((f.L + f.L.transpose()).norm() <= 1e-9 * std::max(1.0, f.L.norm()));
    CHECK((f.T - f.T.transpose()).norm() <= 1e-9 * std::max(1.0, f.T.norm()));
    // An explicit sheet reproduces the automatic choice.
    const auto g = decompose::bipolar_with_sheet(z, f.alpha);
    CHECK((g.L - f.L).norm() <= 1e-9 * std::max(1.0, f.L.norm()));
    CHECK((g.T - f.T).norm() <= 1e-9 * std::max(1.0, f.T.norm()));
  }
}
