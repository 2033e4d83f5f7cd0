#pragma once
// Independent reference computations used only by the tests. None of these
// call into the library's spectral machinery.

#include <cmath>
#include <functional>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "mostowkit/types.hpp"

namespace oracle {

using mostowkit::cplx;
using mostowkit::Mat;

// Largest singular value from the Hermitian eigenproblem of M^* M. Power
// iteration stalls when the top singular values nearly coincide.
inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(m.adjoint() * m), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// A X + X B = R through the Kronecker form (I (x) A + B^T (x) I) vec X = vec R.
inline Mat sylvester_kron(const Mat& a, const Mat& b, const Mat& r) {
  const Eigen::Index n = a.rows(), m = b.rows();
  const Mat big = Eigen::kroneckerProduct(Mat::Identity(m, m), a) +
                  Eigen::kroneckerProduct(b.transpose(), Mat::Identity(n, n));
  const Eigen::VectorXcd x =
      big.fullPivLu().solve(Eigen::Map<const Eigen::VectorXcd>(r.data(), r.size()));
  return Eigen::Map<const Mat>(x.data(), n, m);
}

// Composite Simpson rule with n (even) panels.
template <class F>
auto simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  auto sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum = sum + (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * (h / 3.0);
}

// Composite trapezoid rule with n panels.
template <class F>
double trapezoid(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) sum += f(a + i * h);
  return sum * h;
}

// Taylor series exponential with scaling and squaring.
inline Mat expm_taylor(const Mat& m) {
  int s = 0;
  double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.25) {
    nrm /= 2;
    ++s;
  }
  const Mat a = m / std::pow(2.0, s);
  Mat term = Mat::Identity(m.rows(), m.cols()), out = term;
  for (int k = 1; k < 30; ++k) {
    term = term * a / double(k);
    out += term;
  }
  for (int i = 0; i < s; ++i) out = out * out;
  return out;
}

// Central difference of a matrix map.
inline Mat central_difference(const std::function<Mat(const Mat&)>& f, const Mat& z,
                              const Mat& a, double h) {
  return (f(z + h * a) - f(z - h * a)) / (2.0 * h);
}

inline double rel(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-30);
}

}  // namespace oracle
