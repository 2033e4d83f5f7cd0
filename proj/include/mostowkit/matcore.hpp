#pragma once

#include <functional>

#include "mostowkit/types.hpp"

namespace mostowkit {

struct EigDecomposition {
  enum class Kind { hermitian, general };
  Vec values;
  Mat vectors;
  Kind kind = Kind::general;
};

struct MatrixClassReport {
  bool is_hermitian = false;
  bool is_positive_definite = false;
  bool is_unitary = false;
  bool is_real = false;
  bool is_symmetric = false;
  bool is_skew_symmetric = false;
  bool is_circular = false;
  double hermitian_residual = 0.0;
  double positive_definite_residual = 0.0;
  double unitary_residual = 0.0;
  double real_residual = 0.0;
  double symmetric_residual = 0.0;
  double skew_symmetric_residual = 0.0;
  double circular_residual = 0.0;
};

enum class DecayMode { quadrature, hermitian_part_bound, commuting_exact };

// Norms and conditioning.
double norm(const Mat& m, NormKind which);
double norm2(const Mat& m);  // spectral
double cond(const Mat& m);
RVec singular_values(const Mat& m);

// Structure helpers.
Mat hermitian_part(const Mat& m);
Mat skew_hermitian_part(const Mat& m);
Mat identity(Eigen::Index n);
void require_square(const Mat& m, const char* what);
bool is_hermitian(const Mat& m, double tol = tol::cls);
bool is_normal(const Mat& m, double tol = 1e-13);
MatrixClassReport classify(const Mat& m);

// Real structure projections, used after computations that are exact in
// exact arithmetic but leave rounding noise in the imaginary part.
RMat real_symmetric_part(const Mat& m);
RMat real_skew_part(const Mat& m);

EigDecomposition eig(const Mat& m);

// f(H) for Hermitian H through the symmetric eigensolver.
Mat hermitian_function(const Mat& h, const std::function<double(double)>& f);
// f(M) for normal M through the complex Schur form.
Mat normal_function(const Mat& m, const std::function<cplx(cplx)>& f);

Mat mexp(const Mat& m);
Mat mlog(const Mat& m, Branch branch = Branch::principal_branch());
cplx log_branch(cplx z, Branch branch);

Mat sqrt_pd(const Mat& p);
Mat inv_sqrt_pd(const Mat& p);
Mat pow_pd(const Mat& p, double exponent);
Mat sqrt_positive_spectrum(const Mat& m);

double decay_integral(const Mat& c, DecayMode mode = DecayMode::quadrature);

// Frechet derivative of the principal logarithm at a in direction x.
Mat dlog_apply(const Mat& a, const Mat& x);
// Same derivative for Hermitian positive definite a, by divided differences.
Mat dlog_pd(const Mat& a, const Mat& x);

}  // namespace mostowkit
