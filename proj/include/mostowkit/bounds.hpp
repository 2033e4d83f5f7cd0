#pragma once

#include <optional>
#include <vector>

#include "mostowkit/decompose.hpp"
#include "mostowkit/types.hpp"

namespace mostowkit::bounds {

// Sequence {a_n} with sum_n (-1)^n a_n e^{in theta} = 1/(1 + e^{i theta}) on
// (-delta, delta), built from the Fourier coefficients b_n of a continuous
// 2pi-periodic extension f.
struct FourierSequence {
  double delta = 0.0;
  int n_trunc = 0;
  std::vector<cplx> a;  // a[n + n_trunc] = a_n for |n| <= n_trunc
  double double_l1_sum = 0.0;  // 2 (sum |a_n| + tail_estimate)
  double tail_estimate = 0.0;
  double analytic_cap = 0.0;
  double fprime_l2 = 0.0;  // ||f'|| with the 1/(2pi) normalized inner product
  cplx jump = 0.0;         // jump of f' at +delta (and minus it at -delta)
  std::vector<cplx> remainder;  // b_n minus the kink coefficient, |n| <= n_trunc
  double reproduction_error = 0.0;  // max error on 64 points of (-delta, delta)

  cplx coefficient(int n) const;
  // sum_n b_n e^{in theta}: closed form of the kink part plus the smooth
  // remainder series.
  cplx evaluate(double theta) const;
};

struct MostowBoundReport {
  double beta = 0.0;
  double k = 0.0;
  double condZ = 0.0;
  double b_W = 0.0, b_P1 = 0.0, b_P2 = 0.0;
  double b_P2_gram = 0.0;
  double b_P1_alt = 0.0;
  NormKind norm_kind = NormKind::spectral;
};

struct BipolarBoundReport {
  double k = 0.0;
  double C_eL = 0.0, C_eiT = 0.0, C_WtW = 0.0;
  FourierSequence fourier;
  double b_L = 0.0, b_T = 0.0, b_K = 0.0, b_S = 0.0;
  double b_L_direct = 0.0, b_T_direct = 0.0;
  std::optional<double> polar_comparison;
  NormKind norm_kind = NormKind::spectral;
  Branch alpha;
};

double beta(const Mat& z);
double k_of_Z(const Mat& z);
double c_of_W(const Mat& w);

MostowBoundReport mostow_bounds(const Mat& z, NormKind norm_kind);
MostowBoundReport mostow_bounds(const Mat& z, const decompose::MostowFactors& f,
                                NormKind norm_kind);

double analytic_cap(double delta);
FourierSequence fourier_an(double delta, double tol = tol::fourier);

struct DeltaPolicy {
  bool automatic = true;
  double delta = 0.0;
};

struct SplitBound {
  FourierSequence fourier;
  double bound = 0.0;
};

SplitBound unitary_split_bound(const Mat& w, DeltaPolicy policy = {});
SplitBound unitary_split_bound(const decompose::UnitarySplit& split,
                               DeltaPolicy policy = {});

double polar_comparison_bound(const Mat& w2);

BipolarBoundReport bipolar_bounds(const Mat& z, NormKind norm_kind);
BipolarBoundReport bipolar_bounds(const Mat& z, const decompose::BipolarFactors& f,
                                  NormKind norm_kind);

}  // namespace mostowkit::bounds
