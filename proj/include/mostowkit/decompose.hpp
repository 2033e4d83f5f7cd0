#pragma once

#include "mostowkit/types.hpp"

namespace mostowkit::decompose {

// Z = W e^{iK} e^{S}.
struct MostowFactors {
  Mat W;   // unitary
  RMat K;  // real skew-symmetric
  RMat S;  // real symmetric
  Mat P1;  // e^{iK}, circular positive definite
  RMat P2; // e^{S}, real positive definite
  Branch alpha;  // the logs of P1 and P2 are always principal
};

// W = W1 W2 = e^{L} e^{iT}.
struct UnitarySplit {
  RMat W1;  // real orthogonal
  Mat W2;   // symmetric unitary
  Mat L;    // log of W1 on log_branch (real skew when a real log exists)
  RMat T;   // real symmetric, iT = log(W^T W) / 2 on sheet
  Branch sheet;       // branch used for log(W^T W)
  Branch log_branch;  // branch used for log(W1)
};

struct BipolarFactors {
  RMat L, T, K, S;
  Branch alpha;  // sheet of the unitary split; log(W1) is principal
  MostowFactors mostow;
  UnitarySplit split;
};

struct MostowTangent {
  Mat DW, DP1, DP2;
  Mat X;   // skew-Hermitian
  Mat Y1;  // real skew-symmetric
  Mat Y2;  // real symmetric
};

struct SplitTangent {
  Mat DW1, DW2;
  Mat X;  // real skew-symmetric
  Mat Y;  // i * real symmetric
  Mat S_dir;
};

MostowFactors mostow(const Mat& z);

// Tangent of the Mostow factors at (W, P1, P2) in direction A, using the
// factors to form the root C = P2^{-1} P1^{-2} P2 of (Z^*Z)^{-1} conj(Z^*Z).
MostowTangent mostow_tangent(const Mat& w, const Mat& p1, const Mat& p2,
                             const Mat& a);
MostowTangent d_mostow(const Mat& z, const Mat& a);
MostowTangent d_mostow(const MostowFactors& f, const Mat& a);

// Uses the same branch for log(W^T W) and log(W1).
UnitarySplit unitary_split(const Mat& w, Branch alpha = Branch::principal_branch());
UnitarySplit unitary_split(const Mat& w, Branch sheet, Branch log_branch);

// Picks a sheet for log(W^T W) so that log(W1) is real (principal preferred);
// falls back to a common cut in [-pi, 0) clear of the spectra when no real
// logarithm exists.
UnitarySplit unitary_split_auto(const Mat& w);

// Returns false when no sheet yields real L and T.
bool real_split_search(const Mat& w, UnitarySplit& out);

struct BipolarOptions {
  bool automatic = true;
  Branch sheet;  // used when automatic is false
};

BipolarFactors bipolar(const Mat& z, BipolarOptions opts = {});
BipolarFactors bipolar_with_sheet(const Mat& z, Branch sheet);

SplitTangent d_unitary_split(const UnitarySplit& split, const Mat& s_dir);
SplitTangent d_unitary_split(const Mat& w, const Mat& s_dir);

// Real structure residual of a split: max of |Im L|, |L + L^T|, |Im T|.
double split_structure_residual(const UnitarySplit& s);

}  // namespace mostowkit::decompose
