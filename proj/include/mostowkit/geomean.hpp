#pragma once

#include "mostowkit/types.hpp"

namespace mostowkit::geomean {

struct GeoMeanDerivative {
  Mat C;  // (A^{-1} B)^{1/2}, the root with positive spectrum
  Mat D;  // derivative of A # B in direction (X, Y)
  Mat A, B, X, Y;
};

enum class BoundVariant { general, commuting_pi4, commuting_half };

// A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}.
Mat gm(const Mat& a, const Mat& b);

// (A^{-1} B)^{1/2} through the similarity A^{-1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}.
Mat positive_root(const Mat& a, const Mat& b);

// Solves C^* D + D C = Y + C^* X C for D.
Mat derivative_from_root(const Mat& c, const Mat& x, const Mat& y);

GeoMeanDerivative dgm(const Mat& a, const Mat& b, const Mat& x, const Mat& y);

double dgm_bound(const Mat& a, const Mat& b, BoundVariant variant);

// Spectral norm of dgm(A, B, I, I).D.
double dgm_opnorm_identity_value(const Mat& a, const Mat& b);

}  // namespace mostowkit::geomean
