#pragma once

#include "mostowkit/types.hpp"

namespace mostowkit::sylvester {

// A X + X B = R.
struct Problem {
  Mat A;
  Mat B;
  Mat R;
};

// Spectral solve with one step of iterative refinement.
Mat solve(const Problem& p);
Mat solve(const Mat& a, const Mat& b, const Mat& r);

// Quadrature of int_0^inf exp(-tA) R exp(-tB) dt; spectra of A and B must lie
// in the open right half plane.
Mat integral_solution(const Problem& p);

}  // namespace mostowkit::sylvester
