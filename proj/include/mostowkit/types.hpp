#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mostowkit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

enum class NormKind { spectral, frobenius };

std::string_view to_string(NormKind k);
NormKind norm_kind_from_string(std::string_view s);

// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double eig = 1e-12;
inline constexpr double fun = 1e-12;
inline constexpr double cls = 1e-10;
inline constexpr double sing = 1e-13;
inline constexpr double quad = 1e-9;
inline constexpr double sep = 1e-10;
inline constexpr double syl = 1e-9;
inline constexpr double dec = 1e-9;
inline constexpr double cond_cap = 1e8;
inline constexpr double margin_delta = 1e-3;
inline constexpr double fourier = 1e-6;
inline constexpr double angle = 1e-6;
}  // namespace tol

// A branch of the logarithm: arguments are taken in [alpha, alpha + 2*pi).
// The principal branch is alpha = -pi.
struct Branch {
  bool principal = true;
  double alpha = -kPi;

  static Branch principal_branch() { return {}; }
  static Branch at(double a);

  // Cut angle, -pi for the principal branch.
  double cut() const { return principal ? -kPi : alpha; }
};

enum class ErrorCode {
  Singular,
  IllConditioned,
  BranchCut,
  NotPositiveDefinite,
  SpectrumNotPositive,
  DivergentIntegral,
  ModeInapplicable,
  SegmentSingular,
  SpectraOverlap,
  NotDiagonalizable,
  NotCommuting,
  EigenvalueOnCut,
  BranchExhausted,
  DeltaOutOfRange,
  SpreadTooWide,
  Hypothesis,
  NotLinear,
  MapUndefined,
  NotSquare,
  NotUnitary,
  Parse,
};

std::string_view to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mostowkit
