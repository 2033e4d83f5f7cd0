#include <algorithm>
#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "mostowkit/bounds.hpp"

namespace mostowkit::bounds {

namespace {

constexpr int kGridLog2 = 16;
constexpr long kTailTerms = 1L << 22;

struct Kink {
  double at;
  cplx jump;
};

// Continuous 2pi-periodic function equal to 1/(1 + e^{i theta}) on
// [-delta, delta] and linear in theta on the rest of the circle.
cplx f_piecewise(double th, double delta) {
  const double t = std::tan(delta / 2.0);
  const cplx i(0.0, 1.0);
  if (th <= -delta) return 0.5 + i * t / (2.0 * (kPi - delta)) * (th + kPi);
  if (th <= delta) return 0.5 - 0.5 * i * std::tan(th / 2.0);
  return 0.5 + 0.5 * i * t * (-1.0 + (th - delta) / (kPi - delta));
}

double wrap(double x) {
  double y = std::fmod(x + kPi, 2.0 * kPi);
  if (y < 0) y += 2.0 * kPi;
  return y - kPi;
}

// Periodic quadratic with Fourier coefficients 1/n^2 (n != 0) and 0 at n = 0.
double bernoulli_kernel(double x) {
  const double ax = std::abs(x);
  return kPi * kPi / 3.0 - kPi * ax + 0.5 * x * x;
}

cplx kink_part(double th, const Kink (&kinks)[2]) {
  cplx s = 0.0;
  for (const Kink& k : kinks) {
    s -= k.jump / (2.0 * kPi) * bernoulli_kernel(wrap(th - k.at));
  }
  return s;
}

cplx kink_coefficient(long n, const Kink (&kinks)[2]) {
  if (n == 0) return 0.0;
  cplx s = 0.0;
  for (const Kink& k : kinks) {
    s += k.jump * std::polar(1.0, -double(n) * k.at);
  }
  return -s / (2.0 * kPi * double(n) * double(n));
}

}  // namespace

double analytic_cap(double delta) {
  const double t = std::tan(delta / 2.0);
  return 1.0 + kPi / std::sqrt(3.0) *
                   std::sqrt(2.0 * t * t / (kPi - delta) + t * t / 3.0 + t);
}

cplx FourierSequence::coefficient(int n) const {
  if (std::abs(n) <= n_trunc) return a[static_cast<std::size_t>(n + n_trunc)];
  // Beyond the stored range only the kink part survives.
  const Kink kinks[2] = {{delta, jump}, {-delta, -jump}};
  const cplx b = kink_coefficient(n, kinks);
  return (n % 2 == 0) ? b : -b;
}

cplx FourierSequence::evaluate(double theta) const {
  const Kink kinks[2] = {{delta, jump}, {-delta, -jump}};
  cplx s = kink_part(theta, kinks);
  // Remainder series by rotation, re-anchored periodically against drift.
  const cplx step = std::polar(1.0, theta);
  cplx e = std::polar(1.0, -double(n_trunc) * theta);
  for (int n = -n_trunc; n <= n_trunc; ++n) {
    if ((n + n_trunc) % 512 == 0) e = std::polar(1.0, double(n) * theta);
    s += remainder[static_cast<std::size_t>(n + n_trunc)] * e;
    e *= step;
  }
  return s;
}

FourierSequence fourier_an(double delta, double tol) {
  if (!std::isfinite(delta) || !(delta > 0.0) || !(delta < kPi - tol::angle)) {
    throw Error(ErrorCode::DeltaOutOfRange, "fourier_an: delta must lie in (0, pi)");
  }
  FourierSequence out;
  out.delta = delta;
  const double t = std::tan(delta / 2.0);
  const double sec2 = 1.0 + t * t;
  out.jump = cplx(0.0, t / (2.0 * (kPi - delta)) + sec2 / 4.0);
  const Kink kinks[2] = {{delta, out.jump}, {-delta, -out.jump}};
  out.analytic_cap = analytic_cap(delta);
  const double fprime_sq =
      t * t / (2.0 * (kPi - delta)) + t * t * t / 12.0 + t / 4.0;
  out.fprime_l2 = std::sqrt(fprime_sq / (2.0 * kPi));

  // The kink part carries the 1/n^2 decay exactly; the remainder is smooth
  // enough for its coefficients to come from a plain FFT.
  const long m = 1L << kGridLog2;
  std::vector<cplx> grid(static_cast<std::size_t>(m));
  for (long j = 0; j < m; ++j) {
    const double th = -kPi + 2.0 * kPi * double(j) / double(m);
    grid[static_cast<std::size_t>(j)] = f_piecewise(th, delta) - kink_part(th, kinks);
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, grid);

  const int n_trunc = static_cast<int>(m / 2 - 1);
  out.n_trunc = n_trunc;
  out.a.resize(static_cast<std::size_t>(2 * n_trunc + 1));
  out.remainder.resize(out.a.size());
  double head = 0.0;
  double remainder_edge = 0.0;
  for (int n = -n_trunc; n <= n_trunc; ++n) {
    const long idx = ((n % m) + m) % m;
    // The grid starts at -pi, hence the e^{in pi} phase.
    const cplx rn = spec[static_cast<std::size_t>(idx)] / double(m) *
                    ((n % 2 == 0) ? 1.0 : -1.0);
    const cplx bn = rn + kink_coefficient(n, kinks);
    out.a[static_cast<std::size_t>(n + n_trunc)] = (n % 2 == 0) ? bn : -bn;
    out.remainder[static_cast<std::size_t>(n + n_trunc)] = rn;
    head += std::abs(bn);
    if (std::abs(n) > n_trunc - 16) remainder_edge = std::max(remainder_edge, std::abs(rn));
  }

  // Tail: the kink coefficients are known exactly; sum them far out and bound
  // the rest by 2|J| / (pi N). The remainder decays like n^{-3}.
  const double jabs = std::abs(out.jump);
  double tail = 0.0;
  for (long k = n_trunc + 1; k <= kTailTerms; ++k) {
    const double kd = double(k);
    tail += std::abs(std::sin(kd * delta)) / (kd * kd);
  }
  tail = 2.0 * jabs / kPi * tail + 2.0 * jabs / (kPi * double(kTailTerms));
  tail += 2.0 * double(n_trunc) * remainder_edge;
  out.tail_estimate = tail;
  out.double_l1_sum = 2.0 * (head + tail);

  double worst = 0.0;
  for (int j = 1; j <= 64; ++j) {
    const double th = -delta + 2.0 * delta * double(j) / 65.0;
    const cplx target = 1.0 / (1.0 + std::polar(1.0, th));
    worst = std::max(worst, std::abs(out.evaluate(th) - target));
  }
  out.reproduction_error = worst;
  if (!(worst <= tol)) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "fourier_an: series does not reach the requested tolerance");
  }
  return out;
}

}  // namespace mostowkit::bounds
