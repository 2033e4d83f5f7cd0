#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over a list of panels.
// Works for scalar and Eigen-matrix valued integrands.

#include <algorithm>
#include <cmath>
#include <queue>
#include <type_traits>
#include <vector>

namespace mostowkit::quad {

namespace detail {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes xgk[1], xgk[3], xgk[5], xgk[7].
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
template <class M>
double magnitude(const M& m) {
  return m.norm();
}

}  // namespace detail

template <class T>
struct Result {
  T value;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
auto gk15(F& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T kron = fc * detail::wgk[7];
  T gauss = fc * detail::wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * detail::xgk[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    T s = f1 + f2;
    kron = kron + s * detail::wgk[j];
    if (j % 2 == 1) gauss = gauss + s * detail::wg[j / 2];
  }
  kron = kron * h;
  gauss = gauss * h;
  const double err = detail::magnitude(T(kron - gauss));
  return Panel<T>{a, b, kron, err};
}

// Integrates f over [breaks.front(), breaks.back()] splitting the panel with
// the largest error estimate until the total estimate is below
// max(abs_tol, rel_tol * |I|) or max_panels is reached.
template <class F>
auto integrate(F&& f, const std::vector<double>& breaks, double abs_tol,
               double rel_tol, int max_panels = 4000) {
  using T = std::decay_t<decltype(f(breaks.front()))>;
  std::priority_queue<Panel<T>> heap;
  Result<T> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    heap.push(gk15(f, breaks[i], breaks[i + 1]));
    out.evaluations += 15;
  }
  if (heap.empty()) {
    T z = f(breaks.front());
    out.value = z * 0.0;
    return out;
  }
  T value = heap.top().value * 0.0;
  double error = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      value = value + copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
  }
  int panels = static_cast<int>(heap.size());
  while (error > std::max(abs_tol, rel_tol * detail::magnitude(value))) {
    if (panels >= max_panels) {
      out.converged = false;
      break;
    }
    Panel<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    Panel<T> left = gk15(f, worst.a, mid);
    Panel<T> right = gk15(f, mid, worst.b);
    value = value + (left.value + right.value - worst.value);
    error = std::max(0.0, error + left.error + right.error - worst.error);
    heap.push(std::move(left));
    heap.push(std::move(right));
    out.evaluations += 30;
    ++panels;
  }
  // Final sum from scratch to shed the drift of the running update.
  value = heap.top().value * 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value = value + heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
               int max_panels = 4000) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, abs_tol,
                   rel_tol, max_panels);
}

}  // namespace mostowkit::quad
