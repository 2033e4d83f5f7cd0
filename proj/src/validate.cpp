#include "mostowkit/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "mostowkit/bounds.hpp"
#include "mostowkit/decompose.hpp"
#include "mostowkit/matcore.hpp"

namespace mostowkit::validate {

Mat random_gaussian(Rng& rng, Eigen::Index n) {
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  }
  return m;
}

Mat random_unitary(Rng& rng, Eigen::Index n) {
  if (n == 0) return Mat(0, 0);
  const Mat g = random_gaussian(rng, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  // Fix the phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

Mat random_with_cond(Rng& rng, Eigen::Index n, double cond) {
  if (n == 0) return Mat(0, 0);
  RVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::exp(rng.uniform() * std::log(cond));
  s(0) = 1.0;
  if (n > 1) s(n - 1) = cond;
  const Mat u = random_unitary(rng, n);
  const Mat v = random_unitary(rng, n);
  return u * s.cast<cplx>().asDiagonal() * v;
}

Mat random_hermitian(Rng& rng, Eigen::Index n) {
  return hermitian_part(random_gaussian(rng, n));
}

Mat random_pd(Rng& rng, Eigen::Index n, double cond) {
  if (n == 0) return Mat(0, 0);
  RVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::exp(rng.uniform() * std::log(cond));
  const Mat u = random_unitary(rng, n);
  return hermitian_part(u * s.cast<cplx>().asDiagonal() * u.adjoint());
}

Mat random_direction(Rng& rng, Eigen::Index n, NormKind kind) {
  Mat a = random_gaussian(rng, n);
  const double s = norm(a, kind);
  return s > 0.0 ? Mat(a / s) : a;
}

std::vector<Mat> domain_basis(Eigen::Index n, Domain domain) {
  std::vector<Mat> basis;
  const cplx i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  auto unit = [n](Eigen::Index a, Eigen::Index b) {
    Mat e = Mat::Zero(n, n);
    e(a, b) = 1.0;
    return e;
  };
  switch (domain) {
    case Domain::complex:
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          basis.push_back(unit(a, b));
          basis.push_back(i * unit(a, b));
        }
      }
      break;
    case Domain::hermitian:
    case Domain::skew_hermitian: {
      const cplx phase = domain == Domain::hermitian ? cplx(1.0) : i;
      for (Eigen::Index a = 0; a < n; ++a) {
        basis.push_back(phase * unit(a, a));
        for (Eigen::Index b = a + 1; b < n; ++b) {
          basis.push_back(phase * r * (unit(a, b) + unit(b, a)));
          basis.push_back(phase * i * r * (unit(a, b) - unit(b, a)));
        }
      }
      break;
    }
  }
  return basis;
}

namespace {

RVec flatten(const Mat& m) {
  RVec v(2 * m.size());
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      v(k++) = m(a, b).real();
      v(k++) = m(a, b).imag();
    }
  }
  return v;
}

Mat sample_domain(Rng& rng, const std::vector<Mat>& basis, Eigen::Index n) {
  Mat x = Mat::Zero(n, n);
  for (const Mat& b : basis) x += rng.normal() * b;
  return x;
}

void check_linear(const LinearMap& map, const std::vector<Mat>& basis,
                  Eigen::Index n, Rng& rng) {
  for (int k = 0; k < 3; ++k) {
    const Mat x = sample_domain(rng, basis, n);
    const Mat y = sample_domain(rng, basis, n);
    const Mat fx = map(x);
    const Mat fy = map(y);
    const Mat fxy = map(x + y);
    const double scale = fx.norm() + fy.norm() + 1e-300;
    if ((fxy - fx - fy).norm() > 1e-8 * scale) {
      throw Error(ErrorCode::NotLinear, "estimate_opnorm: map is not linear");
    }
  }
}

RMat representation(const LinearMap& map, const std::vector<Mat>& basis) {
  if (basis.empty()) return RMat(0, 0);
  const RVec first = flatten(map(basis[0]));
  RMat m(first.size(), static_cast<Eigen::Index>(basis.size()));
  m.col(0) = first;
  for (std::size_t j = 1; j < basis.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) = flatten(map(basis[j]));
  }
  return m;
}

double top_singular(const RMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMat> svd(m);
  return svd.singularValues()(0);
}

Mat unit_spectral_sample(Rng& rng, const std::vector<Mat>& basis, Eigen::Index n) {
  Mat x = sample_domain(rng, basis, n);
  const double s = norm2(x);
  return s > 0.0 ? Mat(x / s) : x;
}

}  // namespace

OpNormEstimate estimate_opnorm(const LinearMap& map, Eigen::Index n,
                               Domain domain, NormKind kind, int trials,
                               std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<Mat> basis = domain_basis(n, domain);
  check_linear(map, basis, n, rng);
  OpNormEstimate out;
  out.norm_kind = kind;
  const double frob = top_singular(representation(map, basis));
  if (kind == NormKind::frobenius) {
    out.value = frob;
    out.upper = frob;
    out.exact = true;
    return out;
  }
  // |||T(X)|||_2 <= |||T(X)|||_F <= |||T|||_F |||X|||_F <= sqrt(n) |||T|||_F |||X|||_2
  out.upper = std::sqrt(double(n)) * frob;
  for (int k = 0; k < trials; ++k) {
    out.value = std::max(out.value, norm2(map(unit_spectral_sample(rng, basis, n))));
  }
  return out;
}

OpNormEstimate estimate_opnorm_pair(const PairMap& map, Eigen::Index n,
                                    Domain domain, NormKind kind, int trials,
                                    std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<Mat> basis = domain_basis(n, domain);
  const Mat zero = Mat::Zero(n, n);
  const LinearMap first = [&](const Mat& x) { return map(x, zero); };
  const LinearMap second = [&](const Mat& y) { return map(zero, y); };
  check_linear(first, basis, n, rng);
  check_linear(second, basis, n, rng);
  for (int k = 0; k < 3; ++k) {
    const Mat x = sample_domain(rng, basis, n);
    const Mat y = sample_domain(rng, basis, n);
    const Mat both = map(x, y);
    const Mat split = map(x, zero) + map(zero, y);
    if ((both - split).norm() > 1e-8 * (split.norm() + 1e-300)) {
      throw Error(ErrorCode::NotLinear, "estimate_opnorm_pair: map is not linear");
    }
  }
  OpNormEstimate out;
  out.norm_kind = kind;
  const RMat m1 = representation(first, basis);
  const RMat m2 = representation(second, basis);
  if (kind == NormKind::spectral) {
    out.upper = std::sqrt(double(n)) * (top_singular(m1) + top_singular(m2));
    for (int k = 0; k < trials; ++k) {
      const Mat x = unit_spectral_sample(rng, basis, n);
      const Mat y = unit_spectral_sample(rng, basis, n);
      out.value = std::max(out.value, norm2(map(x, y)));
    }
    return out;
  }
  out.upper = top_singular(m1) + top_singular(m2);
  if (m1.size() == 0) return out;
  // Maximizing a convex function over a product of spheres: the linearized
  // step x <- normalize(M1^T r) never decreases |r|, so this ascent gives a
  // monotone lower bound. Several starts guard against poor local maxima.
  const Eigen::Index d = m1.cols();
  auto ascend = [&](RVec x, RVec y) {
    double val = 0.0;
    for (int it = 0; it < 500; ++it) {
      RVec r = m1 * x + m2 * y;
      RVec gx = m1.transpose() * r;
      if (gx.norm() > 0) x = gx.normalized();
      r = m1 * x + m2 * y;
      RVec gy = m2.transpose() * r;
      if (gy.norm() > 0) y = gy.normalized();
      const double nv = (m1 * x + m2 * y).norm();
      if (nv <= val * (1.0 + 1e-15)) {
        val = std::max(val, nv);
        break;
      }
      val = nv;
    }
    return val;
  };
  RMat joint(m1.rows(), 2 * d);
  joint << m1, m2;
  Eigen::JacobiSVD<RMat> svd(joint, Eigen::ComputeThinV);
  const RVec v = svd.matrixV().col(0);
  RVec x0 = v.head(d), y0 = v.tail(d);
  if (x0.norm() == 0) x0 = RVec::Unit(d, 0);
  if (y0.norm() == 0) y0 = RVec::Unit(d, 0);
  out.value = ascend(x0.normalized(), y0.normalized());
  const int starts = std::max(1, std::min(trials, 16));
  for (int k = 0; k < starts; ++k) {
    RVec x(d), y(d);
    for (Eigen::Index j = 0; j < d; ++j) x(j) = rng.normal();
    for (Eigen::Index j = 0; j < d; ++j) y(j) = rng.normal();
    out.value = std::max(out.value, ascend(x.normalized(), y.normalized()));
  }
  return out;
}

double fd_check(const LinearMap& map, const Mat& z, const Mat& a,
                const Mat& analytic, double h) {
  Mat plus, minus;
  try {
    plus = map(z + h * a);
    minus = map(z - h * a);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MapUndefined, std::string("fd_check: ") + e.what());
  }
  const Mat fd = (plus - minus) / (2.0 * h);
  return (fd - analytic).norm() / std::max(analytic.norm(), 1e-30);
}

const char* factor_name(int f) {
  static const char* names[kFactorCount] = {"W", "P1", "P2", "L", "T", "K", "S"};
  return (f >= 0 && f < kFactorCount) ? names[f] : "?";
}

namespace {

std::array<Mat, kFactorCount> factor_list(const decompose::BipolarFactors& b) {
  return {b.mostow.W,
          b.mostow.P1,
          b.mostow.P2.cast<cplx>(),
          b.L.cast<cplx>(),
          b.T.cast<cplx>(),
          b.K.cast<cplx>(),
          b.S.cast<cplx>()};
}

}  // namespace

std::array<Mat, kFactorCount> factor_derivatives(
    const decompose::BipolarFactors& f, const Mat& a) {
  const decompose::MostowTangent mt = decompose::d_mostow(f.mostow, a);
  const decompose::SplitTangent st = decompose::d_unitary_split(f.split, mt.X);
  std::array<Mat, kFactorCount> d;
  d[kW] = mt.DW;
  d[kP1] = mt.DP1;
  d[kP2] = mt.DP2;
  d[kL] = dlog_apply(f.split.W1.cast<cplx>(), st.DW1);
  // W2 = exp(iT): divide by the divided differences of exp(i.) in the
  // eigenbasis of T. They vanish only when two eigenvalues differ by 2 pi.
  const Eigen::Index n = f.T.rows();
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<RMat> es(f.T);
    const RVec& tau = es.eigenvalues();
    const Mat v = es.eigenvectors().cast<cplx>();
    Mat g = v.transpose() * st.DW2 * v;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const double dt = tau(j) - tau(k);
        const double sinc = dt == 0.0 ? 1.0 : std::sin(0.5 * dt) / (0.5 * dt);
        const cplx dd = cplx(0.0, 1.0) * std::polar(sinc, 0.5 * (tau(j) + tau(k)));
        g(j, k) /= dd;
      }
    }
    d[kT] = v * g * v.transpose();
  } else {
    d[kT] = Mat(0, 0);
  }
  d[kK] = cplx(0.0, -1.0) * dlog_pd(f.mostow.P1, mt.DP1);
  d[kS] = dlog_pd(f.mostow.P2.cast<cplx>(), mt.DP2);
  return d;
}

PerturbationTrial run_trial(const Mat& z, std::uint64_t seed, NormKind kind,
                            const TrialOptions& opts) {
  PerturbationTrial trial;
  trial.Z = z;
  trial.seed = seed;
  trial.norm_kind = kind;
  const decompose::BipolarFactors base = decompose::bipolar(z);
  trial.branch_alpha = base.alpha.cut();
  const bounds::MostowBoundReport mb = bounds::mostow_bounds(z, base.mostow, kind);
  const bounds::BipolarBoundReport bb = bounds::bipolar_bounds(z, base, kind);
  trial.bound = {mb.b_W, mb.b_P1, mb.b_P2, bb.b_L, bb.b_T, bb.b_K, bb.b_S};

  Rng rng(seed);
  trial.A = random_direction(rng, z.rows(), kind);
  const double a_norm = norm(trial.A, kind);
  const auto f0 = factor_list(base);

  std::vector<double> eps = opts.epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  for (double e : eps) {
    EpsilonRecord rec;
    rec.eps = e;
    try {
      const decompose::BipolarFactors p =
          decompose::bipolar_with_sheet(z + e * trial.A, base.alpha);
      const auto f1 = factor_list(p);
      for (int k = 0; k < kFactorCount; ++k) {
        rec.drift[k] = norm(Mat(f1[k] - f0[k]), kind);
        rec.ratio[k] = rec.drift[k] / (trial.bound[k] * e * a_norm);
      }
    } catch (const Error& err) {
      rec.skipped = true;
      rec.reason = std::string(to_string(err.code())) + ": " + err.what();
    }
    trial.records.push_back(rec);
  }
  trial.passed = false;
  for (auto it = trial.records.rbegin(); it != trial.records.rend(); ++it) {
    if (it->skipped) continue;
    trial.worst_eps = it->eps;
    trial.worst_ratio = 0.0;
    for (int k = 0; k < kFactorCount; ++k) {
      if (it->ratio[k] > trial.worst_ratio) {
        trial.worst_ratio = it->ratio[k];
        trial.worst_factor = k;
      }
    }
    trial.passed = trial.worst_ratio <= 1.0 + opts.slack;
    break;
  }
  return trial;
}

std::vector<PerturbationTrial> run_trials(const Mat& z, std::uint64_t seed,
                                          int count, NormKind kind,
                                          const TrialOptions& opts) {
  std::vector<PerturbationTrial> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = run_trial(z, derive_seed(seed, i), kind, opts);
  });
  return out;
}

Mat zn_matrix(int n, double t) {
  Mat z = Mat::Zero(2, 2);
  z(0, 0) = std::exp(std::sin(t));
  z(1, 1) = std::exp(std::sin(t + kPi / n));
  return z;
}

SweepRow zn_closed_form(int n, double t) {
  const double a = std::sin(t);
  const double b = std::sin(t + kPi / n);
  const double neg = std::max(std::exp(-a), std::exp(-b));
  const double pos = std::max(std::exp(a), std::exp(b));
  const double c = neg * pos;
  const double k = 0.5 * c * (1.0 + std::pow(c, 4));
  SweepRow r;
  r.n = n;
  r.t = t;
  r.f_closed = 0.5 * neg * neg * pos *
               (1.0 + std::pow(neg, 4) * std::pow(pos, 4));
  r.g_closed = 0.5 * neg * (1.0 + k);
  return r;
}

std::vector<SweepRow> zn_sweep(int n, const std::vector<double>& t_grid) {
  std::vector<SweepRow> rows(t_grid.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double t = t_grid[i];
    SweepRow r = zn_closed_form(n, t);
    const Mat z = zn_matrix(n, t);
    const decompose::MostowFactors f = decompose::mostow(z);
    const Mat ems = hermitian_function(Mat(-f.S.cast<cplx>()),
                                       [](double x) { return std::exp(x); });
    const double e = norm2(ems);
    const double k = bounds::k_of_Z(z);
    r.f_n = e * k;
    r.g_n = 0.5 * e * (1.0 + k);
    rows[i] = r;
  });
  return rows;
}

std::vector<double> linspace(double a, double b, int steps) {
  std::vector<double> out;
  if (steps <= 0) return out;
  if (steps == 1) return {a};
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out.push_back(a + (b - a) * double(i) / double(steps - 1));
  }
  return out;
}

int thread_count() {
  if (const char* env = std::getenv("MOSTOWKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mostowkit::validate
