#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mostowkit/decompose.hpp"
#include "mostowkit/rng.hpp"
#include "mostowkit/types.hpp"

namespace mostowkit::validate {

// Random test matrices.
Mat random_gaussian(Rng& rng, Eigen::Index n);
Mat random_unitary(Rng& rng, Eigen::Index n);
// U diag(s) V with log-uniform singular values spanning [1, cond].
Mat random_with_cond(Rng& rng, Eigen::Index n, double cond);
Mat random_hermitian(Rng& rng, Eigen::Index n);
Mat random_pd(Rng& rng, Eigen::Index n, double cond);
// Complex Gaussian direction normalized to unit norm of the given kind.
Mat random_direction(Rng& rng, Eigen::Index n, NormKind kind);

enum class Domain { complex, hermitian, skew_hermitian };

using LinearMap = std::function<Mat(const Mat&)>;
using PairMap = std::function<Mat(const Mat&, const Mat&)>;

struct OpNormEstimate {
  double value = 0.0;  // exact for frobenius single maps, else a lower bound
  bool exact = false;
  double upper = 0.0;  // an upper bound when one is cheaply available
  NormKind norm_kind = NormKind::frobenius;
};

// Orthonormal basis (real Frobenius inner product) of the domain.
std::vector<Mat> domain_basis(Eigen::Index n, Domain domain);

OpNormEstimate estimate_opnorm(const LinearMap& map, Eigen::Index n,
                               Domain domain, NormKind kind, int trials,
                               std::uint64_t seed);
// Norm of (X, Y) -> map(X, Y) with |||(X, Y)||| = max(|||X|||, |||Y|||).
OpNormEstimate estimate_opnorm_pair(const PairMap& map, Eigen::Index n,
                                    Domain domain, NormKind kind, int trials,
                                    std::uint64_t seed);

double fd_check(const LinearMap& map, const Mat& z, const Mat& a,
                const Mat& analytic, double h = 1e-5);

enum Factor { kW, kP1, kP2, kL, kT, kK, kS, kFactorCount };
const char* factor_name(int f);

// Directional derivatives of W, P1, P2, L, T, K, S at the factors f in
// direction A, indexed by Factor.
std::array<Mat, kFactorCount> factor_derivatives(
    const decompose::BipolarFactors& f, const Mat& a);

struct EpsilonRecord {
  double eps = 0.0;
  bool skipped = false;
  std::string reason;
  std::array<double, kFactorCount> drift{};
  std::array<double, kFactorCount> ratio{};
};

struct TrialOptions {
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4, 1e-5};
  double slack = 0.05;
};

struct PerturbationTrial {
  Mat Z;
  Mat A;
  std::uint64_t seed = 0;
  NormKind norm_kind = NormKind::frobenius;
  double branch_alpha = -kPi;
  std::array<double, kFactorCount> bound{};
  std::vector<EpsilonRecord> records;
  bool passed = false;
  double worst_ratio = 0.0;  // over factors at the smallest surviving eps
  int worst_factor = -1;
  double worst_eps = 0.0;
};

PerturbationTrial run_trial(const Mat& z, std::uint64_t seed, NormKind kind,
                            const TrialOptions& opts = {});
// Trials i = 0..count-1 use derive_seed(seed, i); runs in parallel.
std::vector<PerturbationTrial> run_trials(const Mat& z, std::uint64_t seed,
                                          int count, NormKind kind,
                                          const TrialOptions& opts = {});

struct SweepRow {
  int n = 0;
  double t = 0.0;
  double f_n = 0.0;
  double g_n = 0.0;
  double f_closed = 0.0;
  double g_closed = 0.0;
};

Mat zn_matrix(int n, double t);
SweepRow zn_closed_form(int n, double t);
std::vector<SweepRow> zn_sweep(int n, const std::vector<double>& t_grid);
std::vector<double> linspace(double a, double b, int steps);

// Worker count: MOSTOWKIT_THREADS when set, else hardware concurrency.
int thread_count();
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace mostowkit::validate
