#pragma once

// Monte Carlo harness for H = A + U B U* with A, B diagonal and U Haar
// distributed on U(n) or O(n).
//
// Every trial draws its randomness from a stream derived from
// (seed, trial_index, stream id) only, so results do not depend on how
// trials are scheduled across threads.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "freeconv/convolution.hpp"
#include "freeconv/measures.hpp"

namespace freeconv::rmt {

enum class Group { unitary, orthogonal };

struct EnsembleConfig {
  int n = 500;
  Group group = Group::unitary;
  Measure spec_a = point_mass(0.0);
  Measure spec_b = point_mass(0.0);
  std::uint64_t seed = 0;
  int trials = 20;
  /// Subtract tr A and tr B before building H; eigenvalues are shifted back.
  bool center = true;
  /// Replace A by V A V* with an independent Haar V (same law for traces).
  bool rotate_a = false;
  /// Worker threads; 0 picks the hardware count. FREECONV_THREADS caps it.
  int threads = 0;

  void validate() const;
};

using Rng = std::mt19937_64;

/// Stream for (seed, trial, stream); stream 0 draws U, stream 1 draws V.
Rng make_stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream);

/// Ginibre QR with the phase correction Q <- Q diag(r_kk / |r_kk|).
Eigen::MatrixXcd haar_unitary(int n, Rng& rng);
Eigen::MatrixXd haar_orthogonal(int n, Rng& rng);
Eigen::MatrixXcd haar_sample(int n, Group group, Rng& rng);

/// n diagonal entries at the quantile midpoints of spec.
std::vector<double> diagonal_entries(const Measure& spec, int n);

struct TrialResult {
  std::vector<double> eigenvalues;  // ascending, original (uncentered) coordinates
  /// (V* A V)_ii and (V* U B U* V)_ii in the eigenbasis V of H; filled only
  /// when overlaps were requested.
  std::vector<double> overlap_a;
  std::vector<double> overlap_b;
  double shift = 0.0;  // tr A + tr B removed before diagonalising
};

TrialResult sample_trial(const EnsembleConfig& cfg, int trial_index, bool with_overlaps = false);
std::vector<TrialResult> sample_trials(const EnsembleConfig& cfg, bool with_overlaps = false);

/// m_H(z) = (1/n) sum 1 / (lambda_i - z).
Complex m_H(const TrialResult& trial, Complex z);

enum class QKind { identity, matrix_a, matrix_b };
/// f_Q(z) = tr Q G_H(z) for the three supported Q.
Complex f_Q(const TrialResult& trial, QKind q, Complex z);

/// |(1/n) sum |lambda_i - z|^-2 - Im m_H(z) / Im z|.
double ward_gap(const TrialResult& trial, Complex z);

/// Fraction of eigenvalues in [E1, E2).
std::size_t count_in(const TrialResult& trial, double E1, double E2);

struct LocalLawRow {
  double E;
  double eta;
  int n;
  double median_err;
  double max_err;
  double envelope;   // 1 / (n eta^{3/2})
  double fluct_std;  // sample std of m_H across trials
};

struct LocalLawReport {
  std::vector<LocalLawRow> rows;
  double shift = 0.0;
};

LocalLawReport local_law_experiment(const EnsembleConfig& cfg, std::span<const double> E_list,
                                    std::span<const double> eta_list);
LocalLawReport local_law_from_trials(const EnsembleConfig& cfg, const std::vector<TrialResult>& trials,
                                     std::span<const double> E_list, std::span<const double> eta_list);

struct CountingReport {
  double E1 = 0.0;
  double E2 = 0.0;
  double reference_mass = 0.0;
  std::vector<std::size_t> counts;
  std::vector<double> errors;  // |count / n - reference_mass|
  double envelope = 0.0;       // n^{-2/3}
  int n = 0;
};

/// Reference mass of [E1, E2) under mu1 [+] mu2: trapezoid over the density
/// grid plus atoms inside the interval.
double reference_mass(const Measure& mu1, const Measure& mu2, double E1, double E2, int points = 1001);

CountingReport counting_experiment(const EnsembleConfig& cfg, double E1, double E2);
CountingReport counting_from_trials(const EnsembleConfig& cfg, const std::vector<TrialResult>& trials,
                                    double E1, double E2);

struct ConcentrationRow {
  Complex z;
  Complex mean;
  double std;
  double envelope;  // 1 / (n eta^{3/2})
  double ratio;     // std / envelope
};

std::vector<ConcentrationRow> concentration_experiment(const EnsembleConfig& cfg, QKind q,
                                                       std::span<const Complex> z_list);
std::vector<ConcentrationRow> concentration_from_trials(const EnsembleConfig& cfg,
                                                        const std::vector<TrialResult>& trials, QKind q,
                                                        std::span<const Complex> z_list);

struct ApproxSubordinationRow {
  Complex z;
  Complex omega_a_c;
  Complex omega_b_c;
  Complex omega_a;  // solver value for (mu_A, mu_B): omega1
  Complex omega_b;  // omega2
  double distance;  // |omega_a_c - omega_a| + |omega_b_c - omega_b|
  double std_error_a;  // jackknife standard errors of the estimators
  double std_error_b;
  double sum_identity_residual;  // |omega_a_c + omega_b_c - z + 1 / E m_H|
};

std::vector<ApproxSubordinationRow> approx_subordination(const EnsembleConfig& cfg,
                                                         std::span<const Complex> z_list);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Worker count for cfg (honours FREECONV_THREADS).
int worker_count(int requested);

}  // namespace freeconv::rmt
