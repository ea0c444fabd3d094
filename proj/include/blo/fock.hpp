// Copyright 2026 The bichromatic-heterodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force reference for the detection formulas: states are dense complex
// vectors over a truncated number basis, and every moment is computed as
// <psi| ops |psi> with explicit ladder operators. Nothing here uses the
// Gaussian formalism or the closed-form variances.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blo/detection.hpp"
#include "blo/gaussian.hpp"

namespace blo::fock {

inline constexpr Eigen::Index kDefaultMaxDimension = 10'000'000;

/// Amplitudes over |n_0, n_1, ..., n_{M-1}>, 0 <= n_k <= cutoff_k, with the
/// last mode varying fastest. The norm deficit is truncation leakage and is
/// never renormalised away.
class FockStateVector {
 public:
  FockStateVector(std::vector<int> cutoffs, Eigen::VectorXcd amplitudes);

  int num_modes() const { return static_cast<int>(cutoffs_.size()); }
  std::span<const int> cutoffs() const { return cutoffs_; }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  Eigen::Index stride(int mode) const { return strides_.at(static_cast<std::size_t>(mode)); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double leakage() const { return 1.0 - norm_squared(); }

  Eigen::Index index(std::span<const int> occupation) const;
  int occupation(Eigen::Index index, int mode) const {
    return static_cast<int>((index / stride(mode)) % (cutoff(mode) + 1));
  }

 private:
  std::vector<int> cutoffs_;
  std::vector<Eigen::Index> strides_;
  Eigen::VectorXcd amplitudes_;
};

struct TruncationPolicy {
  std::optional<int> cutoff;             // explicit cutoff, or
  std::optional<double> target_leakage;  // smallest cutoff meeting this leakage
  Eigen::Index max_dimension = kDefaultMaxDimension;
};

/// Smallest n_max with tanh^{2(n_max + 1)} s <= leakage.
int tmss_cutoff_for_leakage(double s, double leakage);

/// sech s * sum_{n <= cutoff} (-e^{i theta} tanh s)^n |n, n>.
FockStateVector build_tmss(const SqueezeParams& p, int cutoff);
FockStateVector build_tmss(const SqueezeParams& p, const TruncationPolicy& policy);

/// exp(xi^* a+ a- - xi a+^dag a-^dag)|0,0> with xi = s e^{i theta}, computed as
/// a dense matrix exponential on an enlarged pair ladder and then truncated.
FockStateVector build_tmss_by_generator(const SqueezeParams& p, int cutoff);

struct CoherentTone {
  double amplitude;
  double phase;
};

/// Cutoff rule N >= |b|^2 + 8|b| + 10 (leakage well below 1e-8).
int coherent_cutoff_rule(double amplitude);

/// Product of truncated coherent states. Without an explicit cutoff each mode
/// uses coherent_cutoff_rule. Rejects leakage above 1e-8 per tone.
FockStateVector build_coherent_product(std::span<const CoherentTone> tones,
                                       std::optional<int> cutoff = std::nullopt,
                                       Eigen::Index max_dimension = kDefaultMaxDimension);

FockStateVector vacuum(int num_modes, int cutoff = 0);
FockStateVector tensor_product(const FockStateVector& a, const FockStateVector& b);
/// Re-embeds the state with every cutoff raised by `extra`.
FockStateVector padded(const FockStateVector& state, int extra);

enum class Ladder : std::uint8_t { Lower, Raise };

struct LadderOp {
  int mode;
  Ladder kind;
};

/// Applies a single truncated ladder operator to a raw amplitude vector.
Eigen::VectorXcd apply_ladder(const FockStateVector& basis, const Eigen::VectorXcd& amplitudes,
                              LadderOp op);

/// <psi| op_0 op_1 ... op_{k-1} |psi> / <psi|psi>.
std::complex<double> expectation(const FockStateVector& state, std::span<const LadderOp> ops);

double mean_photon_number(const FockStateVector& state, int mode);
std::complex<double> mean_amplitude(const FockStateVector& state, int mode);

/// Quadrature means and symmetrised covariance in the (x_1, p_1, ...) ordering
/// with vacuum variance 1/4, for comparison with GaussianState.
Eigen::VectorXd quadrature_means(const FockStateVector& state);
Eigen::MatrixXd quadrature_covariance(const FockStateVector& state);

/// Beam splitter unitary U = exp(sum_jk G_jk a_j^dag a_k) with e^G = [[t, r], [r, t]],
/// so that U^dag a1 U = t a1 + r a2. Works block by block in total photon
/// number; the two modes are re-embedded with cutoff N1 + N2 so every block is
/// complete and the map is exactly unitary.
FockStateVector apply_beam_splitter(const FockStateVector& state, int m1, int m2,
                                    const BeamSplitterSpec& bs);

/// Displacement exp(beta a^dag - beta^* a) on one mode; the mode cutoff is
/// enlarged by the coherent cutoff rule for |beta|.
FockStateVector apply_displacement(const FockStateVector& state, int mode,
                                   std::complex<double> beta);

// ---------------------------------------------------------------------------
// Difference-signal oracle

enum class Port { Signal, LocalOscillator };

/// One field mode entering the detector: which input port and which mode of
/// that port's state vector, and its optical frequency.
struct OracleMode {
  std::string label;
  Port port;
  int index;
  double angular_frequency;  // rad/s, any common reference
};

struct ModeFrequencyMap {
  std::vector<OracleMode> modes;
};

struct OracleOptions {
  /// Slow time at which the variance is evaluated (rotating frame, t = 0 at
  /// the phase reference of the LO tones).
  double time = 0.0;
  /// Detection bandwidth (rad/s). Spectral components of the variance above
  /// it are discarded. Defaults to Delta / 4.
  std::optional<double> bandwidth;
  BeamSplitterSpec beam_splitter = BeamSplitterSpec::balanced();
  double max_leakage = 1e-6;
};

struct OracleResult {
  double variance;
  double mean;
  double signal_leakage;
  double lo_leakage;
};

/// Exact variance of I12 = n(d1) - n(d2), with d1 = t E_S + r E_LO and
/// d2 = r E_S + t E_LO built from every mode in `map`, keeping only spectral
/// components of <I12^2> - <I12>^2 inside the detection bandwidth.
OracleResult oracle_difference_variance(const FockStateVector& signal, const FockStateVector& lo,
                                        const ModeFrequencyMap& map, const FrequencyPlan& fp,
                                        const OracleOptions& options = {});

struct OracleSetup {
  FockStateVector signal;
  FockStateVector lo;
  ModeFrequencyMap map;
};

/// TMSS (a+, a-) against a single LO at the midpoint frequency.
OracleSetup standard_setup(const SqueezeParams& p, const LoTone& lo, const FrequencyPlan& fp,
                           double tmss_leakage = 1e-12);

/// TMSS plus explicit vacuum image modes (per the plan's image-band case)
/// against a two-tone LO. Frequencies are taken relative to omega_minus.
OracleSetup bichromatic_setup(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                              const FrequencyPlan& fp, double tmss_leakage = 1e-12);

}  // namespace blo::fock
