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

#include "blo/fock.hpp"

#include <numbers>
#include <random>

#include <gtest/gtest.h>

using namespace blo;
using namespace blo::fock;

namespace {

constexpr double kPi = std::numbers::pi;
const double kOmegaMinus = kTwoPi * 2.8e14;
const double kDelta = kTwoPi * 2e7;

}  // namespace

TEST(FockOracle, truncated_tmss_norm) {
  const auto st = build_tmss(SqueezeParams(0.5, 0.0), 3);
  EXPECT_NEAR(st.norm_squared(), 1 - std::pow(std::tanh(0.5), 8), 1e-14);
  EXPECT_NEAR(st.norm_squared(), 0.997920, 1e-6);
  EXPECT_NEAR(mean_photon_number(build_tmss(SqueezeParams(0.5, 0.0), 60), 0),
              std::sinh(0.5) * std::sinh(0.5), 1e-12);
}

TEST(FockOracle, tmss_amplitudes_match_generator) {
  for (double s : {0.2, 0.8}) {
    for (double theta : {0.0, 1.7}) {
      const auto a = build_tmss(SqueezeParams(s, theta), 20);
      const auto b = build_tmss_by_generator(SqueezeParams(s, theta), 20);
      EXPECT_LT((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(FockOracle, leakage_policy) {
  TruncationPolicy policy;
  policy.target_leakage = 1e-10;
  const auto st = build_tmss(SqueezeParams(1.0, 0.0), policy);
  EXPECT_LE(st.leakage(), 1e-10);
  EXPECT_EQ(st.cutoff(0), tmss_cutoff_for_leakage(1.0, 1e-10));
  TruncationPolicy tiny;
  tiny.target_leakage = 1e-12;
  tiny.max_dimension = 100;
  EXPECT_THROW(build_tmss(SqueezeParams(3.0, 0.0), tiny), InvariantError);
}

TEST(FockOracle, coherent_state_moments) {
  const CoherentTone tone{2.0, kPi / 3};
  const auto st = build_coherent_product(std::span<const CoherentTone>(&tone, 1));
  EXPECT_NEAR(mean_photon_number(st, 0), 4.0, 1e-10);
  EXPECT_NEAR(std::abs(mean_amplitude(st, 0) - std::polar(2.0, kPi / 3)), 0.0, 1e-10);
  EXPECT_EQ(coherent_cutoff_rule(2.0), 30);
  const CoherentTone big{3.0, 0.0};
  EXPECT_THROW(build_coherent_product(std::span<const CoherentTone>(&big, 1), 5), InvariantError);
}

TEST(FockOracle, state_vector_rejects_bad_norm) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Constant(2, 1.0);
  EXPECT_THROW(FockStateVector({1}, amps), InvariantError);
  EXPECT_THROW(FockStateVector({2}, Eigen::VectorXcd::Zero(2)), InvariantError);
}

TEST(FockOracle, beam_splitter_preserves_norm_and_photons) {
  const CoherentTone tones[] = {{1.5, 0.3}, {0.7, 2.0}};
  const auto in = tensor_product(build_tmss(SqueezeParams(0.4, 0.5), 12),
                                 build_coherent_product(tones));
  const auto out = apply_beam_splitter(in, 1, 2, BeamSplitterSpec::balanced());
  EXPECT_NEAR(out.norm_squared(), in.norm_squared(), 1e-12);
  double n_in = 0, n_out = 0;
  for (int m = 0; m < 4; ++m) {
    n_in += mean_photon_number(in, m);
    n_out += mean_photon_number(out, m);
  }
  EXPECT_NEAR(n_in, n_out, 1e-10);
  const auto same = apply_beam_splitter(in, 1, 2, BeamSplitterSpec::identity());
  for (int m = 0; m < 4; ++m) {
    EXPECT_NEAR(mean_photon_number(same, m), mean_photon_number(in, m), 1e-12);
  }
}

TEST(FockOracle, displacement_matches_coherent_state) {
  const auto d = apply_displacement(vacuum(1), 0, std::polar(1.5, 0.4));
  const CoherentTone tone{1.5, 0.4};
  const auto c = build_coherent_product(std::span<const CoherentTone>(&tone, 1));
  EXPECT_NEAR(mean_photon_number(d, 0), mean_photon_number(c, 0), 1e-10);
  EXPECT_NEAR(std::abs(mean_amplitude(d, 0) - mean_amplitude(c, 0)), 0.0, 1e-10);
}

TEST(FockOracle, vacuum_signal_shot_noise) {
  const FrequencyPlan fp = FrequencyPlan::standard(kOmegaMinus, kOmegaMinus + kDelta);
  const auto setup = standard_setup(SqueezeParams(0, 0), LoTone(10, 0.3), fp);
  const auto r = oracle_difference_variance(setup.signal, setup.lo, setup.map, fp);
  EXPECT_NEAR(r.variance, 200.0, 1.0);
  EXPECT_NEAR(r.mean, 0.0, 1e-8);
}

TEST(FockOracle, standard_lo_agrees_with_analytic) {
  const FrequencyPlan fp = FrequencyPlan::standard(kOmegaMinus, kOmegaMinus + kDelta);
  for (double chi : {0.0, 0.8, kPi / 2}) {
    const SqueezeParams p(0.6, 0.4);
    const LoTone lo(4.0, chi);
    const auto setup = standard_setup(p, lo, fp);
    const double v = oracle_difference_variance(setup.signal, setup.lo, setup.map, fp).variance;
    const double expected = standard_heterodyne_variance(p, lo).variance + lo_quantization_noise(p, 1);
    EXPECT_NEAR(v, expected, 1e-9 * expected);
  }
}

TEST(FockOracle, cutoff_convergence) {
  const FrequencyPlan fp = FrequencyPlan::bichromatic(kOmegaMinus, kDelta, kDelta / 4, -kDelta / 4);
  const SqueezeParams p(0.8, 1.0);
  const auto loose = bichromatic_setup(p, LoTone(3, 0.5), LoTone(3, 0.0), fp, 1e-4);
  const auto tight = bichromatic_setup(p, LoTone(3, 0.5), LoTone(3, 0.0), fp, 1e-12);
  const double v_loose =
      oracle_difference_variance(loose.signal, loose.lo, loose.map, fp, {.max_leakage = 1e-3}).variance;
  const double v_tight = oracle_difference_variance(tight.signal, tight.lo, tight.map, fp).variance;
  const double exact = blo_variance(p, LoTone(3, 0.5), LoTone(3, 0.0), ImageBandCase::SharedImageBand)
                           .variance + lo_quantization_noise(p, 2);
  EXPECT_LT(std::abs(v_tight - exact), std::abs(v_loose - exact) + 1e-12);
  EXPECT_NEAR(v_tight, exact, 1e-9 * exact);
}

TEST(FockOracle, leakage_guard) {
  const FrequencyPlan fp = FrequencyPlan::standard(kOmegaMinus, kOmegaMinus + kDelta);
  const auto setup = standard_setup(SqueezeParams(1.0, 0), LoTone(2, 0), fp, 1e-2);
  EXPECT_THROW(oracle_difference_variance(setup.signal, setup.lo, setup.map, fp), InvariantError);
}

TEST(FockOracle, case_gap_is_four_beta_squared) {
  const SqueezeParams p(0.5, 0.0);
  const LoTone l1(2, 1.0), l2(2, 0.0);
  const auto run = [&](double d1) {
    const FrequencyPlan fp = FrequencyPlan::bichromatic(kOmegaMinus, kDelta, d1, -d1);
    const auto st = bichromatic_setup(p, l1, l2, fp);
    return oracle_difference_variance(st.signal, st.lo, st.map, fp).variance;
  };
  const double none = run(0.0), shared = run(kDelta / 4), two = run(kDelta / 8);
  EXPECT_NEAR(shared - none, 8.0, 1e-8);
  EXPECT_NEAR(two - shared, 8.0, 1e-8);
}

TEST(FockOracle, randomized_cross_validation) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const SqueezeParams p(1.2 * u(rng), kTwoPi * u(rng));
    const double b = 1.0 + 4.0 * u(rng);
    const LoTone l1(b, kTwoPi * u(rng)), l2(b, kTwoPi * u(rng));
    const int k = static_cast<int>(3 * u(rng));
    const double d1 = k == 0 ? 0.0 : (k == 1 ? kDelta / 4 : kDelta / 8);
    const FrequencyPlan fp = FrequencyPlan::bichromatic(kOmegaMinus, kDelta, d1, -d1);
    const auto st = bichromatic_setup(p, l1, l2, fp);
    const double v = oracle_difference_variance(st.signal, st.lo, st.map, fp).variance;
    const double expected =
        blo_variance(p, l1, l2, classify_image_band_case(fp)).variance + lo_quantization_noise(p, 2);
    EXPECT_NEAR(v, expected, 1e-8 * expected) << "draw " << i;
  }
}
