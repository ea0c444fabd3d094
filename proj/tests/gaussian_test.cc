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

#include "blo/gaussian.hpp"

#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "blo/fock.hpp"

using namespace blo;

namespace {

const ModeLabel kPlus{"a+", 2.0};
const ModeLabel kMinus{"a-", 1.0};

GaussianState<double> tmss(double s, double theta) {
  return apply_two_mode_squeeze(vacuum_state<double>({kPlus, kMinus}), kPlus, kMinus,
                                SqueezeParams(s, theta));
}

}  // namespace

TEST(GaussianCore, vacuum_single_mode) {
  const auto v = vacuum_state<double>({kPlus});
  EXPECT_TRUE(v.cov().isApprox(0.25 * Eigen::Matrix2d::Identity()));
  EXPECT_TRUE(v.mean().isZero());
}

TEST(GaussianCore, vacuum_four_modes) {
  const auto v = vacuum_state<double>(
      {{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}});
  EXPECT_EQ(v.cov().rows(), 8);
  EXPECT_TRUE(v.cov().isApprox(0.25 * Eigen::MatrixXd::Identity(8, 8)));
}

TEST(GaussianCore, vacuum_rejects_degenerate_inputs) {
  EXPECT_THROW(vacuum_state<double>({}), InvariantError);
  EXPECT_THROW(vacuum_state<double>({kPlus, kPlus}), InvariantError);
  EXPECT_THROW(vacuum_state<double>({{"x", 0.0}}), InvariantError);
}

TEST(GaussianCore, squeeze_params_wrap_theta) {
  EXPECT_NEAR(SqueezeParams(1.0, -std::numbers::pi / 2).theta(), 3 * std::numbers::pi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(SqueezeParams(1.0, 2 * std::numbers::pi).theta(), 0.0);
  EXPECT_THROW(SqueezeParams(-0.1, 0.0), InvariantError);
  EXPECT_THROW(SqueezeParams(std::nan(""), 0.0), InvariantError);
}

TEST(GaussianCore, beam_splitter_spec_invariants) {
  EXPECT_NO_THROW(BeamSplitterSpec::balanced());
  EXPECT_THROW(BeamSplitterSpec({0.8, 0.0}, {0.0, 0.8}), InvariantError);
  // Unitary, but the wrong relative phase.
  EXPECT_THROW(BeamSplitterSpec({std::sqrt(0.5), 0.0}, {std::sqrt(0.5), 0.0}), InvariantError);
}

TEST(GaussianCore, squeeze_zero_is_identity) {
  const auto v = vacuum_state<double>({kPlus, kMinus});
  EXPECT_TRUE(tmss(0.0, 1.3).cov().isApprox(v.cov(), 1e-15));
}

TEST(GaussianCore, squeeze_rejects_same_mode) {
  const auto v = vacuum_state<double>({kPlus, kMinus});
  EXPECT_THROW(apply_two_mode_squeeze(v, kPlus, kPlus, SqueezeParams(1, 0)), InvariantError);
  EXPECT_THROW(apply_two_mode_squeeze(v, kPlus, ModeLabel{"zz", 1.0}, SqueezeParams(1, 0)),
               InvariantError);
}

TEST(GaussianCore, quadrature_variance_examples) {
  const auto vac = vacuum_state<double>({kPlus, kMinus});
  for (double a : {0.0, 0.4, 2.0}) EXPECT_NEAR(quadrature_variance(vac, kPlus, kMinus, a), 0.25, 1e-15);
  EXPECT_NEAR(quadrature_variance(tmss(1.0, 0.0), kPlus, kMinus, 0.0), std::exp(-2.0) / 4, 1e-14);
  EXPECT_NEAR(quadrature_variance(tmss(1.0, 0.0), kPlus, kMinus, 0.0), 0.033834, 1e-6);
  EXPECT_NEAR(quadrature_variance(tmss(1.0, std::numbers::pi), kPlus, kMinus, 0.0),
              std::exp(2.0) / 4, 1e-13);
  EXPECT_NEAR(quadrature_variance(tmss(1.0, std::numbers::pi), kPlus, kMinus, 0.0), 1.847264, 1e-6);
}

TEST(GaussianCore, pair_moment_magnitude) {
  const auto st = tmss(0.5, std::numbers::pi / 2);
  EXPECT_NEAR(std::abs(pair_moment(st, kPlus, kMinus)), std::sinh(0.5) * std::cosh(0.5), 1e-14);
  EXPECT_NEAR(std::abs(pair_moment(st, kPlus, kMinus)), 0.587600, 1e-6);
}

TEST(GaussianCore, tmss_moments_examples) {
  const auto zero = tmss_moments(SqueezeParams(0.0, 0.3));
  EXPECT_EQ(zero.envelope, std::complex<double>(0.0, 0.0));
  EXPECT_DOUBLE_EQ(zero.flux(2), 4.0);
  EXPECT_NEAR(tmss_moments(SqueezeParams(1.0, 0.0)).envelope.real(), -3.626860, 1e-6);
  EXPECT_NEAR(tmss_moments(SqueezeParams(0.5, std::numbers::pi)).envelope.real(), 1.175201, 1e-6);
}

TEST(GaussianCore, field_moments_match_tmss_moments) {
  for (double s : {0.0, 0.3, 1.1}) {
    for (double theta : {0.0, 0.7, 4.0}) {
      const auto st = tmss(s, theta);
      const ModeLabel modes[] = {kPlus, kMinus};
      const auto fm = signal_field_moments(st, std::span<const ModeLabel>(modes));
      const auto tm = tmss_moments(SqueezeParams(s, theta));
      EXPECT_NEAR(std::abs(fm.envelope - tm.envelope), 0.0, 1e-13);
      EXPECT_NEAR(fm.flux, tm.flux_base, 1e-13);
    }
  }
}

TEST(GaussianCore, displacement) {
  const auto vac = vacuum_state<double>({kPlus});
  EXPECT_TRUE(apply_displacement(vac, kPlus, 0.0).cov().isApprox(vac.cov()));
  const auto c = apply_displacement(vac, kPlus, 2.0);
  EXPECT_NEAR(c.mean_photon_number(kPlus), 4.0, 1e-14);
  EXPECT_TRUE(c.cov().isApprox(vac.cov()));
  EXPECT_NEAR(apply_displacement(vac, kPlus, {1.0, 1.0}).mean_photon_number(kPlus), 2.0, 1e-14);
  EXPECT_THROW(apply_displacement(vac, kMinus, 1.0), InvariantError);
}

TEST(GaussianCore, beam_splitter_examples) {
  const auto in = apply_displacement(vacuum_state<double>({kPlus, kMinus}), kPlus, 3.0);
  const auto same = apply_beam_splitter(in, kPlus, kMinus, BeamSplitterSpec::identity());
  EXPECT_TRUE(same.cov().isApprox(in.cov()));
  EXPECT_TRUE(same.mean().isApprox(in.mean()));
  const auto out = apply_beam_splitter(in, kPlus, kMinus, BeamSplitterSpec::balanced());
  EXPECT_NEAR(out.mean_photon_number(kPlus), 4.5, 1e-13);
  EXPECT_NEAR(out.mean_photon_number(kMinus), 4.5, 1e-13);
  // d2 = r a1 with r = i/sqrt(2).
  EXPECT_NEAR(std::abs(out.mean_amplitude(kMinus) - std::complex<double>(0, 3 / std::sqrt(2.0))),
              0.0, 1e-14);
}

TEST(GaussianCore, uncertainty_and_trace_identities) {
  for (int i = 0; i <= 30; ++i) {
    const double s = 0.1 * i;
    for (int j = 0; j < 16; ++j) {
      const double theta = 2 * std::numbers::pi * j / 16;
      const auto st = tmss(s, theta);
      const double dx = quadrature_variance(st, kPlus, kMinus, 0.0);
      const double dy = quadrature_variance(st, kPlus, kMinus, std::numbers::pi / 2);
      EXPECT_NEAR(dx + dy, std::cosh(2 * s) / 2, 1e-12 * std::cosh(2 * s));
      // Rounding in the cosh/sinh cancellation grows like e^{4s} eps.
      EXPECT_GE(dx * dy, 1.0 / 16 * (1 - 1e-15 * std::exp(4 * s)));
    }
  }
}

TEST(GaussianCore, random_symplectic_maps_stay_physical) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<ModeLabel> modes = {{"m0", 1.0}, {"m1", 2.0}, {"m2", 3.0}, {"m3", 4.0}};
  for (int trial = 0; trial < 1000; ++trial) {
    auto st = vacuum_state<double>(modes);
    for (int step = 0; step < 4; ++step) {
      const auto i = static_cast<std::size_t>(u(rng) * 4) % 4;
      const auto j = (i + 1 + static_cast<std::size_t>(u(rng) * 3) % 3) % 4;
      if (u(rng) < 0.5) {
        st = apply_two_mode_squeeze(st, modes[i], modes[j],
                                    SqueezeParams(1.5 * u(rng), 2 * std::numbers::pi * u(rng)));
      } else {
        const double angle = 0.5 * std::numbers::pi * u(rng);
        st = apply_beam_splitter(
            st, modes[i], modes[j],
            BeamSplitterSpec({std::cos(angle), 0.0}, {0.0, std::sin(angle)}));
      }
    }
    ASSERT_GE(physicality_margin(st.cov()), -1e-10 * st.cov().cwiseAbs().maxCoeff());
  }
}

TEST(GaussianCore, unphysical_covariance_rejected) {
  Eigen::MatrixXd cov = 0.1 * Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(GaussianState<double>({kPlus}, Eigen::VectorXd::Zero(2), cov), InvariantError);
  Eigen::MatrixXd asym = 0.25 * Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.01;
  EXPECT_THROW(GaussianState<double>({kPlus}, Eigen::VectorXd::Zero(2), asym), InvariantError);
}

TEST(GaussianCore, long_double_scalar) {
  const ModeLabel a{"a", 1.0}, b{"b", 2.0};
  const auto st = apply_two_mode_squeeze(vacuum_state<long double>({a, b}), a, b,
                                         SqueezeParams(1.0, 0.0));
  EXPECT_NEAR(static_cast<double>(quadrature_variance(st, a, b, 0.0L)), std::exp(-2.0) / 4, 1e-15);
}

TEST(GaussianCore, matches_fock_moments) {
  for (double s : {0.3, 1.0}) {
    for (double theta : {0.0, 2.1}) {
      const auto g = apply_beam_splitter(tmss(s, theta), kPlus, kMinus, BeamSplitterSpec::balanced());
      const auto f = fock::apply_beam_splitter(
          fock::build_tmss(SqueezeParams(s, theta), 90), 0, 1, BeamSplitterSpec::balanced());
      EXPECT_LT((fock::quadrature_covariance(f) - g.cov()).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
  // Coherent plus squeezing, |b| <= 3.
  const auto g = apply_displacement(tmss(0.5, 0.4), kPlus, {2.0, -1.0});
  const auto f = fock::apply_displacement(fock::build_tmss(SqueezeParams(0.5, 0.4), 40), 0,
                                          {2.0, -1.0});
  EXPECT_LT((fock::quadrature_covariance(f) - g.cov()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((fock::quadrature_means(f) - g.mean()).cwiseAbs().maxCoeff(), 1e-9);
}
