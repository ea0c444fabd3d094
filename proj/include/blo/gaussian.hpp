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

// Gaussian-moment description of multi-mode bosonic fields.
//
// Conventions, used everywhere in the library:
//   * quadratures x = (a + a^dag) / 2, p = (a - a^dag) / (2i), so [x, p] = i/2
//     and the vacuum has <x^2> = <p^2> = 1/4 (fields in units of E0);
//   * phase-space ordering (x_1, p_1, x_2, p_2, ...);
//   * cov_jk = <{dR_j, dR_k}> / 2, physicality cov + (i/4) Omega >= 0.
//
// States hold slowly varying envelope moments only; optical carriers are
// applied by the detection formulas through FrequencyPlan.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "blo/errors.hpp"
#include "blo/numeric.hpp"

namespace blo {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhysicalityTolerance = 1e-10;
inline constexpr double kUnitarityTolerance = 1e-12;

struct ModeLabel {
  std::string id;
  double angular_frequency = 1.0;  // rad/s

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

/// Two-mode squeezing magnitude s >= 0 and angle theta in [0, 2*pi).
class SqueezeParams {
 public:
  SqueezeParams(double s, double theta) : s_(s), theta_(wrap_angle(theta)) {
    if (!std::isfinite(s) || s < 0.0) {
      throw InvariantError(fmt::format("squeeze magnitude must be finite and >= 0, got {}", s));
    }
    if (!std::isfinite(theta)) {
      throw InvariantError("squeeze angle must be finite");
    }
  }

  double s() const { return s_; }
  double theta() const { return theta_; }

 private:
  double s_;
  double theta_;
};

/// Beam splitter d1 = t a1 + r a2, d2 = r a1 + t a2 with |t|^2 + |r|^2 = 1 and
/// t^* r = i |r t|.
class BeamSplitterSpec {
 public:
  BeamSplitterSpec(std::complex<double> t, std::complex<double> r) : t_(t), r_(r) {
    const double norm = std::norm(t) + std::norm(r);
    if (std::abs(norm - 1.0) > kUnitarityTolerance) {
      throw InvariantError(fmt::format("beam splitter is not unitary: |t|^2 + |r|^2 = {:.17g}", norm));
    }
    const std::complex<double> phase = std::conj(t) * r;
    if (std::abs(phase - std::complex<double>(0.0, std::abs(r * t))) > kUnitarityTolerance) {
      throw InvariantError(fmt::format("beam splitter violates t*r = i|rt|: t*r = ({:.17g}, {:.17g})",
                                       phase.real(), phase.imag()));
    }
  }

  static BeamSplitterSpec balanced() {
    const double h = std::sqrt(0.5);
    return {{h, 0.0}, {0.0, h}};
  }
  static BeamSplitterSpec identity() { return {{1.0, 0.0}, {0.0, 0.0}}; }

  std::complex<double> t() const { return t_; }
  std::complex<double> r() const { return r_; }

  /// Mode transfer matrix [[t, r], [r, t]].
  Eigen::Matrix2cd transfer() const {
    Eigen::Matrix2cd m;
    m << t_, r_, r_, t_;
    return m;
  }

 private:
  std::complex<double> t_;
  std::complex<double> r_;
};

/// Symplectic form Omega = diag([[0, 1], [-1, 0]], ...) for n modes.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symplectic_form(Eigen::Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> omega =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    omega(2 * k, 2 * k + 1) = Scalar(1);
    omega(2 * k + 1, 2 * k) = Scalar(-1);
  }
  return omega;
}

/// Smallest eigenvalue of cov + (i/4) Omega. Non-negative for physical states.
template <typename Derived>
typename Derived::Scalar physicality_margin(const Eigen::MatrixBase<Derived>& cov) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = cov.rows() / 2;
  ComplexMatrix h = cov.template cast<Complex>();
  h += Complex(0, Scalar(0.25)) * symplectic_form<Scalar>(n).template cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <typename Scalar = double>
class GaussianState {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GaussianState(std::vector<ModeLabel> modes, Vector mean, Matrix cov)
      : modes_(std::move(modes)), mean_(std::move(mean)), cov_(std::move(cov)) {
    validate();
  }

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  Eigen::Index num_modes() const { return static_cast<Eigen::Index>(modes_.size()); }

  Eigen::Index index_of(const ModeLabel& m) const {
    auto it = std::find_if(modes_.begin(), modes_.end(),
                           [&](const ModeLabel& x) { return x.id == m.id; });
    if (it == modes_.end()) {
      throw InvariantError(fmt::format("unknown mode '{}'", m.id));
    }
    return static_cast<Eigen::Index>(it - modes_.begin());
  }

  /// <a> for the given mode.
  std::complex<Scalar> mean_amplitude(const ModeLabel& m) const {
    const Eigen::Index k = index_of(m);
    return {mean_(2 * k), mean_(2 * k + 1)};
  }

  /// <a^dag a> = <x^2> + <p^2> - 1/2.
  Scalar mean_photon_number(const ModeLabel& m) const {
    const Eigen::Index k = index_of(m);
    return cov_(2 * k, 2 * k) + cov_(2 * k + 1, 2 * k + 1) + mean_(2 * k) * mean_(2 * k) +
           mean_(2 * k + 1) * mean_(2 * k + 1) - Scalar(0.5);
  }

 private:
  void validate() const {
    if (modes_.empty()) {
      throw InvariantError("a Gaussian state needs at least one mode");
    }
    std::unordered_set<std::string> ids;
    for (const auto& m : modes_) {
      if (!ids.insert(m.id).second) {
        throw InvariantError(fmt::format("duplicate mode id '{}'", m.id));
      }
      if (!(m.angular_frequency > 0.0)) {
        throw InvariantError(fmt::format("mode '{}' needs a positive angular frequency", m.id));
      }
    }
    const Eigen::Index dim = 2 * num_modes();
    if (mean_.size() != dim || cov_.rows() != dim || cov_.cols() != dim) {
      throw InvariantError(fmt::format("moment dimensions do not match {} modes", modes_.size()));
    }
    const Scalar scale = std::max(Scalar(1), cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > Scalar(kSymmetryTolerance) * scale) {
      throw InvariantError("covariance matrix is not symmetric");
    }
    const Scalar margin = physicality_margin(cov_);
    if (margin < -Scalar(kPhysicalityTolerance) * scale) {
      throw InvariantError(
          fmt::format("covariance violates the uncertainty principle (min eigenvalue {:.3g})",
                      static_cast<double>(margin)));
    }
  }

  std::vector<ModeLabel> modes_;
  Vector mean_;
  Matrix cov_;
};

template <typename Scalar = double>
GaussianState<Scalar> vacuum_state(std::vector<ModeLabel> modes) {
  const auto dim = static_cast<Eigen::Index>(2 * modes.size());
  using State = GaussianState<Scalar>;
  return State(std::move(modes), State::Vector::Zero(dim),
               Scalar(0.25) * State::Matrix::Identity(dim, dim));
}

namespace detail {

template <typename Scalar>
GaussianState<Scalar> apply_symplectic(const GaussianState<Scalar>& state,
                                       const typename GaussianState<Scalar>::Matrix& s) {
  typename GaussianState<Scalar>::Matrix cov = s * state.cov() * s.transpose();
  cov = (Scalar(0.5) * (cov + cov.transpose())).eval();
  return GaussianState<Scalar>(state.modes(), s * state.mean(), std::move(cov));
}

template <typename Scalar>
std::pair<Eigen::Index, Eigen::Index> distinct_pair(const GaussianState<Scalar>& state,
                                                    const ModeLabel& m1, const ModeLabel& m2) {
  if (m1.id == m2.id) {
    throw InvariantError(fmt::format("operation needs two distinct modes, got '{}' twice", m1.id));
  }
  return {state.index_of(m1), state.index_of(m2)};
}

// Real 4x4 block of a complex 2x2 mode transfer matrix, a' = M a.
template <typename Scalar>
typename GaussianState<Scalar>::Matrix passive_symplectic(Eigen::Index n, Eigen::Index i,
                                                          Eigen::Index j,
                                                          const Eigen::Matrix2cd& m) {
  using Matrix = typename GaussianState<Scalar>::Matrix;
  Matrix s = Matrix::Identity(2 * n, 2 * n);
  const Eigen::Index idx[2] = {i, j};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto re = static_cast<Scalar>(m(a, b).real());
      const auto im = static_cast<Scalar>(m(a, b).imag());
      s(2 * idx[a], 2 * idx[b]) = re;
      s(2 * idx[a], 2 * idx[b] + 1) = -im;
      s(2 * idx[a] + 1, 2 * idx[b]) = im;
      s(2 * idx[a] + 1, 2 * idx[b] + 1) = re;
    }
  }
  return s;
}

}  // namespace detail

/// Two-mode squeezer S(xi) with xi = s e^{i theta}:
/// S^dag a1 S = a1 cosh s - e^{i theta} a2^dag sinh s (and 1 <-> 2).
template <typename Scalar>
GaussianState<Scalar> apply_two_mode_squeeze(const GaussianState<Scalar>& state,
                                             const ModeLabel& m1, const ModeLabel& m2,
                                             const SqueezeParams& p) {
  using Matrix = typename GaussianState<Scalar>::Matrix;
  const auto [i, j] = detail::distinct_pair(state, m1, m2);
  const auto ch = static_cast<Scalar>(std::cosh(p.s()));
  const auto sh = static_cast<Scalar>(std::sinh(p.s()));
  const auto c = static_cast<Scalar>(std::cos(p.theta()));
  const auto sn = static_cast<Scalar>(std::sin(p.theta()));

  Matrix s = Matrix::Identity(2 * state.num_modes(), 2 * state.num_modes());
  auto couple = [&](Eigen::Index a, Eigen::Index b) {
    s(2 * a, 2 * a) = ch;
    s(2 * a + 1, 2 * a + 1) = ch;
    s(2 * a, 2 * b) = -sh * c;
    s(2 * a, 2 * b + 1) = -sh * sn;
    s(2 * a + 1, 2 * b) = -sh * sn;
    s(2 * a + 1, 2 * b + 1) = sh * c;
  };
  couple(i, j);
  couple(j, i);
  return detail::apply_symplectic(state, s);
}

template <typename Scalar>
GaussianState<Scalar> apply_displacement(const GaussianState<Scalar>& state, const ModeLabel& m,
                                         std::complex<double> beta) {
  const Eigen::Index k = state.index_of(m);
  typename GaussianState<Scalar>::Vector mean = state.mean();
  mean(2 * k) += static_cast<Scalar>(beta.real());
  mean(2 * k + 1) += static_cast<Scalar>(beta.imag());
  return GaussianState<Scalar>(state.modes(), std::move(mean), state.cov());
}

template <typename Scalar>
GaussianState<Scalar> apply_beam_splitter(const GaussianState<Scalar>& state, const ModeLabel& m1,
                                          const ModeLabel& m2, const BeamSplitterSpec& bs) {
  const auto [i, j] = detail::distinct_pair(state, m1, m2);
  return detail::apply_symplectic(
      state, detail::passive_symplectic<Scalar>(state.num_modes(), i, j, bs.transfer()));
}

/// Variance of the joint quadrature
///   X_phi = (x1 cos phi + p1 sin phi + x2 cos phi + p2 sin phi) / sqrt(2),
/// which is X at phi = 0 and Y at phi = pi/2.
template <typename Scalar>
Scalar quadrature_variance(const GaussianState<Scalar>& state, const ModeLabel& m1,
                           const ModeLabel& m2, Scalar quad_angle) {
  const auto [i, j] = detail::distinct_pair(state, m1, m2);
  typename GaussianState<Scalar>::Vector v =
      GaussianState<Scalar>::Vector::Zero(2 * state.num_modes());
  const Scalar w = Scalar(1) / std::sqrt(Scalar(2));
  v(2 * i) = v(2 * j) = w * std::cos(quad_angle);
  v(2 * i + 1) = v(2 * j + 1) = w * std::sin(quad_angle);
  return v.dot(state.cov() * v);
}

/// <da_i da_j> from the covariance (i may equal j).
template <typename Scalar>
std::complex<Scalar> pair_moment(const GaussianState<Scalar>& state, const ModeLabel& m1,
                                 const ModeLabel& m2) {
  const Eigen::Index i = state.index_of(m1), j = state.index_of(m2);
  const auto& v = state.cov();
  return {v(2 * i, 2 * j) - v(2 * i + 1, 2 * j + 1), v(2 * i, 2 * j + 1) + v(2 * i + 1, 2 * j)};
}

/// <da_i^dag da_j> from the covariance.
template <typename Scalar>
std::complex<Scalar> number_moment(const GaussianState<Scalar>& state, const ModeLabel& m1,
                                   const ModeLabel& m2) {
  const Eigen::Index i = state.index_of(m1), j = state.index_of(m2);
  const auto& v = state.cov();
  const Scalar diag = (i == j) ? Scalar(0.5) : Scalar(0);
  return {v(2 * i, 2 * j) + v(2 * i + 1, 2 * j + 1) - diag,
          v(2 * i, 2 * j + 1) - v(2 * i + 1, 2 * j)};
}

/// Envelope moments of a TMSS signal field E = a+ + a- (plus vacuum image bands).
struct TmssMoments {
  std::complex<double> conj_envelope;  // <dE^dag^2>
  std::complex<double> envelope;       // <dE^2>
  double flux_base;                    // 4 sinh^2 s + 2

  /// <E^dag E> + <E E^dag> - 2|<E>|^2 with `vacuum_image_modes` vacuum image
  /// bands, each contributing <a_v a_v^dag> = 1.
  double flux(int vacuum_image_modes) const { return flux_base + vacuum_image_modes; }
};

inline TmssMoments tmss_moments(const SqueezeParams& p) {
  const double sc = std::sinh(p.s()) * std::cosh(p.s());
  const double sh = std::sinh(p.s());
  return {-2.0 * std::polar(1.0, -p.theta()) * sc, -2.0 * std::polar(1.0, p.theta()) * sc,
          4.0 * sh * sh + 2.0};
}

struct FieldMoments {
  std::complex<double> envelope;  // sum_kl <da_k da_l>
  double flux;                    // sum_k <da_k^dag da_k> + <da_k da_k^dag>
};

/// Same quantities as tmss_moments, measured on a state for a field built from
/// `modes`. Cross-frequency number terms carry fast carriers and are omitted.
template <typename Scalar>
FieldMoments signal_field_moments(const GaussianState<Scalar>& state,
                                  std::span<const ModeLabel> modes) {
  FieldMoments out{{0.0, 0.0}, 0.0};
  for (const auto& a : modes) {
    for (const auto& b : modes) {
      const auto m = pair_moment(state, a, b);
      out.envelope += std::complex<double>(static_cast<double>(m.real()),
                                           static_cast<double>(m.imag()));
    }
    out.flux += 2.0 * static_cast<double>(number_moment(state, a, a).real()) + 1.0;
  }
  return out;
}

}  // namespace blo
