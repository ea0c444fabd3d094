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

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <type_traits>

namespace blo {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2*pi).
template <typename Scalar>
Scalar wrap_angle(Scalar x) {
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar r = std::fmod(x, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0;
  return r;
}

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

/// Neumaier compensated accumulator. Works for real and complex scalars.
template <typename T>
class CompensatedSum {
 public:
  void add(const T& x) {
    if constexpr (std::is_floating_point_v<T>) {
      add_real(sum_, comp_, x);
    } else {
      auto re = sum_.real(), re_c = comp_.real();
      auto im = sum_.imag(), im_c = comp_.imag();
      add_real(re, re_c, x.real());
      add_real(im, im_c, x.imag());
      sum_ = T(re, im);
      comp_ = T(re_c, im_c);
    }
  }
  T value() const { return sum_ + comp_; }

 private:
  template <typename R>
  static void add_real(R& sum, R& comp, R x) {
    const R t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  T sum_{};
  T comp_{};
};

}  // namespace blo
