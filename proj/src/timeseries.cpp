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

#include "blo/timeseries.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <random>

#include <fmt/format.h>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace blo {

std::string_view to_string(Profile p) {
  return p == Profile::Lorentzian ? "lorentzian" : "flat_top";
}

std::optional<Profile> parse_profile(std::string_view name) {
  if (name == "lorentzian") return Profile::Lorentzian;
  if (name == "flat_top") return Profile::FlatTop;
  return std::nullopt;
}

void SpectralModel::validate() const {
  if (!(squeezing_bandwidth > 0.0) || !std::isfinite(squeezing_bandwidth)) {
    throw InvariantError(fmt::format("squeezing bandwidth must be > 0, got {}", squeezing_bandwidth));
  }
  if (!(noise_floor >= 0.0) || !(feature_level >= 0.0) || !std::isfinite(noise_floor) ||
      !std::isfinite(feature_level)) {
    throw InvariantError("spectral levels must be finite and >= 0");
  }
  if (!(center_frequency >= 0.0) || !std::isfinite(center_frequency)) {
    throw InvariantError(fmt::format("feature center must be >= 0, got {}", center_frequency));
  }
}

double SpectralModel::shape(double f) const {
  const double x = (f - center_frequency) / squeezing_bandwidth;
  if (profile == Profile::FlatTop) return std::abs(x) <= 1.0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + x * x);
}

double SpectralModel::psd(double f) const {
  return noise_floor + (feature_level - noise_floor) * shape(f);
}

SpectralModel standard_spectral_model(const SqueezeParams& p, const LoTone& lo,
                                      const FrequencyPlan& fp, double bandwidth_hz,
                                      Profile profile) {
  if (fp.is_bichromatic()) throw InvariantError("standard spectral model needs a single-tone plan");
  const VarianceReport r = standard_heterodyne_variance(p, lo);
  SpectralModel m{fp.delta_beat() / kTwoPi, bandwidth_hz, r.own_baseline, r.variance, profile};
  m.validate();
  return m;
}

SpectralModel blo_spectral_model(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                                 const FrequencyPlan& fp, double bandwidth_hz, Profile profile) {
  if (fp.delta1() + fp.delta2() != 0.0) {
    throw InvariantError(fmt::format(
        "Delta1 + Delta2 = {} != 0: the difference-current variance is not stationary",
        fp.delta1() + fp.delta2()));
  }
  const VarianceReport r = blo_variance(p, lo1, lo2, classify_image_band_case(fp));
  SpectralModel m{std::abs(fp.delta1()) / kTwoPi, bandwidth_hz, r.own_baseline, r.variance,
                  profile};
  m.validate();
  return m;
}

PhotocurrentRecord synthesize_difference_current(const SpectralModel& model, double duration,
                                                 double sample_rate, std::uint64_t seed) {
  model.validate();
  if (!(sample_rate > 0.0) || !(duration > 0.0)) {
    throw InvariantError("duration and sample rate must be positive");
  }
  const double needed = 2.0 * (model.center_frequency + 5.0 * model.squeezing_bandwidth);
  if (!(sample_rate > needed)) {
    throw InvariantError(fmt::format(
        "sample rate {} Hz aliases the feature; it must exceed 2 (center + 5 B) = {} Hz",
        sample_rate, needed));
  }
  const double samples = std::round(duration * sample_rate);
  if (!(samples >= 2.0) || samples > static_cast<double>(kMaxRecordLength)) {
    throw InvariantError(fmt::format("record length {} outside [2, {}]", samples, kMaxRecordLength));
  }
  const auto n = static_cast<std::size_t>(samples);
  if (!std::has_single_bit(n)) {
    throw InvariantError(fmt::format("record length {} is not a power of two", n));
  }

  // E|X_k|^2 = N fs S(f_k) / 2, Hermitian so the inverse transform is real.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::complex<double>> spectrum(n);
  const double df = sample_rate / static_cast<double>(n);
  const double scale = static_cast<double>(n) * sample_rate / 2.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double amp = std::sqrt(scale * model.psd(static_cast<double>(k) * df));
    if (k == 0 || k == n / 2) {
      spectrum[k] = amp * normal(rng);
    } else {
      const double re = normal(rng), im = normal(rng);
      spectrum[k] = amp * std::complex<double>(re, im) / std::sqrt(2.0);
      spectrum[n - k] = std::conj(spectrum[k]);
    }
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> time(n);
  fft.inv(time.data(), spectrum.data(), static_cast<Eigen::Index>(n));

  PhotocurrentRecord rec;
  rec.samples.resize(n);
  std::transform(time.begin(), time.end(), rec.samples.begin(),
                 [](const std::complex<double>& z) { return z.real(); });
  rec.sample_rate = sample_rate;
  rec.seed = seed;
  rec.model = model;
  return rec;
}

SpectrumEstimate estimate_psd(const PhotocurrentRecord& rec, int segment_length,
                              double overlap_fraction) {
  if (segment_length < 2 || !std::has_single_bit(static_cast<unsigned>(segment_length))) {
    throw InvariantError(fmt::format("segment length {} is not a power of two >= 2", segment_length));
  }
  const auto len = static_cast<std::size_t>(segment_length);
  if (len > rec.samples.size()) {
    throw InvariantError(fmt::format("segment length {} exceeds the record length {}",
                                     segment_length, rec.samples.size()));
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.9)) {
    throw InvariantError(fmt::format("overlap {} outside [0, 0.9]", overlap_fraction));
  }
  if (!(rec.sample_rate > 0.0)) throw InvariantError("record has no sample rate");

  const auto step = std::max<std::size_t>(
      1, len - static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(len))));
  const std::size_t segments = 1 + (rec.samples.size() - len) / step;

  std::vector<double> window(len);
  double window_power = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(len)));
    window_power += window[i] * window[i];
  }

  const std::size_t bins = len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::vector<double> segment(len);
  std::vector<std::complex<double>> out;
  Eigen::FFT<double> fft;
  for (std::size_t s = 0; s < segments; ++s) {
    const auto first = rec.samples.begin() + static_cast<std::ptrdiff_t>(s * step);
    for (std::size_t i = 0; i < len; ++i) segment[i] = first[static_cast<std::ptrdiff_t>(i)] * window[i];
    fft.fwd(out, segment);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(out[k]);
  }

  SpectrumEstimate spec;
  spec.resolution = rec.sample_rate / static_cast<double>(len);
  spec.n_averages = static_cast<int>(segments);
  spec.frequencies.resize(bins);
  spec.psd.resize(bins);
  const double norm = 1.0 / (rec.sample_rate * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    spec.frequencies[k] = static_cast<double>(k) * spec.resolution;
    const double one_sided = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
    spec.psd[k] = one_sided * acc[k] * norm;
  }
  return spec;
}

namespace {

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  return 0.5 * (upper + *std::max_element(v.begin(), mid));
}

}  // namespace

double estimate_floor(const SpectrumEstimate& spec) {
  if (spec.psd.size() < 3) throw InvariantError("spectrum has too few bins for a floor estimate");
  return median(std::vector<double>(spec.psd.begin() + 1, spec.psd.end() - 1));
}

double estimate_floor(const SpectrumEstimate& spec, const SqueezingFeature& feature) {
  if (spec.psd.size() < 3) throw InvariantError("spectrum has too few bins for a floor estimate");
  std::vector<double> v;
  for (std::size_t k = 1; k + 1 < spec.psd.size(); ++k) {
    if (std::abs(spec.frequencies[k] - feature.center) > 16.0 * feature.half_width) {
      v.push_back(spec.psd[k]);
    }
  }
  if (v.size() < 64) return estimate_floor(spec);
  return median(std::move(v));
}

namespace {

constexpr int kSmoothingWidth = 16;
constexpr int kMinFeatureBins = 16;

}  // namespace

std::optional<SqueezingFeature> locate_squeezing_feature(const SpectrumEstimate& spec,
                                                         double floor_estimate) {
  if (!(floor_estimate > 0.0)) throw InvariantError("floor estimate must be positive");
  if (spec.n_averages < 1) throw InvariantError("spectrum has no averages");
  const int bins = static_cast<int>(spec.psd.size());
  if (bins < 2 * kSmoothingWidth) throw InvariantError("spectrum has too few bins");

  // The one-sided estimate holds half the density at DC and Nyquist. The
  // spectrum is reflected at both ends so a feature straddling DC keeps its
  // shape.
  auto raw = [&](int k) {
    if (k < 0) k = -k;
    if (k > bins - 1) k = 2 * (bins - 1) - k;
    const double edge = (k == 0 || k == bins - 1) ? 2.0 : 1.0;
    return edge * spec.psd[static_cast<std::size_t>(k)] - floor_estimate;
  };
  std::vector<double> smooth(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    double sum = 0.0;
    for (int j = -kSmoothingWidth / 2; j < kSmoothingWidth / 2; ++j) sum += raw(k + j);
    smooth[static_cast<std::size_t>(k)] = sum / kSmoothingWidth;
  }

  const double sigma_bin = floor_estimate / std::sqrt(static_cast<double>(spec.n_averages));
  const auto peak = std::max_element(smooth.begin(), smooth.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  });
  if (std::abs(*peak) <= 3.0 * sigma_bin) return std::nullopt;

  const double sign = *peak < 0.0 ? -1.0 : 1.0;
  const int k0 = static_cast<int>(peak - smooth.begin());
  const double half = 0.5 * std::abs(*peak);
  int lo = k0, hi = k0;
  while (lo > 0 && sign * smooth[static_cast<std::size_t>(lo - 1)] >= half) --lo;
  while (hi < bins - 1 && sign * smooth[static_cast<std::size_t>(hi + 1)] >= half) ++hi;
  const int half_width = std::max({k0 - lo, hi - k0, 1});
  if (2 * half_width < kMinFeatureBins) {
    throw InvariantError(fmt::format(
        "feature spans {} bins; at least {} are needed to locate it", 2 * half_width,
        kMinFeatureBins));
  }

  // Centroid of the deviation inside +-half_width, refined until it settles.
  double center = k0;
  for (int iter = 0; iter < 50; ++iter) {
    const int c = static_cast<int>(std::lround(center));
    double w_sum = 0.0, wk_sum = 0.0;
    for (int k = c - half_width; k <= c + half_width && k < bins; ++k) {
      const double w = std::max(0.0, sign * raw(k));
      w_sum += w;
      wk_sum += w * k;
    }
    if (!(w_sum > 0.0)) break;
    const double next = std::clamp(wk_sum / w_sum, 0.0, static_cast<double>(bins - 1));
    if (std::abs(next - center) < 1e-9) break;
    center = next;
  }

  // Extremum level from a local quadratic fit. The Hann kernel has a second
  // moment of 1/3 bin^2, so the expected estimate is S + S''/6; the fitted
  // curvature removes that term.
  const int reach = std::max(4, half_width / 4);
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (int k = static_cast<int>(std::lround(center)) - reach;
       k <= static_cast<int>(std::lround(center)) + reach; ++k) {
    const double x = (k - center) / reach;
    const Eigen::Vector3d basis(1.0, x, x * x);
    normal += basis * basis.transpose();
    rhs += basis * raw(k);
  }
  const Eigen::Vector3d coef = normal.ldlt().solve(rhs);
  double level = coef(0) - coef(2) / (3.0 * reach * reach) + floor_estimate;
  if (!(level > 0.0)) level = std::numeric_limits<double>::min();
  return SqueezingFeature{center * spec.resolution, to_db(level / floor_estimate),
                          half_width * spec.resolution};
}

SpectrumAnalysis analyze_spectrum(const SpectrumEstimate& spec) {
  SpectrumAnalysis out{estimate_floor(spec), std::nullopt};
  out.feature = locate_squeezing_feature(spec, out.floor);
  if (!out.feature) return out;
  const double refined = estimate_floor(spec, *out.feature);
  if (!(refined > 0.0)) return out;
  out.floor = refined;
  out.feature = locate_squeezing_feature(spec, refined);
  return out;
}

namespace {

void write_header(std::ostream& os, const std::vector<std::string>& header) {
  os << "# format: " << kFormatVersion << '\n';
  for (const auto& line : header) os << "# " << line << '\n';
}

}  // namespace

void write_spectrum_csv(std::ostream& os, const SpectrumEstimate& spec,
                        const std::vector<std::string>& header) {
  write_header(os, header);
  os << fmt::format("# resolution_hz: {:.17g}\n# n_averages: {}\n", spec.resolution,
                    spec.n_averages);
  os << "frequency_hz,psd_per_hz\n";
  for (std::size_t k = 0; k < spec.psd.size(); ++k) {
    os << fmt::format("{:.17g},{:.17g}\n", spec.frequencies[k], spec.psd[k]);
  }
}

void write_record_csv(std::ostream& os, const PhotocurrentRecord& rec,
                      const std::vector<std::string>& header) {
  write_header(os, header);
  os << fmt::format("# sample_rate_hz: {:.17g}\n# seed: {}\n", rec.sample_rate, rec.seed);
  os << "time_s,current_e0sq\n";
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    os << fmt::format("{:.17g},{:.17g}\n", static_cast<double>(i) / rec.sample_rate,
                      rec.samples[i]);
  }
}

nlohmann::ordered_json to_json(const SpectralModel& m) {
  return {{"center_frequency_hz", m.center_frequency},
          {"squeezing_bandwidth_hz", m.squeezing_bandwidth},
          {"noise_floor", m.noise_floor},
          {"feature_level", m.feature_level},
          {"profile", std::string(to_string(m.profile))}};
}

nlohmann::ordered_json to_json(const SpectrumEstimate& spec) {
  return {{"format", std::string(kFormatVersion)},
          {"resolution_hz", spec.resolution},
          {"n_averages", spec.n_averages},
          {"frequency_hz", spec.frequencies},
          {"psd_per_hz", spec.psd}};
}

}  // namespace blo
