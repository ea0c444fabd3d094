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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "blo/numeric.hpp"

namespace blo::fock {

namespace {

using Complex = std::complex<double>;

Eigen::Index checked_dimension(std::span<const int> cutoffs, Eigen::Index max_dimension) {
  Eigen::Index dim = 1;
  for (int n : cutoffs) {
    if (n < 0) throw InvariantError("mode cutoffs must be non-negative");
    if (dim > max_dimension / (n + 1)) {
      throw InvariantError(
          fmt::format("Fock dimension exceeds the guard of {} amplitudes", max_dimension));
    }
    dim *= n + 1;
  }
  return dim;
}

// exp(-i H) for Hermitian H.
Eigen::MatrixXcd unitary_from_hermitian(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXcd phases =
      solver.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, -l); });
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// Applies `op` (a (N+1)x(N+1) matrix) along `mode` of `state`, whose cutoff for
// that mode must already be N.
FockStateVector apply_single_mode(const FockStateVector& state, int mode,
                                  const Eigen::MatrixXcd& op) {
  const int dim = state.cutoff(mode) + 1;
  const Eigen::Index stride = state.stride(mode);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.dimension());
  Eigen::VectorXcd fiber(dim);
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    if (state.occupation(i, mode) != 0) continue;
    for (int n = 0; n < dim; ++n) fiber(n) = state.amplitudes()(i + n * stride);
    const Eigen::VectorXcd mapped = op * fiber;
    for (int n = 0; n < dim; ++n) out(i + n * stride) = mapped(n);
  }
  return FockStateVector({state.cutoffs().begin(), state.cutoffs().end()}, std::move(out));
}

FockStateVector with_cutoffs(const FockStateVector& state, std::vector<int> cutoffs) {
  const Eigen::Index dim = checked_dimension(cutoffs, kDefaultMaxDimension * 4);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  std::vector<Eigen::Index> strides(cutoffs.size());
  Eigen::Index s = 1;
  for (std::size_t k = cutoffs.size(); k-- > 0;) {
    strides[k] = s;
    s *= cutoffs[k] + 1;
  }
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    Eigen::Index j = 0;
    for (int k = 0; k < state.num_modes(); ++k) {
      const int n = state.occupation(i, k);
      if (n > cutoffs[static_cast<std::size_t>(k)]) {
        throw InvariantError("re-embedding would discard amplitudes");
      }
      j += n * strides[static_cast<std::size_t>(k)];
    }
    out(j) = state.amplitudes()(i);
  }
  return FockStateVector(std::move(cutoffs), std::move(out));
}

// <psi| ops |psi> / <psi|psi> on a state whose cutoffs already accommodate
// every raising operator in `ops`.
Complex raw_expectation(const FockStateVector& state, std::span<const LadderOp> ops) {
  Eigen::VectorXcd ket = state.amplitudes();
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) ket = apply_ladder(state, ket, *it);
  return state.amplitudes().dot(ket) / state.norm_squared();
}

}  // namespace

// ---------------------------------------------------------------------------
// FockStateVector

FockStateVector::FockStateVector(std::vector<int> cutoffs, Eigen::VectorXcd amplitudes)
    : cutoffs_(std::move(cutoffs)), amplitudes_(std::move(amplitudes)) {
  if (cutoffs_.empty()) throw InvariantError("a Fock state needs at least one mode");
  const Eigen::Index dim = checked_dimension(cutoffs_, std::numeric_limits<Eigen::Index>::max());
  if (dim != amplitudes_.size()) {
    throw InvariantError(fmt::format("amplitude count {} does not match the basis dimension {}",
                                     amplitudes_.size(), dim));
  }
  if (norm_squared() > 1.0 + 1e-10) {
    throw InvariantError(fmt::format("state norm^2 {:.17g} exceeds 1", norm_squared()));
  }
  strides_.resize(cutoffs_.size());
  Eigen::Index s = 1;
  for (std::size_t k = cutoffs_.size(); k-- > 0;) {
    strides_[k] = s;
    s *= cutoffs_[k] + 1;
  }
}

Eigen::Index FockStateVector::index(std::span<const int> occupation) const {
  if (occupation.size() != cutoffs_.size()) throw InvariantError("occupation has wrong arity");
  Eigen::Index i = 0;
  for (std::size_t k = 0; k < occupation.size(); ++k) {
    if (occupation[k] < 0 || occupation[k] > cutoffs_[k]) {
      throw InvariantError("occupation outside the truncated basis");
    }
    i += occupation[k] * strides_[k];
  }
  return i;
}

// ---------------------------------------------------------------------------
// State construction

int tmss_cutoff_for_leakage(double s, double leakage) {
  if (!(leakage > 0.0 && leakage < 1.0)) throw InvariantError("leakage target must lie in (0, 1)");
  const double th = std::tanh(s);
  if (th == 0.0) return 1;
  if (th >= 1.0) throw InvariantError("squeezing too strong for a finite Fock truncation");
  const double n = std::log(leakage) / (2.0 * std::log(th)) - 1.0;
  return std::max(1, static_cast<int>(std::ceil(n - 1e-12)));
}

FockStateVector build_tmss(const SqueezeParams& p, int cutoff) {
  if (cutoff < 1) throw InvariantError("TMSS cutoff must be at least 1");
  std::vector<int> cutoffs{cutoff, cutoff};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(checked_dimension(cutoffs, kDefaultMaxDimension));
  const Complex ratio = -std::polar(std::tanh(p.s()), p.theta());
  Complex c = 1.0 / std::cosh(p.s());
  for (int n = 0; n <= cutoff; ++n) {
    amps(n * (cutoff + 1) + n) = c;
    c *= ratio;
  }
  return FockStateVector(std::move(cutoffs), std::move(amps));
}

FockStateVector build_tmss(const SqueezeParams& p, const TruncationPolicy& policy) {
  int cutoff = 0;
  if (policy.cutoff) {
    cutoff = *policy.cutoff;
    if (policy.target_leakage) {
      const double leak = std::pow(std::tanh(p.s()), 2.0 * (cutoff + 1));
      if (leak > *policy.target_leakage) {
        throw InvariantError(fmt::format(
            "cutoff {} leaks {:.3g} > {:.3g}; a cutoff of at least {} is required", cutoff, leak,
            *policy.target_leakage, tmss_cutoff_for_leakage(p.s(), *policy.target_leakage)));
      }
    }
  } else if (policy.target_leakage) {
    cutoff = tmss_cutoff_for_leakage(p.s(), *policy.target_leakage);
  } else {
    throw InvariantError("truncation policy needs a cutoff or a target leakage");
  }
  const std::vector<int> dims{cutoff, cutoff};
  checked_dimension(dims, policy.max_dimension);
  return build_tmss(p, cutoff);
}

FockStateVector build_tmss_by_generator(const SqueezeParams& p, int cutoff) {
  if (cutoff < 1) throw InvariantError("TMSS cutoff must be at least 1");
  // The generator only connects |n, n> to |n +- 1, n +- 1>, so the pair ladder
  // is an exact invariant subspace. It is enlarged until the amplitude at its
  // top is far below double precision.
  const double th = std::tanh(p.s());
  int ladder = cutoff + 1;
  if (th > 0.0) {
    ladder = std::max(ladder, static_cast<int>(std::ceil(std::log(1e-20) / std::log(th))));
  }
  ladder += 30;
  if (ladder > 4000) throw InvariantError("squeezing too strong for the generator route");

  const Complex xi = std::polar(p.s(), p.theta());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ladder, ladder);
  // K = xi^* a+ a- - xi a+^dag a-^dag is anti-Hermitian; exp(K) = exp(-iH), H = iK.
  for (int n = 0; n + 1 < ladder; ++n) {
    const Complex down = std::conj(xi) * static_cast<double>(n + 1);  // <n|K|n+1>
    const Complex up = -xi * static_cast<double>(n + 1);              // <n+1|K|n>
    h(n, n + 1) = Complex(0, 1) * down;
    h(n + 1, n) = Complex(0, 1) * up;
  }
  const Eigen::VectorXcd pair = unitary_from_hermitian(h).col(0);

  std::vector<int> cutoffs{cutoff, cutoff};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(checked_dimension(cutoffs, kDefaultMaxDimension));
  for (int n = 0; n <= cutoff; ++n) amps(n * (cutoff + 1) + n) = pair(n);
  return FockStateVector(std::move(cutoffs), std::move(amps));
}

int coherent_cutoff_rule(double amplitude) {
  return static_cast<int>(std::ceil(amplitude * amplitude + 8.0 * amplitude + 10.0));
}

FockStateVector build_coherent_product(std::span<const CoherentTone> tones,
                                       std::optional<int> cutoff, Eigen::Index max_dimension) {
  if (tones.empty()) throw InvariantError("need at least one coherent tone");
  std::vector<int> cutoffs;
  for (const auto& tone : tones) {
    if (!std::isfinite(tone.amplitude) || tone.amplitude < 0.0) {
      throw InvariantError("coherent amplitudes must be finite and >= 0");
    }
    cutoffs.push_back(cutoff ? *cutoff : coherent_cutoff_rule(tone.amplitude));
  }
  checked_dimension(cutoffs, max_dimension);

  Eigen::VectorXcd amps = Eigen::VectorXcd::Ones(1);
  for (std::size_t k = 0; k < tones.size(); ++k) {
    const Complex beta = std::polar(tones[k].amplitude, tones[k].phase);
    Eigen::VectorXcd single(cutoffs[k] + 1);
    single(0) = std::exp(-0.5 * tones[k].amplitude * tones[k].amplitude);
    for (int n = 1; n <= cutoffs[k]; ++n) single(n) = single(n - 1) * beta / std::sqrt(double(n));
    const double leak = 1.0 - single.squaredNorm();
    if (leak > 1e-8) {
      throw InvariantError(fmt::format(
          "coherent tone |b| = {} leaks {:.3g} at cutoff {}; use at least {}", tones[k].amplitude,
          leak, cutoffs[k], coherent_cutoff_rule(tones[k].amplitude)));
    }
    Eigen::VectorXcd next(amps.size() * single.size());
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
      next.segment(i * single.size(), single.size()) = amps(i) * single;
    }
    amps = std::move(next);
  }
  return FockStateVector(std::move(cutoffs), std::move(amps));
}

FockStateVector vacuum(int num_modes, int cutoff) {
  if (num_modes < 1) throw InvariantError("need at least one mode");
  std::vector<int> cutoffs(static_cast<std::size_t>(num_modes), cutoff);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(checked_dimension(cutoffs, kDefaultMaxDimension));
  amps(0) = 1.0;
  return FockStateVector(std::move(cutoffs), std::move(amps));
}

FockStateVector tensor_product(const FockStateVector& a, const FockStateVector& b) {
  std::vector<int> cutoffs(a.cutoffs().begin(), a.cutoffs().end());
  cutoffs.insert(cutoffs.end(), b.cutoffs().begin(), b.cutoffs().end());
  checked_dimension(cutoffs, kDefaultMaxDimension);
  Eigen::VectorXcd amps(a.dimension() * b.dimension());
  for (Eigen::Index i = 0; i < a.dimension(); ++i) {
    amps.segment(i * b.dimension(), b.dimension()) = a.amplitudes()(i) * b.amplitudes();
  }
  return FockStateVector(std::move(cutoffs), std::move(amps));
}

FockStateVector padded(const FockStateVector& state, int extra) {
  if (extra < 0) throw InvariantError("padding must be non-negative");
  std::vector<int> cutoffs(state.cutoffs().begin(), state.cutoffs().end());
  for (int& n : cutoffs) n += extra;
  return with_cutoffs(state, std::move(cutoffs));
}

// ---------------------------------------------------------------------------
// Operators and moments

Eigen::VectorXcd apply_ladder(const FockStateVector& basis, const Eigen::VectorXcd& amplitudes,
                              LadderOp op) {
  if (op.mode < 0 || op.mode >= basis.num_modes()) throw InvariantError("ladder mode out of range");
  const Eigen::Index stride = basis.stride(op.mode);
  const int top = basis.cutoff(op.mode);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(amplitudes.size());
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    const Complex a = amplitudes(i);
    if (a == Complex(0.0, 0.0)) continue;
    const int n = basis.occupation(i, op.mode);
    if (op.kind == Ladder::Lower) {
      if (n > 0) out(i - stride) += std::sqrt(double(n)) * a;
    } else if (n < top) {
      out(i + stride) += std::sqrt(double(n + 1)) * a;
    }
  }
  return out;
}

std::complex<double> expectation(const FockStateVector& state, std::span<const LadderOp> ops) {
  const auto raises = std::count_if(ops.begin(), ops.end(),
                                    [](const LadderOp& op) { return op.kind == Ladder::Raise; });
  if (raises == 0) return raw_expectation(state, ops);
  return raw_expectation(padded(state, static_cast<int>(raises)), ops);
}

double mean_photon_number(const FockStateVector& state, int mode) {
  const LadderOp ops[] = {{mode, Ladder::Raise}, {mode, Ladder::Lower}};
  return expectation(state, ops).real();
}

std::complex<double> mean_amplitude(const FockStateVector& state, int mode) {
  const LadderOp ops[] = {{mode, Ladder::Lower}};
  return expectation(state, ops);
}

namespace {

// Transfer from (a_1, a_1^dag, a_2, a_2^dag, ...) to (x_1, p_1, x_2, p_2, ...).
Eigen::MatrixXcd quadrature_transfer(int modes) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    t(2 * k, 2 * k) = 0.5;
    t(2 * k, 2 * k + 1) = 0.5;
    t(2 * k + 1, 2 * k) = Complex(0, -0.5);
    t(2 * k + 1, 2 * k + 1) = Complex(0, 0.5);
  }
  return t;
}

LadderOp ladder_of(int a) { return {a / 2, (a % 2 == 0) ? Ladder::Lower : Ladder::Raise}; }

}  // namespace

Eigen::VectorXd quadrature_means(const FockStateVector& state) {
  const FockStateVector work = padded(state, 1);
  const int m = state.num_modes();
  Eigen::VectorXcd mu(2 * m);
  for (int a = 0; a < 2 * m; ++a) {
    const LadderOp ops[] = {ladder_of(a)};
    mu(a) = raw_expectation(work, ops);
  }
  return (quadrature_transfer(m) * mu).real();
}

Eigen::MatrixXd quadrature_covariance(const FockStateVector& state) {
  const FockStateVector work = padded(state, 2);
  const int m = state.num_modes();
  Eigen::VectorXcd mu(2 * m);
  Eigen::MatrixXcd g(2 * m, 2 * m);
  for (int a = 0; a < 2 * m; ++a) {
    const LadderOp single[] = {ladder_of(a)};
    mu(a) = raw_expectation(work, single);
    for (int b = 0; b < 2 * m; ++b) {
      const LadderOp ops[] = {ladder_of(a), ladder_of(b)};
      g(a, b) = raw_expectation(work, ops);
    }
  }
  const Eigen::MatrixXcd t = quadrature_transfer(m);
  const Eigen::MatrixXcd second = t * g * t.transpose();
  const Eigen::VectorXd mean = (t * mu).real();
  return (0.5 * (second + second.transpose())).real() - mean * mean.transpose();
}

FockStateVector apply_beam_splitter(const FockStateVector& state, int m1, int m2,
                                    const BeamSplitterSpec& bs) {
  if (m1 == m2 || m1 < 0 || m2 < 0 || m1 >= state.num_modes() || m2 >= state.num_modes()) {
    throw InvariantError("beam splitter needs two distinct modes of the state");
  }
  // Generator G = log [[t, r], [r, t]].
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> eig(bs.transfer());
  const Eigen::Vector2cd logs = eig.eigenvalues().unaryExpr([](Complex z) { return std::log(z); });
  const Eigen::Matrix2cd gen =
      eig.eigenvectors() * logs.asDiagonal() * eig.eigenvectors().inverse();

  const int n1 = state.cutoff(m1), n2 = state.cutoff(m2), total = n1 + n2;
  std::vector<int> cutoffs(state.cutoffs().begin(), state.cutoffs().end());
  cutoffs[static_cast<std::size_t>(m1)] = total;
  cutoffs[static_cast<std::size_t>(m2)] = total;
  const FockStateVector out_basis = with_cutoffs(state, cutoffs);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(out_basis.dimension());

  // One unitary block per total photon number n, basis |k, n - k>.
  std::vector<Eigen::MatrixXcd> blocks;
  for (int n = 0; n <= total; ++n) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
      a(k, k) = gen(0, 0) * double(k) + gen(1, 1) * double(n - k);
      if (k < n) a(k + 1, k) += gen(0, 1) * std::sqrt(double((k + 1) * (n - k)));
      if (k > 0) a(k - 1, k) += gen(1, 0) * std::sqrt(double(k * (n - k + 1)));
    }
    // exp(A) = exp(-iH) with H = iA Hermitian.
    Eigen::MatrixXcd h = Complex(0, 1) * a;
    h = (0.5 * (h + h.adjoint())).eval();
    blocks.push_back(unitary_from_hermitian(h));
  }

  const Eigen::Index s1 = state.stride(m1), s2 = state.stride(m2);
  const Eigen::Index o1 = out_basis.stride(m1), o2 = out_basis.stride(m2);
  for (Eigen::Index base = 0; base < state.dimension(); ++base) {
    if (state.occupation(base, m1) != 0 || state.occupation(base, m2) != 0) continue;
    Eigen::Index out_base = 0;
    for (int k = 0; k < state.num_modes(); ++k) {
      if (k != m1 && k != m2) out_base += state.occupation(base, k) * out_basis.stride(k);
    }
    for (int n = 0; n <= total; ++n) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
      bool any = false;
      for (int k = 0; k <= n; ++k) {
        if (k <= n1 && n - k <= n2) {
          v(k) = state.amplitudes()(base + k * s1 + (n - k) * s2);
          any = any || v(k) != Complex(0.0, 0.0);
        }
      }
      if (!any) continue;
      const Eigen::VectorXcd w = blocks[static_cast<std::size_t>(n)] * v;
      for (int k = 0; k <= n; ++k) out(out_base + k * o1 + (n - k) * o2) = w(k);
    }
  }
  return FockStateVector(std::move(cutoffs), std::move(out));
}

FockStateVector apply_displacement(const FockStateVector& state, int mode,
                                   std::complex<double> beta) {
  if (mode < 0 || mode >= state.num_modes()) throw InvariantError("displacement mode out of range");
  std::vector<int> cutoffs(state.cutoffs().begin(), state.cutoffs().end());
  const int top = cutoffs[static_cast<std::size_t>(mode)] + coherent_cutoff_rule(std::abs(beta));
  cutoffs[static_cast<std::size_t>(mode)] = top;
  const FockStateVector work = with_cutoffs(state, cutoffs);

  // K = beta a^dag - beta^* a, exp(K) = exp(-iH) with H = iK.
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(top + 1, top + 1);
  for (int n = 0; n < top; ++n) {
    const double amp = std::sqrt(double(n + 1));
    h(n + 1, n) = Complex(0, 1) * beta * amp;
    h(n, n + 1) = Complex(0, 1) * (-std::conj(beta)) * amp;
  }
  return apply_single_mode(work, mode, unitary_from_hermitian(h));
}

// ---------------------------------------------------------------------------
// Difference-signal oracle

namespace {

struct PortOp {
  Port port;
  LadderOp op;
};

class MomentCache {
 public:
  MomentCache(const FockStateVector& signal, const FockStateVector& lo)
      : signal_(signal), lo_(lo) {}

  // Operators on different ports commute, so the expectation factorises into
  // an ordered signal-port string times an ordered LO-port string.
  Complex operator()(std::span<const PortOp> ops) {
    std::vector<LadderOp> sig, loc;
    for (const auto& o : ops) (o.port == Port::Signal ? sig : loc).push_back(o.op);
    return lookup(signal_, signal_cache_, sig) * lookup(lo_, lo_cache_, loc);
  }

 private:
  static Complex lookup(const FockStateVector& state, std::map<std::vector<int>, Complex>& cache,
                        const std::vector<LadderOp>& ops) {
    if (ops.empty()) return 1.0;
    std::vector<int> key;
    key.reserve(ops.size());
    for (const auto& o : ops) key.push_back(2 * o.mode + (o.kind == Ladder::Raise ? 1 : 0));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Complex v = raw_expectation(state, ops);
    cache.emplace(std::move(key), v);
    return v;
  }

  const FockStateVector& signal_;
  const FockStateVector& lo_;
  std::map<std::vector<int>, Complex> signal_cache_;
  std::map<std::vector<int>, Complex> lo_cache_;
};

struct Bilinear {
  std::size_t p, q;  // m_p^dag m_q
  Complex coeff;
  double frequency;
};

}  // namespace

OracleResult oracle_difference_variance(const FockStateVector& signal, const FockStateVector& lo,
                                        const ModeFrequencyMap& map, const FrequencyPlan& fp,
                                        const OracleOptions& options) {
  if (signal.leakage() > options.max_leakage || lo.leakage() > options.max_leakage) {
    throw InvariantError(fmt::format(
        "input truncation leakage too large for a reliable variance (signal {:.3g}, LO {:.3g})",
        signal.leakage(), lo.leakage()));
  }
  if (map.modes.empty()) throw InvariantError("mode map is empty");
  for (const auto& m : map.modes) {
    const int limit = (m.port == Port::Signal) ? signal.num_modes() : lo.num_modes();
    if (m.index < 0 || m.index >= limit) {
      throw InvariantError(fmt::format("mode '{}' does not exist in its port state", m.label));
    }
  }
  const double bandwidth = options.bandwidth.value_or(0.25 * fp.delta());
  const double t = options.time;

  // I12 is a sum of four raising/lowering operators at most per mode.
  const FockStateVector sig = padded(signal, 4);
  const FockStateVector loc = padded(lo, 4);
  MomentCache moment(sig, loc);

  // n(d1) - n(d2) = sum_pq C_pq m_p^dag m_q.
  const Complex bt = options.beam_splitter.t(), br = options.beam_splitter.r();
  std::vector<Bilinear> terms;
  for (std::size_t p = 0; p < map.modes.size(); ++p) {
    for (std::size_t q = 0; q < map.modes.size(); ++q) {
      auto w1 = [&](std::size_t k) { return map.modes[k].port == Port::Signal ? bt : br; };
      auto w2 = [&](std::size_t k) { return map.modes[k].port == Port::Signal ? br : bt; };
      const Complex c = std::conj(w1(p)) * w1(q) - std::conj(w2(p)) * w2(q);
      if (std::abs(c) < 1e-14) continue;
      terms.push_back({p, q, c,
                       map.modes[p].angular_frequency - map.modes[q].angular_frequency});
    }
  }
  auto port_op = [&](std::size_t k, Ladder kind) {
    return PortOp{map.modes[k].port, {map.modes[k].index, kind}};
  };

  std::vector<std::pair<Complex, double>> first;  // components of <I12>
  for (const auto& b : terms) {
    const PortOp ops[] = {port_op(b.p, Ladder::Raise), port_op(b.q, Ladder::Lower)};
    first.emplace_back(b.coeff * moment(ops), b.frequency);
  }

  CompensatedSum<Complex> second, mean;
  for (const auto& x : terms) {
    for (const auto& y : terms) {
      const double nu = x.frequency + y.frequency;
      if (std::abs(nu) > bandwidth) continue;
      const PortOp ops[] = {port_op(x.p, Ladder::Raise), port_op(x.q, Ladder::Lower),
                            port_op(y.p, Ladder::Raise), port_op(y.q, Ladder::Lower)};
      second.add(x.coeff * y.coeff * moment(ops) * std::polar(1.0, nu * t));
    }
  }
  for (const auto& [c1, f1] : first) {
    if (std::abs(f1) <= bandwidth) mean.add(c1 * std::polar(1.0, f1 * t));
    for (const auto& [c2, f2] : first) {
      const double nu = f1 + f2;
      if (std::abs(nu) > bandwidth) continue;
      second.add(-c1 * c2 * std::polar(1.0, nu * t));
    }
  }
  return {second.value().real(), mean.value().real(), signal.leakage(), lo.leakage()};
}

OracleSetup standard_setup(const SqueezeParams& p, const LoTone& lo, const FrequencyPlan& fp,
                           double tmss_leakage) {
  if (fp.is_bichromatic()) throw InvariantError("standard setup needs a single-tone plan");
  TruncationPolicy policy;
  policy.target_leakage = tmss_leakage;
  const CoherentTone tone[] = {{lo.amplitude(), lo.phase()}};
  ModeFrequencyMap map;
  map.modes = {{"a+", Port::Signal, 0, fp.delta()},
               {"a-", Port::Signal, 1, 0.0},
               {"b", Port::LocalOscillator, 0, 0.5 * fp.delta()}};
  return {build_tmss(p, policy), build_coherent_product(tone), std::move(map)};
}

OracleSetup bichromatic_setup(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                              const FrequencyPlan& fp, double tmss_leakage) {
  if (!fp.is_bichromatic()) throw InvariantError("bichromatic setup needs a two-tone plan");
  TruncationPolicy policy;
  policy.target_leakage = tmss_leakage;
  FockStateVector signal = build_tmss(p, policy);

  const double d = fp.delta(), d1 = fp.delta1(), d2 = fp.delta2();
  ModeFrequencyMap map;
  map.modes = {{"a+", Port::Signal, 0, d}, {"a-", Port::Signal, 1, 0.0}};
  switch (classify_image_band_case(fp)) {
    case ImageBandCase::NoImageBands:
      break;
    case ImageBandCase::SharedImageBand:
      signal = tensor_product(signal, vacuum(1));
      map.modes.push_back({"a_v", Port::Signal, 2, 2.0 * d1});
      break;
    case ImageBandCase::TwoImageBands:
      signal = tensor_product(signal, vacuum(2));
      map.modes.push_back({"a_v-", Port::Signal, 2, 2.0 * d1});
      map.modes.push_back({"a_v+", Port::Signal, 3, d + 2.0 * d2});
      break;
  }
  map.modes.push_back({"b1", Port::LocalOscillator, 0, d1});
  map.modes.push_back({"b2", Port::LocalOscillator, 1, d + d2});
  const CoherentTone tones[] = {{lo1.amplitude(), lo1.phase()}, {lo2.amplitude(), lo2.phase()}};
  return {std::move(signal), build_coherent_product(tones), std::move(map)};
}

}  // namespace blo::fock
