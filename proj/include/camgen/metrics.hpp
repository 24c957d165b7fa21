// Copyright 2026 The camgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "camgen/error.hpp"
#include "camgen/fitting.hpp"
#include "camgen/model.hpp"
#include "camgen/trace.hpp"

namespace camgen {

/// Discrete probability distribution over an ordered support. Pairwise
/// metrics require identical supports.
class Pdf {
 public:
  Pdf() = default;

  static Pdf from_probs(std::vector<double> support, std::vector<double> probs,
                        double tolerance = 1e-9) {
    if (support.size() != probs.size())
      throw Error("pdf support and probabilities differ in length");
    if (support.empty()) throw Error("pdf must not be empty");
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw Error("pdf probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw Error("pdf probabilities sum to " + std::to_string(sum));
    Pdf pdf;
    pdf.support_ = std::move(support);
    pdf.probs_ = std::move(probs);
    return pdf;
  }

  static Pdf from_counts(std::vector<double> support,
                         const std::vector<std::uint64_t>& counts) {
    if (support.size() != counts.size())
      throw Error("pdf support and counts differ in length");
    if (support.empty()) throw Error("pdf must not be empty");
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw Error("pdf needs at least one observation");
    std::vector<double> probs;
    probs.reserve(counts.size());
    for (std::uint64_t c : counts)
      probs.push_back(static_cast<double>(c) / static_cast<double>(total));
    Pdf pdf;
    pdf.support_ = std::move(support);
    pdf.probs_ = std::move(probs);
    return pdf;
  }

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  bool same_support(const Pdf& other) const { return support_ == other.support_; }

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

/// Empirical PDF of a symbol stream over the full alphabet 1..|A|;
/// zero-frequency symbols are retained with probability 0.
inline Pdf joint_pdf(std::span<const Symbol> symbols, std::size_t alphabet_size) {
  if (symbols.empty()) throw Error("cannot build a pdf from an empty symbol list");
  if (alphabet_size < 1) throw Error("alphabet size must be >= 1");
  std::vector<std::uint64_t> counts(alphabet_size, 0);
  for (Symbol n : symbols) {
    if (n < 1 || n > alphabet_size)
      throw Error("symbol " + std::to_string(n) + " outside alphabet 1.." +
                  std::to_string(alphabet_size));
    ++counts[n - 1];
  }
  std::vector<double> support(alphabet_size);
  for (std::size_t k = 0; k < alphabet_size; ++k) support[k] = static_cast<double>(k + 1);
  return Pdf::from_counts(std::move(support), counts);
}

/// Marginal size PDF of a complete-mode joint PDF; support is S in bytes.
inline Pdf marginal_size_pdf(const Pdf& joint, const ModelSpec& spec) {
  if (spec.mode != ModelMode::Complete)
    throw Error("marginals are defined for complete-mode joints");
  if (joint.size() != spec.alphabet_size())
    throw Error("joint pdf does not match the spec alphabet");
  std::vector<double> probs(spec.sizes.cardinality(), 0.0);
  for (std::size_t k = 0; k < joint.size(); ++k) {
    const Symbol n = static_cast<Symbol>(k + 1);
    probs[symbol_to_size_index(n, spec.sizes.cardinality()) - 1] += joint.probs()[k];
  }
  std::vector<double> support;
  for (int b : spec.sizes.bytes()) support.push_back(static_cast<double>(b));
  return Pdf::from_probs(std::move(support), std::move(probs), 1e-6);
}

/// Marginal interval PDF of a complete-mode joint PDF; support is G in ms.
inline Pdf marginal_interval_pdf(const Pdf& joint, const ModelSpec& spec) {
  if (spec.mode != ModelMode::Complete)
    throw Error("marginals are defined for complete-mode joints");
  if (joint.size() != spec.alphabet_size())
    throw Error("joint pdf does not match the spec alphabet");
  std::vector<double> probs(spec.intervals.cardinality(), 0.0);
  for (std::size_t k = 0; k < joint.size(); ++k) {
    const Symbol n = static_cast<Symbol>(k + 1);
    probs[symbol_to_interval_index(n, spec.sizes.cardinality()) - 1] += joint.probs()[k];
  }
  std::vector<double> support;
  for (int g : spec.intervals.ms()) support.push_back(static_cast<double>(g));
  return Pdf::from_probs(std::move(support), std::move(probs), 1e-6);
}

/// Relative entropy D(P||Q) = sum_{P(a)>0} P(a) log(P(a)/Q(a)).
///
/// Terms with P(a) = 0 contribute nothing; P(a) > 0 with Q(a) = 0 yields
/// +infinity unless `smoothing` > 0, in which case Q is replaced by
/// (Q + eps) / normalization first. Natural log by default; pass
/// `log_base = 2.0` for bits.
inline double kl_divergence(const Pdf& p, const Pdf& q, double smoothing = 0.0,
                            double log_base = std::numbers::e) {
  if (!p.same_support(q)) throw Error("kl divergence requires a shared support");
  std::vector<double> qs = q.probs();
  if (smoothing > 0.0) {
    double sum = 0.0;
    for (double& v : qs) {
      v += smoothing;
      sum += v;
    }
    for (double& v : qs) v /= sum;
  }
  double nats = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double pk = p.probs()[k];
    if (pk <= 0.0) continue;
    if (qs[k] <= 0.0) return std::numeric_limits<double>::infinity();
    nats += pk * std::log(pk / qs[k]);
  }
  if (log_base != std::numbers::e) {
    if (!(log_base > 0.0) || log_base == 1.0) throw Error("invalid log base");
    nats /= std::log(log_base);
  }
  return nats;
}

/// Largest pointwise probability difference, delta(P,Q) = max_a |P(a)-Q(a)|
/// (the supremum convention, not the halved L1 form).
inline double total_variation(const Pdf& p, const Pdf& q) {
  if (!p.same_support(q)) throw Error("total variation requires a shared support");
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    worst = std::max(worst, std::abs(p.probs()[k] - q.probs()[k]));
  }
  return worst;
}

/// Pearson sample autocorrelation at lags 0..max_lag, biased (divide-by-n)
/// normalization; result[0] == 1.
inline std::vector<double> autocorrelation(std::span<const double> series, int max_lag) {
  if (max_lag < 0) throw Error("max lag must be >= 0");
  const std::size_t n = series.size();
  if (n <= static_cast<std::size_t>(max_lag))
    throw Error("series shorter than the requested lag range");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  double s0 = 0.0;
  for (double x : series) s0 += (x - mean) * (x - mean);
  if (s0 <= 0.0) throw Error("autocorrelation undefined for a constant series");
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  for (int lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < n; ++t) {
      s += (series[t] - mean) * (series[t + lag] - mean);
    }
    out[static_cast<std::size_t>(lag)] = s / s0;
  }
  return out;
}

/// Normalized cross-correlation at lags -max_lag..+max_lag; result index
/// `k + max_lag` holds lag k, where lag k correlates a[t+k] with b[t].
inline std::vector<double> cross_correlation(std::span<const double> a,
                                             std::span<const double> b, int max_lag) {
  if (max_lag < 0) throw Error("max lag must be >= 0");
  if (a.size() != b.size()) throw Error("cross-correlation requires equal lengths");
  const std::size_t n = a.size();
  if (n <= static_cast<std::size_t>(max_lag))
    throw Error("series shorter than the requested lag range");
  double ma = 0.0, mb = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    ma += a[t];
    mb += b[t];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double va = 0.0, vb = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    va += (a[t] - ma) * (a[t] - ma);
    vb += (b[t] - mb) * (b[t] - mb);
  }
  if (va <= 0.0 || vb <= 0.0)
    throw Error("cross-correlation undefined for a constant series");
  const double norm = std::sqrt(va) * std::sqrt(vb);
  std::vector<double> out(2 * static_cast<std::size_t>(max_lag) + 1);
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double s = 0.0;
    if (lag >= 0) {
      for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < n; ++t)
        s += (a[t + lag] - ma) * (b[t] - mb);
    } else {
      const std::size_t shift = static_cast<std::size_t>(-lag);
      for (std::size_t t = 0; t + shift < n; ++t)
        s += (a[t] - ma) * (b[t + shift] - mb);
    }
    out[static_cast<std::size_t>(lag + max_lag)] = s / norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation of a generated trace against a reference trace
// ---------------------------------------------------------------------------

struct ValidationOptions {
  int max_lag = 15;
  double kl_smoothing = 0.0;
  double kl_log_base = std::numbers::e;
  QuantizeOptions quantize;
};

/// Per-trace statistics. Correlations are computed on the physical series
/// (bytes and milliseconds) of the quantized symbols, not on symbol indices.
struct TraceStats {
  std::size_t events = 0;
  std::size_t symbols = 0;
  double jitter_std_ms = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> autocorr_size;      // lags 0..max_lag; empty if unmodeled
  std::vector<double> autocorr_interval;  // lags 0..max_lag; empty if unmodeled
  std::vector<double> crosscorr;          // lags -max_lag..max_lag; complete mode
};

struct ValidationReport {
  ModelMode mode = ModelMode::Complete;
  int order = 1;
  int max_lag = 15;
  double kl = 0.0;
  double kl_log_base = std::numbers::e;
  double kl_smoothing = 0.0;
  double tv = 0.0;
  TraceStats reference;
  TraceStats generated;
};

namespace detail {

inline TraceStats trace_stats(const QuantizedTrace& qt, int max_lag) {
  TraceStats st;
  st.events = qt.source_events;
  const std::vector<Symbol> symbols = qt.flattened();
  st.symbols = symbols.size();
  const ModelSpec& spec = qt.spec;
  std::vector<double> size_series, interval_series;
  if (spec.models_sizes()) {
    size_series.reserve(symbols.size());
    for (Symbol n : symbols)
      size_series.push_back(static_cast<double>(spec.size_bytes_of(n)));
    st.autocorr_size = autocorrelation(size_series, max_lag);
  }
  if (spec.models_intervals()) {
    interval_series.reserve(symbols.size());
    for (Symbol n : symbols)
      interval_series.push_back(static_cast<double>(spec.interval_ms_of(n)));
    st.autocorr_interval = autocorrelation(interval_series, max_lag);
    if (qt.residuals_ms.size() >= 2)
      st.jitter_std_ms = jitter_std_from_residuals(qt.residuals_ms);
  }
  if (spec.mode == ModelMode::Complete)
    st.crosscorr = cross_correlation(size_series, interval_series, max_lag);
  return st;
}

}  // namespace detail

/// Quantizes both traces under the model spec and compares them: KL and
/// total variation on the alphabet PDF (the joint PDF in complete mode, the
/// marginal in separate modes), plus per-trace correlation and jitter stats.
inline ValidationReport validate(const ModelSpec& spec,
                                 std::span<const CamEvent> reference,
                                 std::span<const CamEvent> generated,
                                 const ValidationOptions& options = {}) {
  const QuantizedTrace qref = quantize(reference, spec, options.quantize);
  const QuantizedTrace qgen = quantize(generated, spec, options.quantize);
  const std::vector<Symbol> ref_symbols = qref.flattened();
  const std::vector<Symbol> gen_symbols = qgen.flattened();
  const Pdf p = joint_pdf(ref_symbols, spec.alphabet_size());
  const Pdf q = joint_pdf(gen_symbols, spec.alphabet_size());

  ValidationReport report;
  report.mode = spec.mode;
  report.order = spec.order;
  report.max_lag = options.max_lag;
  report.kl_log_base = options.kl_log_base;
  report.kl_smoothing = options.kl_smoothing;
  report.kl = kl_divergence(p, q, options.kl_smoothing, options.kl_log_base);
  report.tv = total_variation(p, q);
  report.reference = detail::trace_stats(qref, options.max_lag);
  report.generated = detail::trace_stats(qgen, options.max_lag);
  return report;
}

}  // namespace camgen
