#include "idlab/textstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "idlab/errors.hpp"
#include "idlab/parallel.hpp"
#include "rng.hpp"

namespace idlab {

namespace {

// Keeps the three ablations on separate streams under one user seed.
constexpr std::uint64_t kPermuteStream = 1;
constexpr std::uint64_t kSwapStream = 2;
constexpr std::uint64_t kRandomStream = 3;

// Neumaier summation; long NLL streams otherwise drift by many ulps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::uint64_t sequence_seed(std::uint64_t seed, std::uint64_t stream, std::size_t i) {
  return detail::stream_seed(detail::stream_seed(seed, stream), i);
}

std::vector<TokenId> non_special_ids(const TokenDataset& d) {
  std::vector<TokenId> ids;
  for (TokenId v = 0; v < d.vocab_bound; ++v) {
    if (!d.special_tokens.contains(v)) ids.push_back(v);
  }
  return ids;
}

}  // namespace

void TokenDataset::validate() const {
  if (vocab_bound <= 0) throw ParameterError("vocab_bound must be positive");
  for (TokenId s : special_tokens) {
    if (s < 0 || s >= vocab_bound) {
      throw ParameterError("special token " + std::to_string(s) + " outside [0, vocab_bound)");
    }
  }
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].empty()) throw DataError("sequence " + std::to_string(i) + " is empty", i);
    for (TokenId t : sequences[i]) {
      if (t < 0 || t >= vocab_bound) {
        throw DataError("sequence " + std::to_string(i) + " has id " + std::to_string(t) +
                            " outside [0, " + std::to_string(vocab_bound) + ")",
                        i);
      }
    }
  }
}

TokenDataset chunk(const TokenDataset& dataset, std::size_t l_m) {
  if (l_m == 0) throw ParameterError("chunk length must be at least 1");
  TokenDataset out{{}, dataset.vocab_bound, dataset.special_tokens};
  for (const auto& seq : dataset.sequences) {
    for (std::size_t b = 0; b < seq.size(); b += l_m) {
      const std::size_t e = std::min(seq.size(), b + l_m);
      out.sequences.emplace_back(seq.begin() + static_cast<std::ptrdiff_t>(b),
                                 seq.begin() + static_cast<std::ptrdiff_t>(e));
    }
  }
  return out;
}

TokenDataset transform_permuted(const TokenDataset& dataset, std::uint64_t seed) {
  TokenDataset out = dataset;
  parallel_for(out.sequences.size(), [&](std::size_t i) {
    auto& seq = out.sequences[i];
    std::mt19937_64 rng(sequence_seed(seed, kPermuteStream, i));
    // Explicit Fisher-Yates; std::shuffle's draw pattern is library-specific.
    for (std::size_t j = seq.size(); j > 1; --j) {
      std::uniform_int_distribution<std::size_t> pick(0, j - 1);
      std::swap(seq[j - 1], seq[pick(rng)]);
    }
  });
  return out;
}

std::vector<TokenId> swap_permutation(const TokenDataset& dataset, std::uint64_t seed) {
  if (dataset.vocab_bound <= 0) throw ParameterError("vocab_bound must be positive");
  std::vector<TokenId> sigma(static_cast<std::size_t>(dataset.vocab_bound));
  std::iota(sigma.begin(), sigma.end(), TokenId{0});
  std::vector<TokenId> free = non_special_ids(dataset);
  std::vector<TokenId> image = free;
  std::mt19937_64 rng(detail::stream_seed(seed, kSwapStream));
  for (std::size_t j = image.size(); j > 1; --j) {
    std::uniform_int_distribution<std::size_t> pick(0, j - 1);
    std::swap(image[j - 1], image[pick(rng)]);
  }
  for (std::size_t j = 0; j < free.size(); ++j) {
    sigma[static_cast<std::size_t>(free[j])] = image[j];
  }
  return sigma;
}

TokenDataset transform_swapped(const TokenDataset& dataset, std::uint64_t seed, bool inverse) {
  dataset.validate();
  std::vector<TokenId> sigma = swap_permutation(dataset, seed);
  if (inverse) {
    std::vector<TokenId> inv(sigma.size());
    for (std::size_t v = 0; v < sigma.size(); ++v) {
      inv[static_cast<std::size_t>(sigma[v])] = static_cast<TokenId>(v);
    }
    sigma = std::move(inv);
  }
  TokenDataset out = dataset;
  parallel_for(out.sequences.size(), [&](std::size_t i) {
    for (TokenId& t : out.sequences[i]) t = sigma[static_cast<std::size_t>(t)];
  });
  return out;
}

TokenDataset transform_random(const TokenDataset& dataset, std::uint64_t seed) {
  dataset.validate();
  const std::vector<TokenId> pool = non_special_ids(dataset);
  if (pool.empty()) throw ParameterError("no non-special ids to draw from");
  TokenDataset out = dataset;
  parallel_for(out.sequences.size(), [&](std::size_t i) {
    std::mt19937_64 rng(sequence_seed(seed, kRandomStream, i));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (TokenId& t : out.sequences[i]) {
      if (!dataset.special_tokens.contains(t)) t = pool[pick(rng)];
    }
  });
  return out;
}

std::map<TokenId, std::size_t> token_frequencies(const TokenDataset& dataset) {
  std::map<TokenId, std::size_t> freq;
  for (const auto& seq : dataset.sequences) {
    for (TokenId t : seq) ++freq[t];
  }
  return freq;
}

ShallowDescriptors descriptors(const TokenDataset& dataset) {
  ShallowDescriptors d;
  const auto freq = token_frequencies(dataset);
  d.vocab_size = freq.size();
  d.n_sequences = dataset.sequences.size();
  std::vector<std::size_t> counts;
  counts.reserve(freq.size());
  for (const auto& [id, c] : freq) {
    counts.push_back(c);
    d.n_tokens += c;
  }
  // Summing over sorted counts makes H_V a function of the count multiset
  // alone, so relabelings reproduce it bit for bit.
  std::sort(counts.begin(), counts.end());
  double h = 0.0;
  const double total = static_cast<double>(d.n_tokens);
  for (std::size_t c : counts) {
    const double f = static_cast<double>(c) / total;
    h -= f * std::log2(f);
  }
  d.vocab_entropy = std::max(0.0, h);
  d.avg_seq_len = d.n_sequences ? total / static_cast<double>(d.n_sequences) : 0.0;
  return d;
}

double sequence_ppl(const std::vector<double>& nll) {
  if (nll.empty()) throw EmptyError("no scored tokens");
  CompensatedSum sum;
  for (std::size_t j = 0; j < nll.size(); ++j) {
    if (!(nll[j] >= 0.0) || !std::isfinite(nll[j])) {
      throw DataError("nll at position " + std::to_string(j) + " is negative or non-finite", j);
    }
    sum.add(nll[j]);
  }
  return std::exp(sum.value() / static_cast<double>(nll.size()));
}

DatasetPpl dataset_ppl(const NllRecord& records) {
  DatasetPpl out;
  CompensatedSum ppl_sum, nll_sum, bits;
  for (std::size_t i = 0; i < records.sequences.size(); ++i) {
    const auto& seq = records.sequences[i];
    if (seq.empty()) continue;
    try {
      ppl_sum.add(sequence_ppl(seq));
    } catch (const DataError& e) {
      throw DataError("sequence " + std::to_string(i) + ": " + e.what(), i);
    }
    for (double v : seq) {
      nll_sum.add(v);
      // Per-token conversion: a ln 2 nat token is exactly one bit.
      bits.add(v / std::numbers::ln2);
    }
    ++out.n_sequences;
    out.n_scored += seq.size();
  }
  if (out.n_sequences == 0) throw EmptyError("no sequence has scored tokens");
  out.avg_ppl = ppl_sum.value() / static_cast<double>(out.n_sequences);
  out.coding_length_bits = bits.value();
  out.token_weighted_ppl = std::exp(nll_sum.value() / static_cast<double>(out.n_scored));
  return out;
}

void AdaptationLog::validate() const {
  if (steps.size() != eval_ppl.size()) throw DataError("steps and eval_ppl differ in length");
  if (steps.empty()) throw EmptyError("adaptation log has no evaluations");
  if (eval_interval <= 0) throw DataError("eval_interval must be positive");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (t > 0 && steps[t] <= steps[t - 1]) {
      throw DataError("steps must be strictly increasing (row " + std::to_string(t) + ")", t);
    }
    if (!(eval_ppl[t] > 0.0) || !std::isfinite(eval_ppl[t])) {
      throw DataError("eval_ppl must be positive and finite (row " + std::to_string(t) + ")", t);
    }
  }
}

AdaptationMetrics adaptation_metrics(const AdaptationLog& log, std::size_t patience) {
  log.validate();
  if (patience == 0) throw ParameterError("patience must be at least 1");
  AdaptationMetrics m;
  const auto& v = log.eval_ppl;
  double best = v[0];
  std::size_t stale = 0;
  m.T = v.size();
  for (std::size_t t = 1; t < v.size(); ++t) {
    if (v[t] < best) {
      best = v[t];
      stale = 0;
    } else if (++stale == patience) {
      m.T = t + 1;
      m.converged = true;
      break;
    }
  }
  double sum = 0.0;
  m.final_ppl = v[0];
  for (std::size_t t = 0; t < m.T; ++t) {
    sum += v[t];
    m.final_ppl = std::min(m.final_ppl, v[t]);
  }
  m.last_ppl = v[m.T - 1];
  m.sample_complexity = sum / static_cast<double>(m.T);
  m.iterations = static_cast<std::int64_t>(m.T) * log.eval_interval;
  return m;
}

}  // namespace idlab
