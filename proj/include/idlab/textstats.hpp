#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace idlab {

using TokenId = std::int64_t;

/// Sequences of token ids. Every id lies in [0, vocab_bound) and every
/// sequence is non-empty; special tokens are left alone by the ablations.
struct TokenDataset {
  std::vector<std::vector<TokenId>> sequences;
  TokenId vocab_bound = 0;
  std::set<TokenId> special_tokens;

  /// Throws DataError (carrying the sequence index) on a violation and
  /// ParameterError on a bad vocab bound or special token.
  void validate() const;

  friend bool operator==(const TokenDataset&, const TokenDataset&) = default;
};

/// Greedy split of every sequence into pieces of at most l_m tokens.
TokenDataset chunk(const TokenDataset& dataset, std::size_t l_m);

/// Uniform shuffle of each sequence; sequence i draws from its own stream.
TokenDataset transform_permuted(const TokenDataset& dataset, std::uint64_t seed);

/// Global bijection on the non-special ids, identity on special ids.
/// Indexed by id; size vocab_bound.
std::vector<TokenId> swap_permutation(const TokenDataset& dataset, std::uint64_t seed);

/// Maps every token through swap_permutation(seed), or through its inverse.
TokenDataset transform_swapped(const TokenDataset& dataset, std::uint64_t seed,
                               bool inverse = false);

/// Replaces every non-special token by a uniform non-special id. Throws
/// ParameterError when every id is special.
TokenDataset transform_random(const TokenDataset& dataset, std::uint64_t seed);

struct ShallowDescriptors {
  std::size_t vocab_size = 0;    // V
  double vocab_entropy = 0.0;    // H_V, bits
  double avg_seq_len = 0.0;      // tokens per sequence
  std::size_t n_tokens = 0;      // N_tok
  std::size_t n_sequences = 0;
};

/// Token counts by id.
std::map<TokenId, std::size_t> token_frequencies(const TokenDataset& dataset);

ShallowDescriptors descriptors(const TokenDataset& dataset);

/// Per-token negative log-likelihoods (nats) of each sequence. Position 0 of
/// every sequence is unscored, so a sequence of l tokens carries l - 1 values.
struct NllRecord {
  std::vector<std::vector<double>> sequences;
};

/// exp(mean nll). Throws DataError on a negative or non-finite value and
/// EmptyError on an empty list.
double sequence_ppl(const std::vector<double>& nll);

struct DatasetPpl {
  double avg_ppl = 0.0;             // arithmetic mean of per-sequence PPLs
  double coding_length_bits = 0.0;  // sum of nll / ln 2
  double token_weighted_ppl = 0.0;  // exp(total nll / scored tokens)
  std::size_t n_sequences = 0;      // sequences with at least one scored token
  std::size_t n_scored = 0;
};

/// Sequences without scored tokens are ignored. Throws EmptyError when
/// nothing is left.
DatasetPpl dataset_ppl(const NllRecord& records);

struct AdaptationLog {
  std::vector<std::int64_t> steps;
  std::vector<double> eval_ppl;
  std::int64_t eval_interval = 500;

  /// Throws DataError on unequal lengths, non-increasing steps or a
  /// non-positive perplexity, EmptyError on an empty log.
  void validate() const;
};

struct AdaptationMetrics {
  std::size_t T = 0;              // evaluation steps up to convergence
  std::int64_t iterations = 0;    // T * eval_interval
  double final_ppl = 0.0;         // best value among the first T
  double last_ppl = 0.0;          // value at evaluation T
  double sample_complexity = 0.0; // mean of the first T values
  bool converged = false;
};

/// Convergence is the first evaluation at which the best-so-far value has
/// not strictly improved for `patience` consecutive evaluations.
AdaptationMetrics adaptation_metrics(const AdaptationLog& log, std::size_t patience = 3);

// File formats.

/// JSON-lines of {"ids": [...]} plus a header sidecar {vocab_bound,
/// special_tokens} at header_path_for(path).
std::filesystem::path header_path_for(const std::filesystem::path& data_path);
TokenDataset load_tokens(const std::filesystem::path& path);
void save_tokens(const std::filesystem::path& path, const TokenDataset& dataset);

/// JSON-lines of {"nll": [...]}; the sidecar header must declare nats and
/// the skip-first-token convention when present.
NllRecord load_nll(const std::filesystem::path& path);
void save_nll(const std::filesystem::path& path, const NllRecord& records);

/// CSV with columns step,eval_ppl and an optional "# eval_interval=N" line.
AdaptationLog load_adaptation_log(const std::filesystem::path& path);
void save_adaptation_log(const std::filesystem::path& path, const AdaptationLog& log);

}  // namespace idlab
