#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace psum {

struct EmbeddingConfig {
  std::size_t dim = 100;
  std::size_t ngram_min = 3;
  std::size_t ngram_max = 6;
  std::uint64_t bucket_count = 2'000'000;
  std::uint64_t seed = 1;

  /// Throws ContractError on an invalid combination.
  void validate() const;
};

/// Character n-grams of `token` wrapped in '<' and '>'. Substrings of every
/// length in [nmin, nmax] are listed left to right, all n-grams of one length
/// before the next; the whole wrapped token is always the last entry and is
/// never repeated as a substring. Lengths count UTF-8 code points.
std::vector<std::string> char_ngrams(std::string_view token, std::size_t nmin, std::size_t nmax);

/// FNV-1a 64 of the UTF-8 bytes, reduced modulo `bucket_count`.
std::uint64_t hash_ngram(std::string_view ngram, std::uint64_t bucket_count);

/// Word vectors plus a bucket_count x dim table of n-gram vectors.
///
/// The bucket table is never materialized: entry (b, j) is a pure function of
/// (seed, b, j), uniform in [-1/dim, 1/dim]. Two tables with equal config have
/// identical bucket vectors. Immutable after construction.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(EmbeddingConfig config);
  EmbeddingTable(EmbeddingConfig config,
                 std::unordered_map<std::string, std::vector<double>> word_vectors);

  const EmbeddingConfig& config() const noexcept { return config_; }
  std::size_t dim() const noexcept { return config_.dim; }

  const std::unordered_map<std::string, std::vector<double>>& word_vectors() const noexcept {
    return word_vectors_;
  }

  /// Value of bucket `bucket`, component `component`.
  double bucket_value(std::uint64_t bucket, std::size_t component) const;

  /// Adds bucket vector `bucket` to `out` (length dim).
  void accumulate_bucket(std::uint64_t bucket, std::span<double> out) const;

  /// Pretrained vector if the token is known, else the mean of its n-gram
  /// bucket vectors.
  std::vector<double> token_vector(std::string_view token) const;

 private:
  EmbeddingConfig config_;
  std::unordered_map<std::string, std::vector<double>> word_vectors_;
};

/// Mean of token vectors, L2-normalized. Empty input or a zero mean gives
/// the zero vector.
std::vector<double> embed_sentence(std::span<const std::string> tokens, const EmbeddingTable& table);

/// Reads the text vector format: optional "<count> <dim>" header line, then
/// "<token> <f1> ... <fdim>" rows. Throws InputError if the file cannot be
/// opened and ParseError (with a 1-based line number) on malformed rows.
EmbeddingTable load_pretrained(const std::filesystem::path& path, EmbeddingConfig config);

}  // namespace psum
