#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "psum/embedding.hpp"
#include "psum/network.hpp"

namespace psum {

/// Everything a CLI command needs. Loaded from a flat `key = value` file
/// (`#` starts a comment) and then overridden by flags.
///
/// Keys: page_len, embed_dim, hidden_size, learning_rate, epochs, seed,
/// ngram_min, ngram_max, bucket_count, embedding_seed, pretrained, corpus,
/// model, summary_len, train_fraction, split_seed, body_tag, eval_csv,
/// sweep_csv.
struct RunConfig {
  NetworkConfig network;
  EmbeddingConfig embedding;
  std::filesystem::path pretrained;  // empty: hashed n-gram vectors only
  std::filesystem::path corpus_root = "corpus";
  std::filesystem::path model_path = "model.psum";
  std::size_t summary_len = 5;
  double train_fraction = 0.75;
  std::uint64_t split_seed = 1;
  std::string body_tag = "TEXT";
  std::filesystem::path eval_csv = "eval.csv";
  std::filesystem::path sweep_csv = "sweep.csv";

  /// Sets one key. Throws ContractError for an unknown key or a value that
  /// does not parse.
  void set(std::string_view key, std::string_view value);

  /// Throws ContractError when summary_len > page_len or any sub-config is
  /// invalid.
  void validate() const;
};

/// Parses `key = value` lines into `config`. Throws ParseError naming the
/// 1-based line on a malformed line or unknown key.
void apply_config_text(RunConfig& config, std::istream& in, std::string_view name = "<config>");

/// Throws InputError if the file cannot be opened.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace psum
