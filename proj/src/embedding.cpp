#include "psum/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "psum/error.hpp"
#include "psum/hash.hpp"
#include "psum/random.hpp"

namespace psum {
namespace {

// Byte offsets of code point starts, plus a final entry at s.size().
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(s.size());
  return offsets;
}

bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > begin) fields.push_back(line.substr(begin, i - begin));
  }
  return fields;
}

}  // namespace

void EmbeddingConfig::validate() const {
  if (dim < 1) throw ContractError("embedding dim must be >= 1");
  if (ngram_min < 1 || ngram_min > ngram_max)
    throw ContractError("embedding requires 1 <= ngram_min <= ngram_max");
  if (bucket_count < 1) throw ContractError("bucket_count must be >= 1");
}

std::vector<std::string> char_ngrams(std::string_view token, std::size_t nmin, std::size_t nmax) {
  if (nmin < 1 || nmin > nmax) throw ContractError("char_ngrams requires 1 <= nmin <= nmax");
  std::string wrapped;
  wrapped.reserve(token.size() + 2);
  wrapped.push_back('<');
  wrapped.append(token);
  wrapped.push_back('>');

  const auto offsets = code_point_offsets(wrapped);
  const std::size_t length = offsets.size() - 1;
  std::vector<std::string> out;
  for (std::size_t n = nmin; n <= nmax && n < length; ++n) {
    for (std::size_t start = 0; start + n <= length; ++start) {
      out.emplace_back(wrapped, offsets[start], offsets[start + n] - offsets[start]);
    }
  }
  out.push_back(std::move(wrapped));
  return out;
}

std::uint64_t hash_ngram(std::string_view ngram, std::uint64_t bucket_count) {
  if (bucket_count < 1) throw ContractError("bucket_count must be >= 1");
  return fnv1a64(ngram) % bucket_count;
}

EmbeddingTable::EmbeddingTable(EmbeddingConfig config) : config_(config) { config_.validate(); }

EmbeddingTable::EmbeddingTable(EmbeddingConfig config,
                               std::unordered_map<std::string, std::vector<double>> word_vectors)
    : config_(config), word_vectors_(std::move(word_vectors)) {
  config_.validate();
  for (const auto& [token, vec] : word_vectors_) {
    if (vec.size() != config_.dim)
      throw ContractError("word vector for '" + token + "' has wrong dimension");
    for (double v : vec) {
      if (!std::isfinite(v)) throw ContractError("word vector for '" + token + "' is not finite");
    }
  }
}

double EmbeddingTable::bucket_value(std::uint64_t bucket, std::size_t component) const {
  const double bound = 1.0 / static_cast<double>(config_.dim);
  const std::uint64_t bits = splitmix64_at(config_.seed, bucket * config_.dim + component);
  return -bound + 2.0 * bound * unit_interval(bits);
}

void EmbeddingTable::accumulate_bucket(std::uint64_t bucket, std::span<double> out) const {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += bucket_value(bucket, j);
}

std::vector<double> EmbeddingTable::token_vector(std::string_view token) const {
  if (auto it = word_vectors_.find(std::string(token)); it != word_vectors_.end()) return it->second;
  std::vector<double> vec(config_.dim, 0.0);
  const auto grams = char_ngrams(token, config_.ngram_min, config_.ngram_max);
  for (const auto& gram : grams) accumulate_bucket(hash_ngram(gram, config_.bucket_count), vec);
  const double inv = 1.0 / static_cast<double>(grams.size());
  for (double& v : vec) v *= inv;
  return vec;
}

std::vector<double> embed_sentence(std::span<const std::string> tokens, const EmbeddingTable& table) {
  std::vector<double> out(table.dim(), 0.0);
  if (tokens.empty()) return out;
  for (const auto& token : tokens) {
    const auto vec = table.token_vector(token);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += vec[j];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  double norm_sq = 0.0;
  for (double& v : out) {
    v *= inv;
    norm_sq += v * v;
  }
  if (norm_sq > 0.0) {
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (double& v : out) v *= inv_norm;
  }
  return out;
}

EmbeddingTable load_pretrained(const std::filesystem::path& path, EmbeddingConfig config) {
  config.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vector file " + path.string());

  std::unordered_map<std::string, std::vector<double>> vectors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (line_no == 1 && fields.size() == 2) {
      double count = 0, dim = 0;
      if (parse_double(fields[0], count) && parse_double(fields[1], dim)) continue;  // header
    }
    if (fields.size() != config.dim + 1) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << config.dim
          << " components, found " << fields.size() - 1;
      throw ParseError(msg.str(), line_no);
    }
    std::vector<double> vec(config.dim);
    for (std::size_t j = 0; j < config.dim; ++j) {
      if (!parse_double(fields[j + 1], vec[j])) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": non-numeric field '" << fields[j + 1] << "'";
        throw ParseError(msg.str(), line_no);
      }
    }
    vectors.insert_or_assign(std::string(fields[0]), std::move(vec));
  }
  if (in.bad()) throw InputError("error reading vector file " + path.string());
  return EmbeddingTable(config, std::move(vectors));
}

}  // namespace psum
