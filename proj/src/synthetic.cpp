#include "psum/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "psum/error.hpp"
#include "psum/random.hpp"

namespace psum {
namespace {

constexpr std::array<std::string_view, 16> kSyllables = {
    "ka", "ro", "mi", "tel", "sun", "dor", "pa", "ven", "li", "gos", "ter", "bam", "ne", "fu", "wal", "ish"};

std::string make_sentence(Rng& rng, const SyntheticSpec& spec, bool marked) {
  const auto length = static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(spec.min_words), static_cast<std::int64_t>(spec.max_words)));
  std::vector<std::string> words;
  for (std::size_t i = 0; i < length; ++i) words.push_back(synthetic_word(rng.below(spec.vocabulary_size)));
  if (marked) words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(length + 1)), std::string(kSyntheticMarker));
  words.insert(words.begin(), std::string(kSyntheticLead));

  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  out[0] = static_cast<char>(out[0] - 'a' + 'A');
  out.push_back('.');
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path.string());
  out << content;
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace

std::string synthetic_word(std::size_t i) {
  std::string word;
  std::uint64_t bits = splitmix64_at(0x5eed, i);
  for (int k = 0; k < 5; ++k, bits >>= 4) word += kSyllables[bits & 15];
  return word;
}

void generate_synthetic_corpus(const std::filesystem::path& root, const SyntheticSpec& spec) {
  if (spec.n_docs < 1) throw ContractError("n_docs must be >= 1");
  if (spec.min_sentences < spec.summary_len || spec.min_sentences > spec.max_sentences)
    throw ContractError("invalid synthetic sentence range");
  if (spec.min_words < 1 || spec.min_words > spec.max_words)
    throw ContractError("invalid synthetic sentence length range");
  if (spec.vocabulary_size < 1)
    throw ContractError("vocabulary_size must be >= 1");

  std::error_code ec;
  std::filesystem::create_directories(root / "docs", ec);
  if (ec) throw OutputError("cannot create " + (root / "docs").string() + ": " + ec.message());
  std::filesystem::create_directories(root / "summaries", ec);
  if (ec) throw OutputError("cannot create " + (root / "summaries").string() + ": " + ec.message());

  Rng rng(spec.seed);
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    char id[32];
    std::snprintf(id, sizeof(id), "doc%05zu", d);

    const auto n = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.min_sentences),
                                                        static_cast<std::int64_t>(spec.max_sentences)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<bool> marked(n, false);
    for (std::size_t i = 0; i < spec.summary_len; ++i) marked[order[i]] = true;

    std::string doc = "<DOC>\n<DOCNO> " + std::string(id) + " </DOCNO>\n<TEXT>\n";
    std::string summary;
    for (std::size_t i = 0; i < n; ++i) {
      const auto sentence = make_sentence(rng, spec, marked[i]);
      doc += sentence + "\n";
      if (marked[i]) summary += sentence + "\n";
    }
    doc += "</TEXT>\n</DOC>\n";
    write_file(root / "docs" / (std::string(id) + ".xml"), doc);
    write_file(root / "summaries" / (std::string(id) + ".txt"), summary);
  }
}

}  // namespace psum
