#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace psum {

struct SyntheticSpec {
  std::size_t n_docs = 200;
  std::uint64_t seed = 1;
  std::size_t summary_len = 5;
  std::size_t min_sentences = 30;
  std::size_t max_sentences = 120;
  std::size_t vocabulary_size = 1024;  // words synthetic_word(0 .. vocabulary_size-1)
  std::size_t min_words = 1;           // per sentence, excluding "the" and the marker
  std::size_t max_words = 3;
};

/// Token that marks summary sentences in generated documents.
inline constexpr std::string_view kSyntheticMarker = "z";

/// Every generated sentence starts with this word.
inline constexpr std::string_view kSyntheticLead = "the";

/// Word i of the synthetic vocabulary: five syllables picked by a fixed
/// hash of i, e.g. "dordormifuwal".
std::string synthetic_word(std::size_t i);

/// Writes `<root>/docs/docNNNNN.xml` (DUC-style markup) and
/// `<root>/summaries/docNNNNN.txt`. Each document has between min_sentences
/// and max_sentences sentences of the form "The <words>." where a random
/// summary_len of them also carry the marker token at a random position.
/// Those are copied verbatim, one per line, into the summary.
/// Output is a pure function of the spec. Throws OutputError if a file
/// cannot be written.
void generate_synthetic_corpus(const std::filesystem::path& root, const SyntheticSpec& spec);

}  // namespace psum
