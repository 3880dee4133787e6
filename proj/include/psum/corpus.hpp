#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psum/embedding.hpp"
#include "psum/network.hpp"
#include "psum/textproc.hpp"

namespace psum {

struct XmlTags {
  std::string body = "TEXT";
};

/// Raised when a document has no body element. Names the offending file.
class MissingBodyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text content of every `tags.body` element in `content`, markup removed,
/// the five predefined entities decoded and whitespace collapsed. Tag names
/// match case-insensitively. Throws MissingBodyError if there is no body
/// element and ParseError (byte offset) on an unterminated tag.
std::string extract_duc_text(std::string_view content, const XmlTags& tags = {},
                             std::string_view name = "<memory>");

/// extract_duc_text over a file. Throws InputError if it cannot be read.
std::string parse_duc_xml(const std::filesystem::path& file, const XmlTags& tags = {});

struct CorpusPair {
  Document document;
  Document reference_summary;
  std::vector<bool> labels;  // one per document sentence
};

/// Exact token-list matches first; then each unmatched reference sentence
/// labels the document sentence with the highest ROUGE-1 recall against it
/// (earliest on ties) if that recall is at least 0.5.
std::vector<bool> make_labels(const Document& document, const Document& reference);

inline constexpr double kLabelRecallThreshold = 0.5;

/// One training pair per page that contains a positive sentence. The target
/// is uniform over the positives on that page.
std::vector<TrainingPair> build_training_pairs(const CorpusPair& pair, const NetworkConfig& config,
                                               const EmbeddingTable& table);

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Seeded permutation of 0..n-1 split after floor(train_fraction * n),
/// clamped so both parts are nonempty when n >= 2. Throws ContractError if
/// n == 0.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            const SplitSpec& spec);

std::pair<std::vector<CorpusPair>, std::vector<CorpusPair>> split_train_eval(
    const std::vector<CorpusPair>& pairs, const SplitSpec& spec);

/// Reads a document file: `.xml`/`.sgml` through extract_duc_text, anything
/// else as plain text.
Document load_document(const std::filesystem::path& file, const XmlTags& tags = {});

/// Pairs `<root>/docs/<stem>.{xml,txt}` with `<root>/summaries/<stem>.txt`,
/// sorted by stem, and labels each pair. Documents without a summary are
/// skipped. Throws InputError if the layout is missing or no pair is found.
std::vector<CorpusPair> load_corpus(const std::filesystem::path& root, const XmlTags& tags = {});

}  // namespace psum
