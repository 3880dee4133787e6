#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psum {

struct Sentence {
  std::size_t index = 0;         // position in the owning Document
  std::size_t source_index = 0;  // position in the original document; survives re-summarization
  std::string raw;               // trimmed original text
  std::vector<std::string> tokens;
};

struct Document {
  std::string source_id;
  std::vector<Sentence> sentences;

  std::size_t size() const noexcept { return sentences.size(); }
  bool empty() const noexcept { return sentences.empty(); }
};

/// Fixed abbreviation list; a terminator ending one of these does not end a
/// sentence. Matching is case-sensitive on the whitespace-delimited word.
std::span<const std::string_view> abbreviations();

/// True for ASCII punctuation other than '-' and '\''.
bool is_strip_char(char c) noexcept;

/// Lowercases, splits on whitespace and on strip-set characters, and trims
/// hyphens and apostrophes from token edges. Non-ASCII letters in the Latin-1,
/// Greek and Cyrillic blocks are case-folded; other bytes pass through.
std::vector<std::string> tokenize(std::string_view raw_sentence);

/// Splits on '.', '!' or '?' followed by whitespace or end of text, unless the
/// word carrying the terminator is an abbreviation. Sentences are tokenized
/// and indexed 0..n-1.
Document split_sentences(std::string_view raw_text, std::string source_id = {});

/// Builds a Document from already-segmented sentences (one per entry).
Document make_document(std::span<const std::string> sentences, std::string source_id = {});

/// Joins raw sentence text with single spaces.
std::string join_raw(const Document& doc);

}  // namespace psum
