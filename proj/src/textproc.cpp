#include "psum/textproc.hpp"

#include <array>
#include <cstdint>

namespace psum {
namespace {

constexpr std::array<std::string_view, 9> kAbbreviations = {
    "Mr.", "Mrs.", "Dr.", "Prof.", "St.", "U.S.", "e.g.", "i.e.", "etc."};

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminator(char c) noexcept { return c == '.' || c == '!' || c == '?'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t simple_fold(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;  // Greek
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;                 // Cyrillic
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

// Lowercases UTF-8 text. Invalid sequences are copied byte for byte.
std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<std::uint8_t>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool valid = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto b = static_cast<std::uint8_t>(s[i + k]);
      if ((b & 0xC0) != 0x80) valid = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!valid) {
      out.push_back(s[i]);
      ++i;
      continue;
    }
    if (len == 1) {
      out.push_back(static_cast<char>(simple_fold(cp)));
    } else {
      const char32_t folded = simple_fold(cp);
      if (folded == cp) {
        out.append(s.substr(i, len));
      } else {
        append_utf8(out, folded);
      }
    }
    i += len;
  }
  return out;
}

void push_token(std::vector<std::string>& out, std::string_view piece) {
  while (!piece.empty() && (piece.front() == '-' || piece.front() == '\'')) piece.remove_prefix(1);
  while (!piece.empty() && (piece.back() == '-' || piece.back() == '\'')) piece.remove_suffix(1);
  if (!piece.empty()) out.push_back(fold_case(piece));
}

bool is_abbreviation(std::string_view word) {
  for (auto abbr : kAbbreviations) {
    if (word == abbr) return true;
  }
  return false;
}

}  // namespace

std::span<const std::string_view> abbreviations() { return kAbbreviations; }

bool is_strip_char(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  const bool ascii_punct = (u >= 0x21 && u <= 0x2F) || (u >= 0x3A && u <= 0x40) ||
                           (u >= 0x5B && u <= 0x60) || (u >= 0x7B && u <= 0x7E);
  return ascii_punct && c != '-' && c != '\'';
}

std::vector<std::string> tokenize(std::string_view raw_sentence) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= raw_sentence.size(); ++i) {
    if (i == raw_sentence.size() || is_space(raw_sentence[i]) || is_strip_char(raw_sentence[i])) {
      if (i > start) push_token(tokens, raw_sentence.substr(start, i - start));
      start = i + 1;
    }
  }
  return tokens;
}

Document split_sentences(std::string_view raw_text, std::string source_id) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i < raw_text.size(); ++i) {
    if (!is_terminator(raw_text[i])) continue;
    const bool boundary = i + 1 == raw_text.size() || is_space(raw_text[i + 1]);
    if (!boundary) continue;
    std::size_t word_begin = i;
    while (word_begin > start && !is_space(raw_text[word_begin - 1])) --word_begin;
    if (is_abbreviation(raw_text.substr(word_begin, i + 1 - word_begin))) continue;
    const auto piece = trim(raw_text.substr(start, i + 1 - start));
    if (!piece.empty()) pieces.emplace_back(piece);
    start = i + 1;
  }
  if (start < raw_text.size()) {
    const auto piece = trim(raw_text.substr(start));
    if (!piece.empty()) pieces.emplace_back(piece);
  }
  return make_document(pieces, std::move(source_id));
}

Document make_document(std::span<const std::string> sentences, std::string source_id) {
  Document doc;
  doc.source_id = std::move(source_id);
  for (const auto& s : sentences) {
    const auto piece = trim(s);
    if (piece.empty()) continue;
    Sentence sentence;
    sentence.index = doc.sentences.size();
    sentence.source_index = sentence.index;
    sentence.raw = std::string(piece);
    sentence.tokens = tokenize(piece);
    doc.sentences.push_back(std::move(sentence));
  }
  return doc;
}

std::string join_raw(const Document& doc) {
  std::string out;
  for (const auto& s : doc.sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.raw;
  }
  return out;
}

}  // namespace psum
