#include "psum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <set>

#include "psum/error.hpp"
#include "psum/random.hpp"
#include "psum/rouge.hpp"
#include "psum/summarizer.hpp"

namespace psum {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' || c == '.';
}

void append_decoded(std::string& out, std::string_view text) {
  static constexpr std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      bool matched = false;
      for (const auto& [entity, ch] : kEntities) {
        if (text.substr(i, entity.size()) == entity) {
          out.push_back(ch);
          i += entity.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.push_back(text[i++]);
  }
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open " + file.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("error reading " + file.string());
  return content;
}

bool is_markup_file(const std::filesystem::path& file) {
  const auto ext = file.extension().string();
  return iequals(ext, ".xml") || iequals(ext, ".sgml") || iequals(ext, ".sgm");
}

}  // namespace

std::string extract_duc_text(std::string_view content, const XmlTags& tags, std::string_view name) {
  std::string body;
  int depth = 0;
  bool found = false;
  std::size_t i = 0;
  while (i < content.size()) {
    const std::size_t lt = content.find('<', i);
    const std::size_t text_end = lt == std::string_view::npos ? content.size() : lt;
    if (depth > 0) append_decoded(body, content.substr(i, text_end - i));
    if (lt == std::string_view::npos) break;

    const char next = lt + 1 < content.size() ? content[lt + 1] : '\0';
    const bool markup = std::isalpha(static_cast<unsigned char>(next)) || next == '/' ||
                        next == '!' || next == '?';
    if (!markup) {  // a stray '<' in running text
      if (depth > 0) body.push_back('<');
      i = lt + 1;
      continue;
    }

    std::size_t gt;
    if (content.substr(lt, 4) == "<!--") {
      gt = content.find("-->", lt + 4);
      if (gt == std::string_view::npos)
        throw ParseError(std::string(name) + ": unterminated comment at byte " + std::to_string(lt), lt);
      i = gt + 3;
      continue;
    }
    gt = content.find('>', lt + 1);
    const std::size_t next_lt = content.find('<', lt + 1);
    if (gt == std::string_view::npos || (next_lt != std::string_view::npos && next_lt < gt))
      throw ParseError(std::string(name) + ": unterminated tag at byte " + std::to_string(lt), lt);

    const bool closing = next == '/';
    std::size_t name_begin = lt + (closing ? 2 : 1);
    std::size_t name_end = name_begin;
    while (name_end < gt && is_name_char(content[name_end])) ++name_end;
    const auto tag_name = content.substr(name_begin, name_end - name_begin);
    const bool self_closing = content[gt - 1] == '/';

    if (next != '!' && next != '?' && iequals(tag_name, tags.body) && !self_closing) {
      if (closing) {
        if (depth > 0 && --depth == 0) body.push_back(' ');
      } else {
        if (depth == 0 && found) body.push_back(' ');
        ++depth;
        found = true;
      }
    } else if (depth > 0) {
      body.push_back(' ');  // inner markup separates words
    }
    i = gt + 1;
  }
  if (!found) throw MissingBodyError(std::string(name) + ": no <" + tags.body + "> element");
  return collapse_whitespace(body);
}

std::string parse_duc_xml(const std::filesystem::path& file, const XmlTags& tags) {
  return extract_duc_text(read_file(file), tags, file.string());
}

std::vector<bool> make_labels(const Document& document, const Document& reference) {
  std::vector<bool> labels(document.size(), false);
  std::vector<bool> matched(reference.size(), false);

  std::map<std::vector<std::string>, std::vector<std::size_t>> by_tokens;
  for (std::size_t i = 0; i < document.size(); ++i) {
    if (!document.sentences[i].tokens.empty()) by_tokens[document.sentences[i].tokens].push_back(i);
  }
  for (std::size_t r = 0; r < reference.size(); ++r) {
    const auto& tokens = reference.sentences[r].tokens;
    if (tokens.empty()) continue;
    if (auto it = by_tokens.find(tokens); it != by_tokens.end()) {
      for (std::size_t i : it->second) labels[i] = true;
      matched[r] = true;
    }
  }

  for (std::size_t r = 0; r < reference.size(); ++r) {
    const auto& ref_tokens = reference.sentences[r].tokens;
    if (matched[r] || ref_tokens.empty()) continue;
    double best = -1.0;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < document.size(); ++i) {
      const double recall = rouge_n(document.sentences[i].tokens, ref_tokens, 1).recall;
      if (recall > best) {
        best = recall;
        best_index = i;
      }
    }
    if (best >= kLabelRecallThreshold) labels[best_index] = true;
  }
  return labels;
}

std::vector<TrainingPair> build_training_pairs(const CorpusPair& pair, const NetworkConfig& config,
                                               const EmbeddingTable& table) {
  if (pair.labels.size() != pair.document.size())
    throw ContractError("labels are not aligned with the document");
  if (table.dim() != config.embed_dim)
    throw ContractError("embedding dimension does not match network config");
  std::vector<TrainingPair> out;
  for (auto& page : paginate(pair.document, config.page_len, table)) {
    std::vector<std::size_t> positives;
    for (std::size_t slot = 0; slot < page.real_count(); ++slot) {
      if (pair.labels[page.sentence_refs[slot]]) positives.push_back(slot);
    }
    if (positives.empty()) continue;
    auto target = uniform_target(page, positives);
    out.push_back({std::move(page), std::move(target)});
  }
  return out;
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ContractError("train_fraction must lie strictly between 0 and 1");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            const SplitSpec& spec) {
  spec.validate();
  if (n == 0) throw ContractError("cannot split an empty corpus");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));

  auto cut = static_cast<std::size_t>(spec.train_fraction * static_cast<double>(n));
  cut = std::clamp<std::size_t>(cut, 1, n >= 2 ? n - 1 : 1);
  return {std::vector<std::size_t>(order.begin(), order.begin() + cut),
          std::vector<std::size_t>(order.begin() + cut, order.end())};
}

std::pair<std::vector<CorpusPair>, std::vector<CorpusPair>> split_train_eval(
    const std::vector<CorpusPair>& pairs, const SplitSpec& spec) {
  const auto [train_idx, eval_idx] = split_indices(pairs.size(), spec);
  std::pair<std::vector<CorpusPair>, std::vector<CorpusPair>> out;
  for (std::size_t i : train_idx) out.first.push_back(pairs[i]);
  for (std::size_t i : eval_idx) out.second.push_back(pairs[i]);
  return out;
}

Document load_document(const std::filesystem::path& file, const XmlTags& tags) {
  const auto text = is_markup_file(file) ? parse_duc_xml(file, tags) : read_file(file);
  return split_sentences(text, file.stem().string());
}

std::vector<CorpusPair> load_corpus(const std::filesystem::path& root, const XmlTags& tags) {
  namespace fs = std::filesystem;
  const auto docs_dir = root / "docs";
  const auto summaries_dir = root / "summaries";
  std::error_code ec;
  if (!fs::is_directory(docs_dir, ec) || !fs::is_directory(summaries_dir, ec))
    throw InputError("corpus root " + root.string() + " lacks docs/ and summaries/");

  std::map<std::string, fs::path> docs;
  for (const auto& entry : fs::directory_iterator(docs_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (!(iequals(ext, ".txt") || is_markup_file(entry.path()))) continue;
    docs.emplace(entry.path().stem().string(), entry.path());
  }

  std::vector<CorpusPair> pairs;
  for (const auto& [stem, path] : docs) {
    const auto summary_path = summaries_dir / (stem + ".txt");
    if (!fs::is_regular_file(summary_path, ec)) continue;
    CorpusPair pair;
    pair.document = load_document(path, tags);
    pair.reference_summary = split_sentences(read_file(summary_path), stem);
    pair.labels = make_labels(pair.document, pair.reference_summary);
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw InputError("no document/summary pairs under " + root.string());
  return pairs;
}

}  // namespace psum
