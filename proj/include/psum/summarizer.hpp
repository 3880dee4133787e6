#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psum/embedding.hpp"
#include "psum/network.hpp"
#include "psum/textproc.hpp"

namespace psum {

struct SummaryRequest {
  std::size_t summary_len = 5;
  std::size_t page_len = 40;

  /// Throws ContractError unless 1 <= summary_len <= page_len.
  void validate() const;
};

struct Summary {
  std::vector<std::size_t> indices;  // ascending positions in the source document
  std::string text;                  // selected raw sentences joined by single spaces
  std::size_t passes = 0;
};

/// Number of pages a document of `doc_len` sentences occupies.
constexpr std::size_t page_count(std::size_t doc_len, std::size_t page_len) {
  return (doc_len + page_len - 1) / page_len;
}

/// Splits `doc` into consecutive pages of page_len embedded sentences; the
/// last page is zero-padded. sentence_refs hold positions within `doc`.
std::vector<Page> paginate(const Document& doc, std::size_t page_len, const EmbeddingTable& table);

/// The k highest-probability mask-true slots (fewer if the page is shorter),
/// ties going to the earlier slot, returned in ascending slot order.
std::vector<std::size_t> select_top_k(std::span<const double> probs, const std::vector<bool>& mask,
                                      std::size_t k);

/// One reduction pass: top summary_len sentences from every page, kept in
/// document order. Sentences keep their source_index and are re-indexed.
/// When summary_len == page_len no page can shrink, so the pass keeps the
/// summary_len highest in-page probabilities across all pages instead.
Document summarize_pass(const Document& doc, const SummaryRequest& request,
                        const NetworkParams& params, const EmbeddingTable& table);

/// Applies summarize_pass until at most summary_len sentences remain.
Summary summarize(const Document& doc, const SummaryRequest& request, const NetworkParams& params,
                  const EmbeddingTable& table);

}  // namespace psum
