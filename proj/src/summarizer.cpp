#include "psum/summarizer.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "psum/error.hpp"

namespace psum {
namespace {

void check_compatible(const SummaryRequest& request, const NetworkParams& params,
                      const EmbeddingTable& table) {
  request.validate();
  if (request.page_len != params.config.page_len)
    throw ContractError("request page_len does not match the model");
  if (table.dim() != params.config.embed_dim)
    throw ContractError("embedding dimension does not match the model");
}

}  // namespace

void SummaryRequest::validate() const {
  if (summary_len < 1) throw ContractError("summary_len must be >= 1");
  if (summary_len > page_len) throw ContractError("summary_len must not exceed page_len");
}

std::vector<Page> paginate(const Document& doc, std::size_t page_len, const EmbeddingTable& table) {
  if (page_len < 1) throw ContractError("page_len must be >= 1");
  std::vector<Page> pages;
  const std::size_t n = doc.size();
  pages.reserve(page_count(n, page_len));
  for (std::size_t begin = 0; begin < n; begin += page_len) {
    const std::size_t end = std::min(begin + page_len, n);
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> refs;
    for (std::size_t i = begin; i < end; ++i) {
      rows.push_back(embed_sentence(doc.sentences[i].tokens, table));
      refs.push_back(i);
    }
    pages.push_back(make_page(rows, page_len, table.dim(), std::move(refs)));
  }
  return pages;
}

std::vector<std::size_t> select_top_k(std::span<const double> probs, const std::vector<bool>& mask,
                                      std::size_t k) {
  if (probs.size() != mask.size()) throw ContractError("select_top_k: mask length mismatch");
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) slots.push_back(i);
  }
  if (slots.size() > k) {
    std::stable_sort(slots.begin(), slots.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    slots.resize(k);
    std::sort(slots.begin(), slots.end());
  }
  return slots;
}

Document summarize_pass(const Document& doc, const SummaryRequest& request,
                        const NetworkParams& params, const EmbeddingTable& table) {
  check_compatible(request, params, table);
  if (doc.size() <= request.summary_len) return doc;

  const auto pages = paginate(doc, request.page_len, table);
  std::vector<std::vector<std::size_t>> chosen(pages.size());
  std::vector<std::vector<double>> probs(pages.size());
  const auto page_total = static_cast<std::int64_t>(pages.size());
  // Pages are independent; each forward runs its kernels serially so that
  // the outer loop carries the parallelism.
#pragma omp parallel for schedule(dynamic) if (page_total > 1)
  for (std::int64_t p = 0; p < page_total; ++p) {
    const auto& page = pages[p];
    const auto exec = page_total > 1 ? kernels::Exec::serial : kernels::Exec::parallel;
    probs[p] = forward(page, params, exec).probs;
    for (std::size_t slot : select_top_k(probs[p], page.mask, request.summary_len)) {
      chosen[p].push_back(page.sentence_refs[slot]);
    }
  }

  // With summary_len == page_len every page keeps all of its sentences, so
  // the per-page rule cannot shrink the document. Fall back to the
  // summary_len best-scored sentences overall.
  if (request.summary_len >= request.page_len) {
    std::vector<double> flat;
    std::vector<bool> mask;
    std::vector<std::size_t> refs;
    for (std::size_t p = 0; p < pages.size(); ++p) {
      for (std::size_t slot = 0; slot < pages[p].real_count(); ++slot) {
        flat.push_back(probs[p][slot]);
        mask.push_back(true);
        refs.push_back(pages[p].sentence_refs[slot]);
      }
    }
    chosen.assign(1, {});
    for (std::size_t i : select_top_k(flat, mask, request.summary_len)) chosen[0].push_back(refs[i]);
  }

  Document out;
  out.source_id = doc.source_id;
  for (const auto& picks : chosen) {
    for (std::size_t i : picks) {
      Sentence s = doc.sentences[i];
      s.index = out.sentences.size();
      out.sentences.push_back(std::move(s));
    }
  }
  return out;
}

Summary summarize(const Document& doc, const SummaryRequest& request, const NetworkParams& params,
                  const EmbeddingTable& table) {
  check_compatible(request, params, table);
  Summary summary;
  Document working = doc;
  while (working.size() > request.summary_len) {
    working = summarize_pass(working, request, params, table);
    ++summary.passes;
  }
  for (const auto& s : working.sentences) summary.indices.push_back(s.source_index);
  summary.text = join_raw(working);
  return summary;
}

}  // namespace psum
