#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace psum {

struct NgramMultiset {
  std::size_t n = 1;
  std::map<std::vector<std::string>, std::size_t> counts;

  std::size_t total() const;
};

struct RougeScore {
  double recall = 0.0;
  std::size_t overlap_count = 0;
  std::size_t reference_count = 0;
};

/// Contiguous n-token runs with multiplicity. n must be >= 1.
NgramMultiset ngrams(std::span<const std::string> tokens, std::size_t n);

/// ROUGE-N recall with clipped counts: overlap is the sum over reference
/// n-grams of min(candidate count, reference count).
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n);

/// Scores against each reference independently and keeps the best recall.
/// An empty reference list scores 0.
RougeScore rouge_n_best(std::span<const std::string> candidate,
                        std::span<const std::vector<std::string>> references, std::size_t n);

/// |selected ∩ reference| / |selected|, 0 when nothing is selected.
double sentence_precision(const std::set<std::size_t>& selected,
                          const std::set<std::size_t>& reference);

struct EvalRow {
  std::string doc_id;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double precision = 0.0;
};

/// Arithmetic mean of every column, labelled "mean".
EvalRow mean_row(std::span<const EvalRow> rows);

/// Header "doc_id,rouge1_recall,rouge2_recall,precision", one line per row,
/// six decimals, LF endings.
void write_eval_csv(std::ostream& out, std::span<const EvalRow> rows);

/// Column-aligned rendering of the same rows for terminals.
void write_eval_table(std::ostream& out, std::span<const EvalRow> rows);

}  // namespace psum
