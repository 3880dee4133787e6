#include "psum/rouge.hpp"

#include <algorithm>
#include <cstdio>

#include "psum/error.hpp"

namespace psum {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::size_t NgramMultiset::total() const {
  std::size_t sum = 0;
  for (const auto& [gram, count] : counts) sum += count;
  return sum;
}

NgramMultiset ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n < 1) throw ContractError("ngrams: n must be >= 1");
  NgramMultiset set;
  set.n = n;
  if (tokens.size() < n) return set;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++set.counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return set;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n) {
  const auto cand = ngrams(candidate, n);
  const auto ref = ngrams(reference, n);
  RougeScore score;
  for (const auto& [gram, count] : ref.counts) {
    score.reference_count += count;
    if (auto it = cand.counts.find(gram); it != cand.counts.end()) {
      score.overlap_count += std::min(count, it->second);
    }
  }
  if (score.reference_count > 0) {
    score.recall =
        static_cast<double>(score.overlap_count) / static_cast<double>(score.reference_count);
  }
  return score;
}

RougeScore rouge_n_best(std::span<const std::string> candidate,
                        std::span<const std::vector<std::string>> references, std::size_t n) {
  RougeScore best;
  bool first = true;
  for (const auto& ref : references) {
    auto score = rouge_n(candidate, ref, n);
    if (first || score.recall > best.recall) best = score;
    first = false;
  }
  return best;
}

double sentence_precision(const std::set<std::size_t>& selected,
                          const std::set<std::size_t>& reference) {
  if (selected.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t idx : selected) hits += reference.count(idx);
  return static_cast<double>(hits) / static_cast<double>(selected.size());
}

EvalRow mean_row(std::span<const EvalRow> rows) {
  EvalRow mean{"mean", 0.0, 0.0, 0.0};
  if (rows.empty()) return mean;
  for (const auto& r : rows) {
    mean.rouge1 += r.rouge1;
    mean.rouge2 += r.rouge2;
    mean.precision += r.precision;
  }
  const double n = static_cast<double>(rows.size());
  mean.rouge1 /= n;
  mean.rouge2 /= n;
  mean.precision /= n;
  return mean;
}

void write_eval_csv(std::ostream& out, std::span<const EvalRow> rows) {
  out << "doc_id,rouge1_recall,rouge2_recall,precision\n";
  for (const auto& r : rows) {
    out << r.doc_id << ',' << fixed6(r.rouge1) << ',' << fixed6(r.rouge2) << ','
        << fixed6(r.precision) << '\n';
  }
}

void write_eval_table(std::ostream& out, std::span<const EvalRow> rows) {
  std::size_t width = std::string("doc_id").size();
  for (const auto& r : rows) width = std::max(width, r.doc_id.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("doc_id", width) << "  " << pad("ROUGE-1", 9) << "  " << pad("ROUGE-2", 9) << "  "
      << "sentence-precision (reconstructed)\n";
  for (const auto& r : rows) {
    out << pad(r.doc_id, width) << "  " << pad(fixed6(r.rouge1), 9) << "  "
        << pad(fixed6(r.rouge2), 9) << "  " << fixed6(r.precision) << '\n';
  }
}

}  // namespace psum
