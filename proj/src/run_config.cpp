#include "psum/run_config.hpp"

#include <charconv>
#include <fstream>

#include "psum/error.hpp"

namespace psum {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ContractError("invalid value '" + std::string(value) + "' for " + std::string(key));
  return out;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "page_len") {
    network.page_len = parse_number<std::size_t>(key, value);
  } else if (key == "embed_dim") {
    network.embed_dim = parse_number<std::size_t>(key, value);
    embedding.dim = network.embed_dim;
  } else if (key == "hidden_size") {
    network.hidden_size = parse_number<std::size_t>(key, value);
  } else if (key == "learning_rate") {
    network.learning_rate = parse_number<double>(key, value);
  } else if (key == "epochs") {
    network.epochs = parse_number<int>(key, value);
  } else if (key == "seed") {
    network.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "ngram_min") {
    embedding.ngram_min = parse_number<std::size_t>(key, value);
  } else if (key == "ngram_max") {
    embedding.ngram_max = parse_number<std::size_t>(key, value);
  } else if (key == "bucket_count") {
    embedding.bucket_count = parse_number<std::uint64_t>(key, value);
  } else if (key == "embedding_seed") {
    embedding.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "pretrained") {
    pretrained = std::string(value);
  } else if (key == "corpus") {
    corpus_root = std::string(value);
  } else if (key == "model") {
    model_path = std::string(value);
  } else if (key == "summary_len") {
    summary_len = parse_number<std::size_t>(key, value);
  } else if (key == "train_fraction") {
    train_fraction = parse_number<double>(key, value);
  } else if (key == "split_seed") {
    split_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "body_tag") {
    body_tag = std::string(value);
  } else if (key == "eval_csv") {
    eval_csv = std::string(value);
  } else if (key == "sweep_csv") {
    sweep_csv = std::string(value);
  } else {
    throw ContractError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  network.validate();
  embedding.validate();
  if (network.embed_dim != embedding.dim)
    throw ContractError("embed_dim and embedding dim disagree");
  if (summary_len < 1) throw ContractError("summary_len must be >= 1");
  if (summary_len > network.page_len)
    throw ContractError("summary_len (" + std::to_string(summary_len) +
                        ") must not exceed page_len (" + std::to_string(network.page_len) + ")");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ContractError("train_fraction must lie strictly between 0 and 1");
  if (body_tag.empty()) throw ContractError("body_tag must not be empty");
}

void apply_config_text(RunConfig& config, std::istream& in, std::string_view name) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const auto where = std::string(name) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ParseError(where + "expected key = value", line_no);
    try {
      config.set(trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const ContractError& e) {
      throw ParseError(where + e.what(), line_no);
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  apply_config_text(config, in, path.string());
}

}  // namespace psum
