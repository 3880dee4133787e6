#include "psum/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>

#include "psum/error.hpp"
#include "psum/model_io.hpp"
#include "psum/random.hpp"
#include "psum/summarizer.hpp"
#include "psum/synthetic.hpp"

namespace psum {
namespace {

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Runs `body` and maps the library's exceptions to exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const CorruptModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCorruptModel;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadOutput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const MissingBodyError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

std::vector<CorpusPair> load_corpus_for(const RunConfig& config) {
  return load_corpus(config.corpus_root, XmlTags{config.body_tag});
}

SplitSpec split_spec(const RunConfig& config) { return {config.train_fraction, config.split_seed}; }

// Fails before any expensive work if `path` cannot be opened for writing.
void ensure_writable(const std::filesystem::path& path) {
  std::ofstream probe(path, std::ios::binary | std::ios::app);
  if (!probe) throw OutputError("cannot write " + path.string());
}

std::vector<std::string> joined_tokens(const Document& doc, std::span<const std::size_t> indices) {
  std::vector<std::string> tokens;
  for (std::size_t i : indices) {
    const auto& t = doc.sentences[i].tokens;
    tokens.insert(tokens.end(), t.begin(), t.end());
  }
  return tokens;
}

std::vector<std::string> joined_tokens(const Document& doc) {
  std::vector<std::string> tokens;
  for (const auto& s : doc.sentences) tokens.insert(tokens.end(), s.tokens.begin(), s.tokens.end());
  return tokens;
}

TrainResult train_on(const RunConfig& config, std::span<const CorpusPair> train_docs,
                     const EmbeddingTable& table, std::ostream& out) {
  const auto pairs = collect_training_pairs(train_docs, config.network, table);
  if (pairs.empty()) throw InputError("corpus has no labeled pages to train on");
  out << "training on " << pairs.size() << " pages from " << train_docs.size() << " documents\n";
  return train(pairs, config.network, [&](int epoch, double loss) {
    out << "epoch " << epoch << " mean_loss " << format_double("%.6f", loss) << '\n';
  });
}

}  // namespace

EmbeddingTable make_embedding_table(const RunConfig& config) {
  if (!config.pretrained.empty()) return load_pretrained(config.pretrained, config.embedding);
  return EmbeddingTable(config.embedding);
}

std::vector<TrainingPair> collect_training_pairs(std::span<const CorpusPair> pairs,
                                                 const NetworkConfig& config,
                                                 const EmbeddingTable& table) {
  std::vector<TrainingPair> out;
  for (const auto& pair : pairs) {
    auto pages = build_training_pairs(pair, config, table);
    std::move(pages.begin(), pages.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<EvalRow> evaluate(std::span<const CorpusPair> pairs, const NetworkParams& params,
                              const EmbeddingTable& table, std::size_t summary_len) {
  const SummaryRequest request{summary_len, params.config.page_len};
  request.validate();
  std::vector<EvalRow> rows(pairs.size());
  const auto count = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t d = 0; d < count; ++d) {
    const auto& pair = pairs[d];
    const auto summary = summarize(pair.document, request, params, table);
    const auto candidate = joined_tokens(pair.document, summary.indices);
    const auto reference = joined_tokens(pair.reference_summary);

    std::set<std::size_t> selected(summary.indices.begin(), summary.indices.end());
    std::set<std::size_t> positives;
    for (std::size_t i = 0; i < pair.labels.size(); ++i) {
      if (pair.labels[i]) positives.insert(i);
    }
    rows[d] = EvalRow{pair.document.source_id, rouge_n(candidate, reference, 1).recall,
                      rouge_n(candidate, reference, 2).recall,
                      sentence_precision(selected, positives)};
  }
  return rows;
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const auto corpus = load_corpus_for(config);
    const auto [train_docs, eval_docs] = split_train_eval(corpus, split_spec(config));
    ensure_writable(config.model_path);
    const auto table = make_embedding_table(config);
    const auto result = train_on(config, train_docs, table, out);
    save_model(result.params, config.model_path);
    out << "wrote " << config.model_path.string() << '\n';
    return int{kExitOk};
  });
}

int cmd_summarize(const RunConfig& config, const std::filesystem::path& input, bool with_indices,
                  std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto params = load_model(config.model_path);
    RunConfig effective = config;
    effective.network.page_len = params.config.page_len;
    effective.network.embed_dim = params.config.embed_dim;
    effective.network.hidden_size = params.config.hidden_size;
    effective.embedding.dim = params.config.embed_dim;
    effective.validate();

    std::error_code ec;
    if (!std::filesystem::is_regular_file(input, ec)) throw InputError("cannot read " + input.string());
    const auto doc = load_document(input, XmlTags{config.body_tag});
    const auto table = make_embedding_table(effective);
    const auto summary = summarize(doc, {effective.summary_len, params.config.page_len}, params, table);
    for (std::size_t i : summary.indices) {
      out << doc.sentences[i].raw;
      if (with_indices) out << '\t' << i;
      out << '\n';
    }
    return int{kExitOk};
  });
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto params = load_model(config.model_path);
    RunConfig effective = config;
    effective.network.page_len = params.config.page_len;
    effective.network.embed_dim = params.config.embed_dim;
    effective.network.hidden_size = params.config.hidden_size;
    effective.embedding.dim = params.config.embed_dim;
    effective.validate();

    const auto corpus = load_corpus_for(effective);
    const auto [train_docs, eval_docs] = split_train_eval(corpus, split_spec(effective));
    if (eval_docs.empty()) throw InputError("evaluation split is empty");
    const auto table = make_embedding_table(effective);
    auto rows = evaluate(eval_docs, params, table, effective.summary_len);
    rows.push_back(mean_row(rows));

    std::ofstream csv(effective.eval_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw OutputError("cannot write " + effective.eval_csv.string());
    write_eval_csv(csv, rows);
    if (!csv) throw OutputError("failed writing " + effective.eval_csv.string());
    write_eval_table(out, rows);
    return int{kExitOk};
  });
}

int cmd_sweep(const RunConfig& config, std::span<const std::size_t> page_lens, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    std::vector<std::size_t> settings(page_lens.begin(), page_lens.end());
    if (settings.empty()) throw ContractError("sweep needs at least one page_len");
    for (std::size_t p : settings) {
      if (p < config.summary_len)
        throw ContractError("page_len " + std::to_string(p) + " is below summary_len " +
                            std::to_string(config.summary_len));
    }
    std::sort(settings.begin(), settings.end());
    settings.erase(std::unique(settings.begin(), settings.end()), settings.end());

    const auto corpus = load_corpus_for(config);
    const auto [train_docs, eval_docs] = split_train_eval(corpus, split_spec(config));
    if (eval_docs.empty()) throw InputError("evaluation split is empty");
    ensure_writable(config.sweep_csv);
    const auto table = make_embedding_table(config);

    std::string csv_text = "page_len,rouge1_recall,rouge2_recall\n";
    for (std::size_t page_len : settings) {
      RunConfig run = config;
      run.network.page_len = page_len;
      out << "page_len " << page_len << '\n';
      const auto result = train_on(run, train_docs, table, out);
      const auto rows = evaluate(eval_docs, result.params, table, run.summary_len);
      const auto mean = mean_row(rows);
      csv_text += std::to_string(page_len) + "," + format_double("%.6f", mean.rouge1) + "," +
                  format_double("%.6f", mean.rouge2) + "\n";
      out << "page_len " << page_len << " rouge1 " << format_double("%.6f", mean.rouge1)
          << " rouge2 " << format_double("%.6f", mean.rouge2) << '\n';
    }
    std::ofstream csv(config.sweep_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw OutputError("cannot write " + config.sweep_csv.string());
    csv << csv_text;
    if (!csv) throw OutputError("failed writing " + config.sweep_csv.string());
    return int{kExitOk};
  });
}

GradcheckInstance make_gradcheck_instance(const NetworkConfig& config, std::uint64_t seed) {
  NetworkConfig c = config;
  c.seed = seed;
  GradcheckInstance inst{init_params(c), {}, {}};
  Rng rng(splitmix64_at(seed, 0));
  for (double& b : inst.params.b1) b = rng.uniform(-0.1, 0.1);
  for (double& b : inst.params.b2) b = rng.uniform(-0.1, 0.1);

  const auto real = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(c.page_len)));
  std::vector<std::vector<double>> rows(real, std::vector<double>(c.embed_dim));
  for (auto& row : rows) {
    double norm = 0.0;
    for (double& v : row) {
      v = rng.uniform(-1.0, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  inst.page = make_page(rows, c.page_len, c.embed_dim);

  std::vector<std::size_t> slots(real);
  for (std::size_t i = 0; i < real; ++i) slots[i] = i;
  rng.shuffle(std::span<std::size_t>(slots));
  const auto positives = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::min<std::size_t>(5, real))));
  slots.resize(positives);
  inst.target = uniform_target(inst.page, slots);
  return inst;
}

int cmd_gradcheck(const RunConfig& config, const GradcheckOptions& options, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] {
    config.network.validate();
    if (options.instances < 1) throw ContractError("gradcheck needs at least one instance");
    GradientHook hook;
    if (options.corrupt_gradient) {
      hook = [](Gradients& g) {
        for (double& v : g.w1.values) v *= 1.01;
        for (double& v : g.b1) v *= 1.01;
        for (double& v : g.w2.values) v *= 1.01;
        for (double& v : g.b2) v *= 1.01;
      };
    }
    double worst = 0.0;
    for (int i = 0; i < options.instances; ++i) {
      const auto inst = make_gradcheck_instance(config.network, config.network.seed + static_cast<std::uint64_t>(i));
      const double e = grad_check(inst.params, inst.page, inst.target, options.eps, hook);
      out << "instance " << i << " max_rel_error " << format_double("%.6e", e) << '\n';
      worst = std::max(worst, e);
    }
    out << "max relative error " << format_double("%.6e", worst) << '\n';
    return worst <= options.tolerance ? int{kExitOk} : int{kExitCheckFailed};
  });
}

int cmd_gencorpus(const RunConfig& config, std::size_t n_docs, std::uint64_t seed,
                  std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (n_docs < 1) throw ContractError("gencorpus needs at least one document");
    SyntheticSpec spec;
    spec.n_docs = n_docs;
    spec.seed = seed;
    spec.summary_len = config.summary_len;
    generate_synthetic_corpus(config.corpus_root, spec);
    out << "wrote " << n_docs << " documents under " << config.corpus_root.string() << '\n';
    return int{kExitOk};
  });
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extractive summarizer: page-based neural sentence scoring", "psum"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> page_len, summary_len, hidden_size;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<std::string> model, corpus;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--page-len", page_len, "sentence slots per page");
    sub->add_option("--summary-len", summary_len, "sentences in the summary");
    sub->add_option("--model", model, "model file");
    sub->add_option("--corpus", corpus, "corpus root directory");
    sub->add_option("--epochs", epochs, "training epochs");
    sub->add_option("--hidden-size", hidden_size, "hidden units");
    sub->add_option("--learning-rate", learning_rate, "SGD step size");
  };

  auto* train_cmd = app.add_subcommand("train", "train a model on the corpus training split");
  add_common(train_cmd);

  auto* summarize_cmd = app.add_subcommand("summarize", "summarize a text or XML file");
  add_common(summarize_cmd);
  std::string input;
  bool with_indices = false;
  summarize_cmd->add_option("input", input, "document file")->required();
  summarize_cmd->add_flag("--indices", with_indices, "print original sentence indices");

  auto* eval_cmd = app.add_subcommand("eval", "score summaries of the evaluation split");
  add_common(eval_cmd);
  std::optional<std::string> eval_csv;
  eval_cmd->add_option("--csv", eval_csv, "CSV output path");

  auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate for several page_len values");
  add_common(sweep_cmd);
  std::vector<std::size_t> page_lens{10, 20, 40, 50, 100, 200};
  std::optional<std::string> sweep_csv;
  sweep_cmd->add_option("--page-lens", page_lens, "page_len values")->delimiter(',');
  sweep_cmd->add_option("--csv", sweep_csv, "CSV output path");

  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "compare backprop with finite differences");
  add_common(gradcheck_cmd);
  GradcheckOptions grad_options;
  gradcheck_cmd->add_option("--instances", grad_options.instances, "random instances");
  gradcheck_cmd->add_option("--eps", grad_options.eps, "finite-difference step");
  gradcheck_cmd->add_flag("--corrupt-gradient", grad_options.corrupt_gradient)->group("");

  auto* gencorpus_cmd = app.add_subcommand("gencorpus", "write a synthetic labeled corpus");
  add_common(gencorpus_cmd);
  std::size_t n_docs = 200;
  gencorpus_cmd->add_option("--docs", n_docs, "number of documents");

  std::vector<std::string> argv_rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_rest.begin(), argv_rest.end());
  try {
    app.parse(argv_rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitBadInput;
  }

  RunConfig config;
  const int loaded = guarded(err, [&] {
    if (!config_path.empty()) apply_config_file(config, config_path);
    if (seed) config.network.seed = *seed;
    if (page_len) config.network.page_len = *page_len;
    if (summary_len) config.summary_len = *summary_len;
    if (hidden_size) config.network.hidden_size = *hidden_size;
    if (epochs) config.network.epochs = *epochs;
    if (learning_rate) config.network.learning_rate = *learning_rate;
    if (model) config.model_path = *model;
    if (corpus) config.corpus_root = *corpus;
    if (eval_csv) config.eval_csv = *eval_csv;
    if (sweep_csv) config.sweep_csv = *sweep_csv;
    return int{kExitOk};
  });
  if (loaded != kExitOk) return loaded;

  if (*train_cmd) return cmd_train(config, out, err);
  if (*summarize_cmd) return cmd_summarize(config, input, with_indices, out, err);
  if (*eval_cmd) return cmd_eval(config, out, err);
  if (*sweep_cmd) return cmd_sweep(config, page_lens, out, err);
  if (*gradcheck_cmd) return cmd_gradcheck(config, grad_options, out, err);
  return cmd_gencorpus(config, n_docs, seed.value_or(1), out, err);
}

}  // namespace psum
