#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "psum/corpus.hpp"
#include "psum/embedding.hpp"
#include "psum/network.hpp"
#include "psum/rouge.hpp"
#include "psum/run_config.hpp"

namespace psum {

/// Process exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitBadInput = 2,
  kExitBadOutput = 3,
  kExitCorruptModel = 4,
};

/// Hashed n-gram table, or pretrained vectors when config.pretrained is set.
EmbeddingTable make_embedding_table(const RunConfig& config);

/// Training pairs from every labeled page of `pairs`.
std::vector<TrainingPair> collect_training_pairs(std::span<const CorpusPair> pairs,
                                                 const NetworkConfig& config,
                                                 const EmbeddingTable& table);

/// Summarizes every document and scores it against its reference. Rows keep
/// the order of `pairs`.
std::vector<EvalRow> evaluate(std::span<const CorpusPair> pairs, const NetworkParams& params,
                              const EmbeddingTable& table, std::size_t summary_len);

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_summarize(const RunConfig& config, const std::filesystem::path& input, bool with_indices,
                  std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::span<const std::size_t> page_lens, std::ostream& out,
              std::ostream& err);

struct GradcheckOptions {
  int instances = 20;
  double eps = 1e-5;
  double tolerance = 1e-4;
  bool corrupt_gradient = false;  // test hook: perturb analytic gradients
};

/// A random (params, page, target) triple for gradient checking. Weights
/// follow init_params with nonzero random biases; the page has a random
/// number of real slots holding unit vectors; the target is uniform over
/// one to five random real slots.
struct GradcheckInstance {
  NetworkParams params;
  Page page;
  TargetDistribution target;
};

GradcheckInstance make_gradcheck_instance(const NetworkConfig& config, std::uint64_t seed);

int cmd_gradcheck(const RunConfig& config, const GradcheckOptions& options, std::ostream& out,
                  std::ostream& err);
int cmd_gencorpus(const RunConfig& config, std::size_t n_docs, std::uint64_t seed,
                  std::ostream& out, std::ostream& err);

/// Parses `args` (args[0] is the program name) and runs one subcommand.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace psum
