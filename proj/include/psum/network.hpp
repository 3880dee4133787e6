#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psum/kernels.hpp"
#include "psum/matrix.hpp"

namespace psum {

struct NetworkConfig {
  std::size_t page_len = 40;
  std::size_t embed_dim = 100;
  std::size_t hidden_size = 500;
  double learning_rate = 0.02;
  int epochs = 20;
  std::uint64_t seed = 1;

  std::size_t input_size() const noexcept { return page_len * embed_dim; }

  /// Throws ContractError unless page_len, embed_dim, hidden_size, epochs >= 1
  /// and learning_rate > 0.
  void validate() const;
};

/// Weights of the page scorer: input (page_len * embed_dim) -> tanh hidden
/// layer -> one logit per sentence slot.
struct NetworkParams {
  NetworkConfig config;
  Matrix w1;               // hidden_size x input_size
  std::vector<double> b1;  // hidden_size
  Matrix w2;               // page_len x hidden_size
  std::vector<double> b2;  // page_len

  bool operator==(const NetworkParams& other) const {
    return w1 == other.w1 && b1 == other.b1 && w2 == other.w2 && b2 == other.b2;
  }
};

/// page_len sentence slots. Real sentences occupy a prefix of the slots; the
/// remaining rows are zero and masked out.
struct Page {
  Matrix vectors;                        // page_len x embed_dim
  std::vector<bool> mask;                // page_len
  std::vector<std::size_t> sentence_refs;  // one per real slot

  std::size_t page_len() const noexcept { return mask.size(); }
  /// Length of the mask-true prefix.
  std::size_t real_count() const noexcept {
    std::size_t n = 0;
    while (n < mask.size() && mask[n]) ++n;
    return n;
  }
};

/// Builds a page from `rows` (each embed_dim long), padding to page_len.
Page make_page(std::span<const std::vector<double>> rows, std::size_t page_len,
               std::size_t embed_dim, std::vector<std::size_t> sentence_refs = {});

struct TargetDistribution {
  std::vector<double> probs;  // page_len, zero on padded slots, sums to 1
};

/// Uniform distribution over the given slots. Throws ContractError if a slot
/// is out of range or masked, or if `positives` is empty.
TargetDistribution uniform_target(const Page& page, std::span<const std::size_t> positives);

struct ForwardResult {
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> probs;
};

struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;

  static Gradients zeros_like(const NetworkParams& params);
};

/// Xavier-uniform weights from a generator seeded by config.seed, zero biases.
NetworkParams init_params(const NetworkConfig& config);

/// Softmax restricted to mask-true slots; masked slots get exactly 0.
std::vector<double> masked_softmax(std::span<const double> logits, const std::vector<bool>& mask);

ForwardResult forward(const Page& page, const NetworkParams& params,
                      kernels::Exec exec = kernels::Exec::parallel);

inline constexpr double kLogEpsilon = 1e-12;

/// -sum_i target_i * ln(probs_i + 1e-12) over mask-true slots.
double cross_entropy(std::span<const double> probs, const TargetDistribution& target,
                     const std::vector<bool>& mask);

/// Gradients of cross_entropy(forward(page)) written into `grads`, which must
/// already have the parameter shapes. Returns the loss.
double backward_into(const Page& page, const NetworkParams& params,
                     const TargetDistribution& target, Gradients& grads,
                     kernels::Exec exec = kernels::Exec::parallel);

Gradients backward(const Page& page, const NetworkParams& params, const TargetDistribution& target,
                   kernels::Exec exec = kernels::Exec::parallel);

/// p <- p - lr * dp for every parameter.
void sgd_step(NetworkParams& params, const Gradients& grads, double lr,
              kernels::Exec exec = kernels::Exec::parallel);

/// One SGD step on a single pair without materializing gradients. The
/// updated params are bitwise equal to backward() followed by sgd_step().
/// Returns the loss before the update.
double train_step(NetworkParams& params, const Page& page, const TargetDistribution& target,
                  double lr, kernels::Exec exec = kernels::Exec::parallel);

/// Optional hook that may modify analytic gradients before comparison. Used
/// to confirm that the checker detects broken gradients.
using GradientHook = std::function<void(Gradients&)>;

inline constexpr std::size_t kGradCheckSamples = 256;

/// Compares analytic gradients with central differences on a fixed,
/// seed-independent sample of kGradCheckSamples parameter coordinates drawn
/// across all four tensors. Returns the maximum relative error
/// |g - g_num| / max(|g|, |g_num|, 1e-8).
double grad_check(const NetworkParams& params, const Page& page, const TargetDistribution& target,
                  double eps = 1e-5, const GradientHook& hook = {});

struct TrainingPair {
  Page page;
  TargetDistribution target;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> epoch_loss;  // mean per-pair loss of each epoch
};

/// Per-example SGD from init_params(config). Each epoch visits the pairs in
/// an order shuffled by a generator derived from config.seed. Throws
/// ContractError on an empty set or a shape mismatch.
TrainResult train(std::span<const TrainingPair> pairs, const NetworkConfig& config,
                  const std::function<void(int epoch, double mean_loss)>& on_epoch = {});

}  // namespace psum
