#include "psum/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "psum/error.hpp"
#include "psum/random.hpp"

namespace psum {
namespace {

constexpr std::uint64_t kShuffleStream = 0x73687566666c65ULL;
constexpr std::uint64_t kGradCheckSeed = 0x6772616463686bULL;

void check_page(const Page& page, const NetworkConfig& config) {
  if (page.vectors.rows != config.page_len || page.vectors.cols != config.embed_dim ||
      page.mask.size() != config.page_len)
    throw ContractError("page shape does not match network config (page_len " +
                        std::to_string(config.page_len) + ", embed_dim " +
                        std::to_string(config.embed_dim) + ")");
  const std::size_t real = page.real_count();
  if (real == 0) throw ContractError("page must have at least one real sentence slot");
  for (std::size_t i = real; i < page.mask.size(); ++i) {
    if (page.mask[i]) throw ContractError("page mask must be a prefix of real slots");
  }
}

void check_params(const NetworkParams& params) {
  const auto& c = params.config;
  if (params.w1.rows != c.hidden_size || params.w1.cols != c.input_size() ||
      params.b1.size() != c.hidden_size || params.w2.rows != c.page_len ||
      params.w2.cols != c.hidden_size || params.b2.size() != c.page_len)
    throw ContractError("network parameter shapes do not match config");
}

void check_target(const TargetDistribution& target, std::size_t page_len) {
  if (target.probs.size() != page_len) throw ContractError("target length does not match page_len");
}

void check_grads(const Gradients& g, const NetworkParams& params) {
  if (g.w1.rows != params.w1.rows || g.w1.cols != params.w1.cols || g.b1.size() != params.b1.size() ||
      g.w2.rows != params.w2.rows || g.w2.cols != params.w2.cols || g.b2.size() != params.b2.size())
    throw ContractError("gradient shapes do not match parameters");
}

// Flattened page input up to the last real sentence; the padded rows that
// follow are zero.
std::span<const double> active_input(const Page& page) {
  return std::span<const double>(page.vectors.values).first(page.real_count() * page.vectors.cols);
}

// Writes u v^T into `a`, overwriting. Columns past v are zeroed.
void set_outer(Matrix& a, std::span<const double> u, std::span<const double> v, kernels::Exec exec) {
  std::fill(a.values.begin(), a.values.end(), 0.0);
  kernels::add_outer(exec, a, 1.0, u, v);
}

double& coordinate(NetworkParams& p, std::size_t tensor, std::size_t index) {
  switch (tensor) {
    case 0: return p.w1.values[index];
    case 1: return p.b1[index];
    case 2: return p.w2.values[index];
    default: return p.b2[index];
  }
}

double coordinate(const Gradients& g, std::size_t tensor, std::size_t index) {
  switch (tensor) {
    case 0: return g.w1.values[index];
    case 1: return g.b1[index];
    case 2: return g.w2.values[index];
    default: return g.b2[index];
  }
}

std::size_t tensor_size(const NetworkParams& p, std::size_t tensor) {
  switch (tensor) {
    case 0: return p.w1.size();
    case 1: return p.b1.size();
    case 2: return p.w2.size();
    default: return p.b2.size();
  }
}

double loss_of(const Page& page, const NetworkParams& params, const TargetDistribution& target) {
  const auto result = forward(page, params, kernels::Exec::parallel);
  return cross_entropy(result.probs, target, page.mask);
}

}  // namespace

void NetworkConfig::validate() const {
  if (page_len < 1) throw ContractError("page_len must be >= 1");
  if (embed_dim < 1) throw ContractError("embed_dim must be >= 1");
  if (hidden_size < 1) throw ContractError("hidden_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ContractError("learning_rate must be > 0");
  if (epochs < 1) throw ContractError("epochs must be >= 1");
}

Page make_page(std::span<const std::vector<double>> rows, std::size_t page_len,
               std::size_t embed_dim, std::vector<std::size_t> sentence_refs) {
  if (rows.empty() || rows.size() > page_len)
    throw ContractError("a page holds between 1 and page_len sentences");
  if (sentence_refs.empty()) {
    sentence_refs.resize(rows.size());
    std::iota(sentence_refs.begin(), sentence_refs.end(), std::size_t{0});
  }
  if (sentence_refs.size() != rows.size()) throw ContractError("one sentence ref per row required");

  Page page;
  page.vectors = Matrix(page_len, embed_dim);
  page.mask.assign(page_len, false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != embed_dim) throw ContractError("sentence vector has wrong dimension");
    std::copy(rows[i].begin(), rows[i].end(), page.vectors.row(i).begin());
    page.mask[i] = true;
  }
  page.sentence_refs = std::move(sentence_refs);
  return page;
}

TargetDistribution uniform_target(const Page& page, std::span<const std::size_t> positives) {
  if (positives.empty()) throw ContractError("target needs at least one positive slot");
  TargetDistribution target;
  target.probs.assign(page.page_len(), 0.0);
  for (std::size_t slot : positives) {
    if (slot >= page.page_len() || !page.mask[slot])
      throw ContractError("positive slot " + std::to_string(slot) + " is not a real sentence");
    target.probs[slot] = 1.0;
  }
  const double count = std::count(target.probs.begin(), target.probs.end(), 1.0);
  for (double& p : target.probs) p /= count;
  return target;
}

Gradients Gradients::zeros_like(const NetworkParams& params) {
  Gradients g;
  g.w1 = Matrix(params.w1.rows, params.w1.cols);
  g.b1.assign(params.b1.size(), 0.0);
  g.w2 = Matrix(params.w2.rows, params.w2.cols);
  g.b2.assign(params.b2.size(), 0.0);
  return g;
}

NetworkParams init_params(const NetworkConfig& config) {
  config.validate();
  NetworkParams p;
  p.config = config;
  p.w1 = Matrix(config.hidden_size, config.input_size());
  p.b1.assign(config.hidden_size, 0.0);
  p.w2 = Matrix(config.page_len, config.hidden_size);
  p.b2.assign(config.page_len, 0.0);

  Rng rng(config.seed);
  const double bound1 =
      std::sqrt(6.0 / static_cast<double>(config.input_size() + config.hidden_size));
  for (double& w : p.w1.values) w = rng.uniform(-bound1, bound1);
  const double bound2 = std::sqrt(6.0 / static_cast<double>(config.hidden_size + config.page_len));
  for (double& w : p.w2.values) w = rng.uniform(-bound2, bound2);
  return p;
}

std::vector<double> masked_softmax(std::span<const double> logits, const std::vector<bool>& mask) {
  if (logits.size() != mask.size()) throw ContractError("masked_softmax: mask length mismatch");
  std::vector<double> probs(logits.size(), 0.0);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) max_logit = std::max(max_logit, logits[i]);
  }
  if (max_logit == -std::numeric_limits<double>::infinity()) return probs;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!mask[i]) continue;
    probs[i] = std::exp(logits[i] - max_logit);
    total += probs[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) probs[i] /= total;
  }
  return probs;
}

ForwardResult forward(const Page& page, const NetworkParams& params, kernels::Exec exec) {
  check_params(params);
  check_page(page, params.config);
  ForwardResult r;
  r.hidden.resize(params.config.hidden_size);
  kernels::affine(exec, params.w1, active_input(page), params.b1, r.hidden);
  for (double& h : r.hidden) h = std::tanh(h);
  r.logits.resize(params.config.page_len);
  kernels::affine(kernels::Exec::serial, params.w2, r.hidden, params.b2, r.logits);
  r.probs = masked_softmax(r.logits, page.mask);
  return r;
}

double cross_entropy(std::span<const double> probs, const TargetDistribution& target,
                     const std::vector<bool>& mask) {
  if (probs.size() != target.probs.size() || probs.size() != mask.size())
    throw ContractError("cross_entropy: length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (mask[i] && target.probs[i] != 0.0) loss -= target.probs[i] * std::log(probs[i] + kLogEpsilon);
  }
  return loss;
}

double backward_into(const Page& page, const NetworkParams& params,
                     const TargetDistribution& target, Gradients& grads, kernels::Exec exec) {
  const auto fwd = forward(page, params, exec);
  check_target(target, params.config.page_len);
  check_grads(grads, params);

  std::vector<double> delta(params.config.page_len, 0.0);
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (page.mask[i]) delta[i] = fwd.probs[i] - target.probs[i];
  }
  set_outer(grads.w2, delta, fwd.hidden, kernels::Exec::serial);
  grads.b2 = delta;

  std::vector<double> hidden_delta(params.config.hidden_size);
  kernels::transposed_product(exec, params.w2, delta, hidden_delta);
  for (std::size_t k = 0; k < hidden_delta.size(); ++k) {
    hidden_delta[k] *= 1.0 - fwd.hidden[k] * fwd.hidden[k];
  }
  set_outer(grads.w1, hidden_delta, active_input(page), exec);
  grads.b1 = hidden_delta;

  return cross_entropy(fwd.probs, target, page.mask);
}

Gradients backward(const Page& page, const NetworkParams& params, const TargetDistribution& target,
                   kernels::Exec exec) {
  auto grads = Gradients::zeros_like(params);
  backward_into(page, params, target, grads, exec);
  return grads;
}

double train_step(NetworkParams& params, const Page& page, const TargetDistribution& target,
                  double lr, kernels::Exec exec) {
  const auto fwd = forward(page, params, exec);
  check_target(target, params.config.page_len);

  std::vector<double> delta(params.config.page_len, 0.0);
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (page.mask[i]) delta[i] = fwd.probs[i] - target.probs[i];
  }
  std::vector<double> hidden_delta(params.config.hidden_size);
  kernels::transposed_product(exec, params.w2, delta, hidden_delta);
  for (std::size_t k = 0; k < hidden_delta.size(); ++k) {
    hidden_delta[k] *= 1.0 - fwd.hidden[k] * fwd.hidden[k];
  }

  kernels::axpy_outer(kernels::Exec::serial, params.w2, -lr, delta, fwd.hidden);
  kernels::axpy(kernels::Exec::serial, -lr, delta, params.b2);
  // Columns past the real rows have zero gradient and stay untouched.
  kernels::axpy_outer(exec, params.w1, -lr, hidden_delta, active_input(page));
  kernels::axpy(kernels::Exec::serial, -lr, hidden_delta, params.b1);
  return cross_entropy(fwd.probs, target, page.mask);
}

void sgd_step(NetworkParams& params, const Gradients& grads, double lr, kernels::Exec exec) {
  check_grads(grads, params);
  kernels::axpy(exec, -lr, grads.w1.values, params.w1.values);
  kernels::axpy(kernels::Exec::serial, -lr, grads.b1, params.b1);
  kernels::axpy(kernels::Exec::serial, -lr, grads.w2.values, params.w2.values);
  kernels::axpy(kernels::Exec::serial, -lr, grads.b2, params.b2);
}

double grad_check(const NetworkParams& params, const Page& page, const TargetDistribution& target,
                  double eps, const GradientHook& hook) {
  if (!(eps > 0.0)) throw ContractError("grad_check: eps must be > 0");
  auto analytic = backward(page, params, target);
  if (hook) hook(analytic);

  NetworkParams probe = params;
  Rng rng(kGradCheckSeed);
  double worst = 0.0;
  for (std::size_t s = 0; s < kGradCheckSamples; ++s) {
    const std::size_t tensor = s % 4;
    const std::size_t index = rng.below(tensor_size(params, tensor));
    double& slot = coordinate(probe, tensor, index);
    const double saved = slot;
    slot = saved + eps;
    const double loss_plus = loss_of(page, probe, target);
    slot = saved - eps;
    const double loss_minus = loss_of(page, probe, target);
    slot = saved;

    const double numeric = (loss_plus - loss_minus) / (2.0 * eps);
    const double exact = coordinate(analytic, tensor, index);
    const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(exact - numeric) / denom);
  }
  return worst;
}

TrainResult train(std::span<const TrainingPair> pairs, const NetworkConfig& config,
                  const std::function<void(int, double)>& on_epoch) {
  config.validate();
  if (pairs.empty()) throw ContractError("train: empty training set");
  for (const auto& pair : pairs) {
    check_page(pair.page, config);
    check_target(pair.target, config.page_len);
  }

  TrainResult result{init_params(config), {}};
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed ^ kShuffleStream);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t idx : order) {
      total += train_step(result.params, pairs[idx].page, pairs[idx].target, config.learning_rate);
    }
    const double mean = total / static_cast<double>(pairs.size());
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  return result;
}

}  // namespace psum
