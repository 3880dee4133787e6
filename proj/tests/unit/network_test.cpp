#include "psum/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "psum/app.hpp"
#include "psum/error.hpp"
#include "test_support.hpp"

namespace psum {
namespace {

using kernels::Exec;

NetworkConfig small_config(std::size_t page_len = 5, std::size_t dim = 4, std::size_t hidden = 6) {
  NetworkConfig c;
  c.page_len = page_len;
  c.embed_dim = dim;
  c.hidden_size = hidden;
  c.epochs = 5;
  return c;
}

NetworkParams zero_params(const NetworkConfig& c) {
  auto p = init_params(c);
  std::fill(p.w1.values.begin(), p.w1.values.end(), 0.0);
  std::fill(p.w2.values.begin(), p.w2.values.end(), 0.0);
  return p;
}

Page random_page(const NetworkConfig& c, std::size_t real, std::mt19937_64& rng) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < real; ++i) rows.push_back(testing::random_vector(c.embed_dim, rng));
  return make_page(rows, c.page_len, c.embed_dim);
}

TEST(NetworkConfig, Validation) {
  NetworkConfig c;
  EXPECT_NO_THROW(c.validate());
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.page_len = 0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.hidden_size = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(InitParams, DeterministicZeroBiasBounded) {
  const NetworkConfig c;
  const auto a = init_params(c), b = init_params(c);
  EXPECT_TRUE(a == b);
  for (double v : a.b1) EXPECT_EQ(v, 0.0);
  for (double v : a.b2) EXPECT_EQ(v, 0.0);
  const double bound1 = std::sqrt(6.0 / static_cast<double>(c.input_size() + c.hidden_size));
  const double bound2 = std::sqrt(6.0 / static_cast<double>(c.hidden_size + c.page_len));
  for (double v : a.w1.values) ASSERT_LE(std::abs(v), bound1);
  for (double v : a.w2.values) ASSERT_LE(std::abs(v), bound2);
  EXPECT_EQ(a.w1.rows, c.hidden_size);
  EXPECT_EQ(a.w1.cols, c.input_size());
  EXPECT_EQ(a.w2.rows, c.page_len);
  auto other = c;
  other.seed = 2;
  EXPECT_FALSE(init_params(other) == a);
}

TEST(MakePage, PadsAndMasks) {
  const std::vector<std::vector<double>> rows = {{1, 2}, {3, 4}};
  const auto page = make_page(rows, 4, 2, {7, 9});
  EXPECT_EQ(page.real_count(), 2u);
  EXPECT_EQ(page.mask, (std::vector<bool>{true, true, false, false}));
  EXPECT_EQ(page.vectors.values, (std::vector<double>{1, 2, 3, 4, 0, 0, 0, 0}));
  EXPECT_EQ(page.sentence_refs, (std::vector<std::size_t>{7, 9}));
}

TEST(MakePage, RejectsBadShapes) {
  const std::vector<std::vector<double>> three = {{1}, {2}, {3}};
  EXPECT_THROW(make_page(three, 2, 1), ContractError);
  const std::vector<std::vector<double>> wrong = {{1, 2, 3}};
  EXPECT_THROW(make_page(wrong, 2, 2), ContractError);
}

TEST(UniformTarget, SpreadsMass) {
  const std::vector<std::vector<double>> rows = {{1}, {2}, {3}};
  const auto page = make_page(rows, 5, 1);
  const std::vector<std::size_t> pos = {0, 2};
  const auto t = uniform_target(page, pos);
  EXPECT_EQ(t.probs, (std::vector<double>{0.5, 0, 0.5, 0, 0}));
  const std::vector<std::size_t> masked = {3};
  EXPECT_THROW(uniform_target(page, masked), ContractError);
  EXPECT_THROW(uniform_target(page, std::span<const std::size_t>{}), ContractError);
}

TEST(Forward, ZeroParamsFullMaskIsUniform) {
  const auto c = small_config(40, 3, 4);
  std::mt19937_64 rng(1);
  const auto out = forward(random_page(c, 40, rng), zero_params(c));
  for (double p : out.probs) EXPECT_DOUBLE_EQ(p, 1.0 / 40.0);
}

TEST(Forward, ZeroParamsPartialMask) {
  const auto c = small_config(10, 3, 4);
  std::mt19937_64 rng(2);
  const auto out = forward(random_page(c, 4, rng), zero_params(c));
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(out.probs[i], i < 4 ? 0.25 : 0.0);
}

TEST(Forward, HandSoftmaxTwoThirds) {
  const auto c = small_config(2, 2, 3);
  auto p = zero_params(c);
  p.b2 = {std::log(2.0), 0.0};
  std::mt19937_64 rng(3);
  const auto out = forward(random_page(c, 2, rng), p);
  EXPECT_NEAR(out.probs[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(out.probs[1], 1.0 / 3.0, 1e-15);
}

TEST(Forward, ShapeMismatchThrows) {
  const auto c = small_config();
  std::mt19937_64 rng(4);
  const auto page = random_page(small_config(6), 2, rng);
  EXPECT_THROW(forward(page, init_params(c)), ContractError);
}

TEST(Forward, SerialAndParallelAgreeBitwise) {
  const auto c = small_config(20, 30, 50);
  std::mt19937_64 rng(5);
  const auto page = random_page(c, 13, rng);
  const auto p = init_params(c);
  const auto a = forward(page, p, Exec::serial), b = forward(page, p, Exec::parallel);
  EXPECT_EQ(a.hidden, b.hidden);
  EXPECT_EQ(a.logits, b.logits);
  EXPECT_EQ(a.probs, b.probs);
}

TEST(MaskedSoftmax, LargeLogitsStayFinite) {
  const std::vector<double> logits = {1000.0, 999.0, -1e300};
  const auto p = masked_softmax(logits, {true, true, false});
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
  EXPECT_GT(p[0], p[1]);
  EXPECT_EQ(p[2], 0.0);
}

TEST(ForwardProperty, ProbsNormalizedAndShiftInvariant) {
  std::mt19937_64 rng(6);
  for (int iter = 0; iter < 100; ++iter) {
    auto c = small_config(1 + rng() % 12, 1 + rng() % 6, 1 + rng() % 9);
    c.seed = rng();
    const auto page = random_page(c, 1 + rng() % c.page_len, rng);
    auto p = init_params(c);
    for (double& b : p.b2) b = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto out = forward(page, p);
    double sum = 0.0;
    for (std::size_t i = 0; i < c.page_len; ++i) {
      if (page.mask[i]) sum += out.probs[i];
      else EXPECT_EQ(out.probs[i], 0.0);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);

    const double shift = std::uniform_real_distribution<double>(-50, 50)(rng);
    auto shifted = p;
    for (double& b : shifted.b2) b += shift;
    const auto out2 = forward(page, shifted);
    for (std::size_t i = 0; i < c.page_len; ++i) EXPECT_NEAR(out.probs[i], out2.probs[i], 1e-9);
  }
}

TEST(CrossEntropy, Examples) {
  const std::vector<bool> full40(40, true);
  TargetDistribution one_hot{std::vector<double>(40, 0.0)};
  one_hot.probs[3] = 1.0;
  std::vector<double> perfect(40, 0.0);
  perfect[3] = 1.0;
  EXPECT_LE(cross_entropy(perfect, one_hot, full40), 1e-11);
  EXPECT_GE(cross_entropy(perfect, one_hot, full40), -1e-11);

  const std::vector<double> uniform(40, 1.0 / 40.0);
  EXPECT_NEAR(cross_entropy(uniform, one_hot, full40), 3.6888794541139363, 1e-9);

  const TargetDistribution two{{0.5, 0.5, 0.0}};
  const std::vector<double> half = {0.5, 0.5, 0.0};
  EXPECT_NEAR(cross_entropy(half, two, {true, true, true}), 0.6931471805599453, 1e-9);
}

TEST(CrossEntropy, ZeroProbabilityIsGuarded) {
  const TargetDistribution t{{1.0, 0.0}};
  const double loss = cross_entropy(std::vector<double>{0.0, 1.0}, t, {true, true});
  EXPECT_NEAR(loss, -std::log(kLogEpsilon), 1e-9);
}

TEST(Backward, PerfectPredictionGivesZeroGradients) {
  const auto c = small_config(4, 3, 5);
  std::mt19937_64 rng(7);
  const auto page = random_page(c, 1, rng);
  const std::vector<std::size_t> pos = {0};
  const auto g = backward(page, init_params(c), uniform_target(page, pos));
  for (double v : g.w1.values) EXPECT_EQ(v, 0.0);
  for (double v : g.b1) EXPECT_EQ(v, 0.0);
  for (double v : g.w2.values) EXPECT_EQ(v, 0.0);
  for (double v : g.b2) EXPECT_EQ(v, 0.0);
}

TEST(Backward, MaskedOutputRowsAreZero) {
  const auto c = small_config(8, 3, 5);
  std::mt19937_64 rng(8);
  const auto page = random_page(c, 3, rng);
  const std::vector<std::size_t> pos = {1};
  const auto g = backward(page, init_params(c), uniform_target(page, pos));
  for (std::size_t r = 3; r < 8; ++r) {
    for (double v : g.w2.row(r)) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(g.b2[r], 0.0);
  }
  double nonzero = 0.0;
  for (double v : g.w2.values) nonzero += std::abs(v);
  EXPECT_GT(nonzero, 0.0);
}

TEST(Backward, SerialAndParallelAgreeBitwise) {
  const auto c = small_config(10, 20, 30);
  std::mt19937_64 rng(9);
  const auto page = random_page(c, 7, rng);
  const std::vector<std::size_t> pos = {0, 4};
  const auto t = uniform_target(page, pos);
  const auto p = init_params(c);
  const auto a = backward(page, p, t, Exec::serial), b = backward(page, p, t, Exec::parallel);
  EXPECT_EQ(a.w1, b.w1);
  EXPECT_EQ(a.b1, b.b1);
  EXPECT_EQ(a.w2, b.w2);
  EXPECT_EQ(a.b2, b.b2);
}

TEST(SgdStep, Examples) {
  const auto c = small_config(1, 1, 1);
  auto p = init_params(c);
  p.w1.values = {1.0};
  auto g = Gradients::zeros_like(p);
  g.w1.values = {2.0};
  auto unchanged = p;
  sgd_step(unchanged, g, 0.0);
  EXPECT_TRUE(unchanged == p);
  auto zero_grad = p;
  sgd_step(zero_grad, Gradients::zeros_like(p), 0.3);
  EXPECT_TRUE(zero_grad == p);
  sgd_step(p, g, 0.1);
  EXPECT_DOUBLE_EQ(p.w1.values[0], 0.8);
}

TEST(TrainStep, MatchesBackwardThenSgdBitwise) {
  std::mt19937_64 rng(14);
  for (int iter = 0; iter < 20; ++iter) {
    auto c = small_config(1 + rng() % 10, 1 + rng() % 8, 1 + rng() % 12);
    c.seed = rng();
    const auto inst = make_gradcheck_instance(c, rng());
    for (auto exec : {Exec::serial, Exec::parallel}) {
      auto fused = inst.params, reference = inst.params;
      const double loss = train_step(fused, inst.page, inst.target, 0.07, exec);
      auto grads = Gradients::zeros_like(reference);
      const double ref_loss = backward_into(inst.page, reference, inst.target, grads, exec);
      sgd_step(reference, grads, 0.07, exec);
      ASSERT_EQ(loss, ref_loss);
      ASSERT_TRUE(fused == reference);
    }
  }
}

TEST(GradCheck, DefaultSizedRandomInstances) {
  const NetworkConfig c;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = make_gradcheck_instance(c, seed);
    EXPECT_LE(grad_check(inst.params, inst.page, inst.target), 1e-4) << "seed " << seed;
  }
}

TEST(GradCheck, SmallRandomInstances) {
  std::mt19937_64 rng(10);
  for (int iter = 0; iter < 30; ++iter) {
    auto c = small_config(1 + rng() % 8, 1 + rng() % 5, 1 + rng() % 7);
    c.seed = rng();
    const auto inst = make_gradcheck_instance(c, rng());
    EXPECT_LE(grad_check(inst.params, inst.page, inst.target), 1e-4);
  }
}

TEST(GradCheck, PerfectPredictionUnderFloor) {
  const NetworkConfig c;
  std::mt19937_64 rng(11);
  const auto page = random_page(c, 1, rng);
  const std::vector<std::size_t> pos = {0};
  EXPECT_LE(grad_check(init_params(c), page, uniform_target(page, pos)), 1e-4);
}

TEST(GradCheck, HalvingEpsDoesNotBlowUp) {
  auto c = small_config(6, 4, 8);
  const auto inst = make_gradcheck_instance(c, 77);
  const double e1 = grad_check(inst.params, inst.page, inst.target, 1e-4);
  const double e2 = grad_check(inst.params, inst.page, inst.target, 5e-5);
  EXPECT_LE(e2, 10.0 * std::max(e1, 1e-12));
}

TEST(GradCheck, DetectsCorruptedGradient) {
  const NetworkConfig c;
  const auto inst = make_gradcheck_instance(c, 3);
  const auto err = grad_check(inst.params, inst.page, inst.target, 1e-5, [](Gradients& g) {
    for (double& v : g.w1.values) v *= 1.01;
  });
  EXPECT_GT(err, 1e-4);
}

TEST(Train, RejectsEmptySet) {
  EXPECT_THROW(train(std::span<const TrainingPair>{}, small_config()), ContractError);
}

TEST(Train, SingleRepeatedPairLossNonIncreasing) {
  auto c = small_config(6, 5, 8);
  c.epochs = 30;
  c.learning_rate = 0.05;
  std::mt19937_64 rng(12);
  const auto page = random_page(c, 5, rng);
  const std::vector<std::size_t> pos = {2};
  const std::vector<TrainingPair> pairs(4, TrainingPair{page, uniform_target(page, pos)});
  std::vector<double> seen;
  const auto result = train(pairs, c, [&](int, double loss) { seen.push_back(loss); });
  ASSERT_EQ(result.epoch_loss.size(), 30u);
  EXPECT_EQ(seen, result.epoch_loss);
  for (std::size_t e = 1; e < result.epoch_loss.size(); ++e)
    EXPECT_LE(result.epoch_loss[e], result.epoch_loss[e - 1] + 1e-6) << "epoch " << e;
  EXPECT_LT(result.epoch_loss.back(), result.epoch_loss.front());
}

TEST(Train, Deterministic) {
  auto c = small_config(4, 3, 5);
  std::mt19937_64 rng(13);
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 10; ++i) {
    const auto page = random_page(c, 1 + rng() % 4, rng);
    const std::vector<std::size_t> pos = {0};
    pairs.push_back({page, uniform_target(page, pos)});
  }
  const auto a = train(pairs, c), b = train(pairs, c);
  EXPECT_TRUE(a.params == b.params);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
}

}  // namespace
}  // namespace psum
