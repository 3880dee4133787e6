#include <benchmark/benchmark.h>

#include <random>

#include "psum/kernels.hpp"
#include "psum/network.hpp"

namespace {

using psum::Matrix;
using psum::kernels::Exec;

Matrix random_matrix(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values) v = u(rng);
  return m;
}

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Default network shape: 500 x (40 * 100).
void BM_Affine(benchmark::State& state, Exec exec) {
  const auto a = random_matrix(500, 4000);
  const auto x = random_vector(4000), bias = random_vector(500);
  std::vector<double> out(500);
  for (auto _ : state) {
    psum::kernels::affine(exec, a, x, bias, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(a.size() * sizeof(double)));
}

void BM_AddOuter(benchmark::State& state, Exec exec) {
  auto a = random_matrix(500, 4000);
  const auto u = random_vector(500), v = random_vector(4000);
  for (auto _ : state) {
    psum::kernels::add_outer(exec, a, 1e-9, u, v);
    benchmark::DoNotOptimize(a.values.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(a.size() * sizeof(double)));
}

void BM_TrainStep(benchmark::State& state, Exec exec) {
  psum::NetworkConfig config;
  auto params = psum::init_params(config);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) rows.push_back(random_vector(config.embed_dim));
  const auto page = psum::make_page(rows, config.page_len, config.embed_dim);
  const std::vector<std::size_t> positives = {3, 17};
  const auto target = psum::uniform_target(page, positives);
  for (auto _ : state) {
    benchmark::DoNotOptimize(psum::train_step(params, page, target, 1e-6, exec));
  }
}

BENCHMARK_CAPTURE(BM_Affine, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_Affine, parallel, Exec::parallel);
BENCHMARK_CAPTURE(BM_AddOuter, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_AddOuter, parallel, Exec::parallel);
BENCHMARK_CAPTURE(BM_TrainStep, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_TrainStep, parallel, Exec::parallel);

}  // namespace

BENCHMARK_MAIN();
