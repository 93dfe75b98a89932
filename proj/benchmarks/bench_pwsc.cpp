/*
 *  Copyright 2026 The pwsc Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "pwsc/certify.hpp"
#include "pwsc/examples.hpp"
#include "pwsc/filippov.hpp"
#include "pwsc/measure.hpp"
#include "pwsc/regularize.hpp"

namespace {

pwsc::PwsSystem example(int id) { return pwsc::load_system(pwsc::example_config(id)); }

pwsc::Vector point(double a, double b) { return (pwsc::Vector(2) << a, b).finished(); }

void BM_MatrixMeasure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  pwsc::Matrix B(n, n), A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      B(i, j) = u(rng);
      A(i, j) = u(rng);
    }
  const pwsc::Matrix Q = B * B.transpose() + pwsc::Matrix::Identity(n, n);
  const pwsc::Metric metric(Q, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(metric.measure(A));
}
BENCHMARK(BM_MatrixMeasure)->Arg(2)->Arg(4)->Arg(8);

void BM_Certify(benchmark::State& state) {
  const int id = static_cast<int>(state.range(0));
  const auto cfg = pwsc::load_config(pwsc::example_config(id));
  for (auto _ : state) benchmark::DoNotOptimize(pwsc::check_certificate(cfg.system, *cfg.metric));
}
BENCHMARK(BM_Certify)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_IntegrateFilippov(benchmark::State& state) {
  const int id = static_cast<int>(state.range(0));
  const auto system = example(id);
  const pwsc::Vector x0 = id == 1 ? point(-3, -4) : point(-2, -2);
  for (auto _ : state) benchmark::DoNotOptimize(pwsc::integrate(system, x0, 20.0));
}
BENCHMARK(BM_IntegrateFilippov)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_RegularizedField(benchmark::State& state) {
  const auto system = example(static_cast<int>(state.range(0)));
  const pwsc::RegularizedSystem reg(system, 0.1);
  const pwsc::Vector x = point(0.05, 0.03);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reg.field(x));
    benchmark::DoNotOptimize(reg.jacobian(x));
  }
}
BENCHMARK(BM_RegularizedField)->Arg(1)->Arg(2);

void BM_IntegrateRegularized(benchmark::State& state) {
  const auto system = example(1);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(pwsc::integrate_regularized(system, eps, point(-3, -4), 10.0));
}
BENCHMARK(BM_IntegrateRegularized)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
