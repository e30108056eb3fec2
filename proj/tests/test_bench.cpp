#include "fobo/bench.hpp"
#include "fobo/optim.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fobo;

namespace {

Point random_point(const Domain& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(static_cast<Eigen::Index>(dom.dim()));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = u(rng);
  return dom.from_unit(p);
}

Point central_difference(const BenchmarkSpec& spec, const Point& x, double h) {
  Point g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Point lo = x, hi = x;
    lo[i] -= h;
    hi[i] += h;
    g[i] = (evaluate(spec, hi).value - evaluate(spec, lo).value) / (2 * h);
  }
  return g;
}

// Gradient descent on the separable training loss sum (x_i - 10 i)^2 + lambda_i x_i^2.
Point inner_by_gradient_descent(const Point& lambda) {
  Point x = Point::Zero(6);
  for (int i = 0; i < 6; ++i) {
    const double curvature = 2.0 * (1.0 + lambda[i]);
    const double step = 1.0 / curvature;
    for (int it = 0; it < 100000; ++it) {
      const double g = 2.0 * (x[i] - 10.0 * (i + 1)) + 2.0 * lambda[i] * x[i];
      if (std::abs(g) < 1e-10) break;
      x[i] -= 0.5 * step * g;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("benchmark names round-trip") {
  for (BenchmarkId id : all_benchmarks()) {
    const auto parsed = parse_benchmark(benchmark_name(id));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == id);
    CHECK(benchmark_spec(id).name == benchmark_name(id));
  }
  CHECK_FALSE(parse_benchmark("rosenbrock").has_value());
  CHECK(all_benchmarks().size() == 7);
}

TEST_CASE("benchmark dimensions and boxes") {
  const auto dim = [](BenchmarkId id) { return benchmark_spec(id).domain.dim(); };
  CHECK(dim(BenchmarkId::branin) == 2);
  CHECK(dim(BenchmarkId::levy4) == 4);
  CHECK(dim(BenchmarkId::ackley5) == 5);
  CHECK(dim(BenchmarkId::dixonprice5) == 5);
  CHECK(dim(BenchmarkId::hartmann6) == 6);
  CHECK(dim(BenchmarkId::cosine8) == 8);
  CHECK(dim(BenchmarkId::reg6d) == 6);
  const BenchmarkSpec br = benchmark_spec(BenchmarkId::branin);
  CHECK(br.domain.lower()[0] == -5.0);
  CHECK(br.domain.upper()[0] == 10.0);
  CHECK(br.domain.lower()[1] == 0.0);
  CHECK(br.domain.upper()[1] == 15.0);
  const BenchmarkSpec ack = benchmark_spec(BenchmarkId::ackley5);
  CHECK(ack.domain.lower()[3] == -32.768);
  CHECK(ack.domain.upper()[3] == 32.768);
}

TEST_CASE("known values") {
  const BenchmarkSpec ack = benchmark_spec(BenchmarkId::ackley5);
  const ValueAndGradient origin = evaluate(ack, Point::Zero(5));
  CHECK(std::abs(origin.value) < 1e-14);
  CHECK(origin.gradient.norm() == 0.0);

  const BenchmarkSpec br = benchmark_spec(BenchmarkId::branin);
  CHECK(evaluate(br, Point{{std::numbers::pi, 2.275}}).value == doctest::Approx(-0.397887).epsilon(1e-6));

  for (BenchmarkId id : all_benchmarks()) {
    const BenchmarkSpec spec = benchmark_spec(id);
    CHECK(evaluate(spec, spec.optimum_point).value == doctest::Approx(spec.optimum_value).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("evaluate rejects points outside the box") {
  const BenchmarkSpec br = benchmark_spec(BenchmarkId::branin);
  CHECK_THROWS_AS(evaluate(br, Point{{-5.1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(br, Point{{0.0, 15.5}}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(br, Point{{0.0, 1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(31);
  for (BenchmarkId id : all_benchmarks()) {
    const BenchmarkSpec spec = benchmark_spec(id);
    // Keep the stencil inside the box.
    const Domain inner(spec.domain.lower().array() + 1e-4, spec.domain.upper().array() - 1e-4);
    for (int t = 0; t < 100; ++t) {
      const Point x = random_point(inner, rng);
      const ValueAndGradient vg = evaluate(spec, x);
      const Point fd = central_difference(spec, x, 1e-5);
      CAPTURE(benchmark_name(id));
      CHECK((vg.gradient - fd).norm() / std::max(fd.norm(), 1e-8) < 1e-5);
      CHECK(evaluate(spec, x).value == vg.value);
    }
  }
}

TEST_CASE("branin optimum confirmed by grid search with local refinement") {
  const BenchmarkSpec br = benchmark_spec(BenchmarkId::branin);
  const Objective obj{{}, [&](const Point& x, Point& g) {
                        const ValueAndGradient vg = evaluate(br, x);
                        g = vg.gradient;
                        return vg.value;
                      }};
  double best = -INFINITY;
  const int n = 400;
  std::vector<Point> tops;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Point x = br.domain.from_unit(Point{{double(i) / n, double(j) / n}});
      const double v = evaluate(br, x).value;
      if (v > -0.45) tops.push_back(x);
      best = std::max(best, v);
    }
  REQUIRE_FALSE(tops.empty());
  for (const Point& x : tops) best = std::max(best, local_optimize(obj, x, br.domain, Sense::maximize).value);
  CHECK(best == doctest::Approx(br.optimum_value).epsilon(1e-9));
  CHECK(br.optimum_value == doctest::Approx(-0.397887).epsilon(1e-6));
}

TEST_CASE("no multistart search beats the stated optimum") {
  for (BenchmarkId id : all_benchmarks()) {
    const BenchmarkSpec spec = benchmark_spec(id);
    const Objective obj{{}, [&](const Point& x, Point& g) {
                          const ValueAndGradient vg = evaluate(spec, x);
                          g = vg.gradient;
                          return vg.value;
                        }};
    std::mt19937_64 rng(101);
    const auto results = multistart_optimize(obj, spec.domain, 64, rng, Sense::maximize);
    double best = -INFINITY;
    for (const OptResult& r : results) best = std::max(best, r.value);
    CAPTURE(benchmark_name(id));
    CHECK(best <= spec.optimum_value + 1e-9);
    // Refining from the stated optimum point does not improve it.
    const OptResult at = local_optimize(obj, spec.optimum_point, spec.domain, Sense::maximize);
    CHECK(at.value <= spec.optimum_value + 1e-9);
  }
}

TEST_CASE("hartmann6 global maximum is found by multistart") {
  const BenchmarkSpec h6 = benchmark_spec(BenchmarkId::hartmann6);
  const Objective obj{{}, [&](const Point& x, Point& g) {
                        const ValueAndGradient vg = evaluate(h6, x);
                        g = vg.gradient;
                        return vg.value;
                      }};
  std::mt19937_64 rng(7);
  const auto results = multistart_optimize(obj, h6.domain, 200, rng, Sense::maximize);
  const OptResult& top = results[best_index(results, Sense::maximize)];
  CHECK(top.value == doctest::Approx(h6.optimum_value).epsilon(1e-9));
  CHECK((top.point - h6.optimum_point).norm() < 1e-4);
}

TEST_CASE("reg6d examples") {
  Point star(6);
  for (int i = 0; i < 6; ++i) star[i] = 10.0 * (i + 1) / (i + 0.5) - 1.0;
  CHECK(std::abs(reg6d_loss(star).value) < 1e-12);
  CHECK(reg6d_loss(star).gradient.norm() < 1e-12);
  const Point printed{{19.00, 12.333, 11.00, 10.4286, 10.111, 9.909}};
  CHECK(std::abs(reg6d_loss(printed).value) < 1e-4);
  CHECK(reg6d_loss(Point::Zero(6)).value == doctest::Approx(-7561.5).epsilon(1e-14));
  CHECK((benchmark_spec(BenchmarkId::reg6d).optimum_point - star).norm() < 1e-12);
  CHECK_THROWS_AS(reg6d_loss(Point::Constant(6, 101.0)), std::invalid_argument);
}

TEST_CASE("reg6d inner solution matches gradient descent") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int t = 0; t < 50; ++t) {
    Point lambda(6);
    for (int i = 0; i < 6; ++i) lambda[i] = u(rng);
    CHECK((reg6d_inner_solution(lambda) - inner_by_gradient_descent(lambda)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("reg6d gradient matches finite differences") {
  const BenchmarkSpec spec = benchmark_spec(BenchmarkId::reg6d);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.01, 99.99);
  for (int t = 0; t < 20; ++t) {
    Point lambda(6);
    for (int i = 0; i < 6; ++i) lambda[i] = u(rng);
    const Point g = reg6d_loss(lambda).gradient;
    const Point fd = central_difference(spec, lambda, 1e-5);
    for (int i = 0; i < 6; ++i) CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-6).scale(1e-9));
  }
}

TEST_CASE("observe") {
  const BenchmarkSpec spec = benchmark_spec(BenchmarkId::levy4);
  const Point x{{0.5, -1.0, 2.0, 3.0}};
  const ValueAndGradient exact = evaluate(spec, x);

  std::mt19937_64 rng(1);
  const Evaluation clean = observe(spec, x, 0.0, rng);
  CHECK(clean.value_noisy == exact.value);
  CHECK(clean.value_true == exact.value);
  CHECK(clean.gradient_noisy == exact.gradient);

  std::mt19937_64 a(5), b(5);
  const Evaluation e1 = observe(spec, x, 0.25, a);
  const Evaluation e2 = observe(spec, x, 0.25, b);
  CHECK(e1.value_noisy == e2.value_noisy);
  CHECK(e1.gradient_noisy == e2.gradient_noisy);
  CHECK(e1.value_true == exact.value);
  CHECK(e1.value_noisy != exact.value);

  std::mt19937_64 rng2(9);
  const int n = 100000;
  double sum = 0.0;
  Point gsum = Point::Zero(4);
  for (int i = 0; i < n; ++i) {
    const Evaluation e = observe(spec, x, 0.25, rng2);
    sum += e.value_noisy;
    gsum += e.gradient_noisy;
  }
  CHECK(std::abs(sum / n - exact.value) < 0.01);
  CHECK((gsum / n - exact.gradient).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("regret accounting") {
  const BenchmarkSpec ack = benchmark_spec(BenchmarkId::ackley5);
  const BenchmarkSpec br = benchmark_spec(BenchmarkId::branin);
  CHECK(immediate_regret(ack.optimum_value, ack) == 0.0);
  CHECK(immediate_regret(-0.5, ack) == 0.5);
  CHECK(immediate_regret(-0.5, br) == doctest::Approx(0.102113).epsilon(1e-6));
  CHECK(log10_regret(0.0) == -12.0);
  CHECK(log10_regret(1e-15) == -12.0);
  CHECK(log10_regret(100.0) == doctest::Approx(2.0));

  // A running best over noiseless values gives non-increasing regret.
  std::mt19937_64 rng(4);
  double best = -INFINITY, prev = INFINITY;
  for (int i = 0; i < 200; ++i) {
    best = std::max(best, evaluate(br, random_point(br.domain, rng)).value);
    const double r = immediate_regret(best, br);
    CHECK(r >= 0.0);
    CHECK(r <= prev);
    prev = r;
  }
}
