#include "fobo/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fobo {
namespace {

constexpr double kDuplicateRadius = 1e-6;
// Floor for log-acquisitions so optimizer starts stay finite.
constexpr double kLogFloor = -1e12;

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

// Wraps a raw-coordinate value+gradient function as an objective on [0,1]^d.
Objective on_unit_box(const Domain& domain, std::function<double(const Point&, Point&)> fn) {
  Objective obj;
  const Point width = domain.width();
  obj.value_and_gradient = [&domain, width, fn = std::move(fn)](const Point& u, Point& grad) {
    const Point x = domain.clamp(domain.from_unit(u));
    Point gx;
    const double v = fn(x, gx);
    grad = gx.cwiseProduct(width);
    return v;
  };
  return obj;
}

bool is_duplicate(const Point& u, const RunState& state) {
  for (const Evaluation& e : state.dataset) {
    if ((state.domain.to_unit(e.point) - u).norm() < kDuplicateRadius) return true;
  }
  return false;
}

// Multistart on the unit box; results that land on an already-queried point
// are re-run once from a fresh seed. Returned points are raw coordinates.
std::vector<OptResult> multistart_fresh(const Objective& objective, RunState& state, std::size_t k,
                                        Sense sense, SeedSampling sampling) {
  const Domain unit = Domain::unit(state.domain.dim());
  std::vector<OptResult> results = multistart_optimize(objective, unit, k, state.rng, sense, sampling);
  for (OptResult& r : results) {
    if (!is_duplicate(r.point, state)) continue;
    const Point seed = draw_seeds(unit, 1, state.rng).front();
    try {
      OptResult retry = local_optimize(objective, seed, unit, sense);
      retry.seed_index = r.seed_index;
      r = retry;
    } catch (const OptimizationError&) {
      // keep the duplicate
    }
  }
  for (OptResult& r : results) r.point = state.domain.clamp(state.domain.from_unit(r.point));
  return results;
}

const SurrogateEnsemble& ensemble_of(const RunState& state) {
  if (!state.ensemble) throw std::logic_error("RunState: surrogates have not been fitted");
  return *state.ensemble;
}

Point ei_candidate(RunState& state, std::size_t k, SeedSampling sampling) {
  const SurrogateEnsemble& ens = ensemble_of(state);
  const Incumbent inc = state.incumbent;
  const Objective obj = on_unit_box(state.domain, [&ens, inc](const Point& x, Point& g) {
    return std::max(log_ei_value_and_gradient(ens.fgp, x, inc, g), kLogFloor);
  });
  const auto results = multistart_fresh(obj, state, k, Sense::maximize, sampling);
  return results[best_index(results, Sense::maximize)].point;
}

Proposal finish_proposal(RunState& state, std::vector<OptResult> restarts, double alpha,
                         Selection selection, SeedSampling sampling) {
  const SurrogateEnsemble& ens = ensemble_of(state);
  Proposal out;
  for (const OptResult& r : restarts) {
    out.candidates.push_back(
        {r.point, CandidateSource::restart, r.seed_index + 1, significance(ens.fgp, r.point, alpha)});
  }
  const Point ei_point = ei_candidate(state, restarts.size(), sampling);
  out.candidates.push_back({ei_point, CandidateSource::fgp_ei, 0, significance(ens.fgp, ei_point, alpha)});
  if (selection == Selection::ms) {
    out.chosen = select_ms(out.candidates);
  } else {
    std::vector<Candidate> augmented;
    out.chosen = select_msc(out.candidates, ens.fgp, alpha, &augmented);
    out.candidates = std::move(augmented);
  }
  return out;
}

Incumbent incumbent_of(const std::vector<Evaluation>& data) {
  Incumbent inc;
  inc.value = -std::numeric_limits<double>::infinity();
  for (const Evaluation& e : data) {
    if (e.value_noisy > inc.value) {
      inc.value = e.value_noisy;
      inc.point = e.point;
    }
  }
  return inc;
}

std::size_t base_candidate_count(const Proposal& p) {
  return static_cast<std::size_t>(std::count_if(p.candidates.begin(), p.candidates.end(), [](const Candidate& c) {
    return c.source != CandidateSource::convex;
  }));
}

}  // namespace

std::string_view algorithm_name(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::gei_ms: return "gEI-MS";
    case AlgorithmId::gei_msc: return "gEI-MSC";
    case AlgorithmId::gpi_ms: return "gPI-MS";
    case AlgorithmId::gpi_msc: return "gPI-MSC";
    case AlgorithmId::zobo_ei: return "ZOBO-EI";
    case AlgorithmId::fobo_cc: return "FOBO-CC";
    case AlgorithmId::fobo_mm: return "FOBO-MM";
  }
  return "unknown";
}

std::vector<AlgorithmId> all_algorithms() {
  return {AlgorithmId::gei_ms,  AlgorithmId::gei_msc, AlgorithmId::gpi_ms, AlgorithmId::gpi_msc,
          AlgorithmId::zobo_ei, AlgorithmId::fobo_cc, AlgorithmId::fobo_mm};
}

std::optional<AlgorithmId> parse_algorithm(std::string_view name) {
  for (AlgorithmId id : all_algorithms())
    if (algorithm_name(id) == name) return id;
  return std::nullopt;
}

double alpha_at(const LoopConfig& config, std::size_t n) {
  if (config.alpha_schedule == AlphaSchedule::decaying)
    return config.alpha / std::sqrt(static_cast<double>(n) + 1.0);
  return config.alpha;
}

void refit(RunState& state, std::size_t gp_restarts, bool with_partials) {
  const std::size_t d = state.domain.dim();
  const std::size_t n = state.dataset.size();
  std::vector<Point> inputs;
  inputs.reserve(n);
  for (const Evaluation& e : state.dataset) inputs.push_back(e.point);

  const std::size_t models = with_partials ? d + 1 : 1;
  // Targets per model: column 0 is the function, column i the i-th partial.
  std::vector<std::vector<double>> targets(models, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    targets[0][j] = state.dataset[j].value_noisy;
    for (std::size_t i = 1; i < models; ++i)
      targets[i][j] = state.dataset[j].gradient_noisy[static_cast<Eigen::Index>(i - 1)];
  }
  std::vector<std::uint64_t> seeds(models);
  for (auto& s : seeds) s = state.rng();

  std::vector<std::optional<FittedGP>> fitted(models);
  std::vector<std::string> errors(models);
#pragma omp parallel for schedule(dynamic, 1) if (models > 1)
  for (std::size_t m = 0; m < models; ++m) {
    try {
      std::mt19937_64 rng(seeds[m]);
      fitted[m] = fit(inputs, targets[m], state.domain, gp_restarts, rng);
    } catch (const std::exception& ex) {
      errors[m] = ex.what();
    }
  }
  for (std::size_t m = 0; m < models; ++m)
    if (!fitted[m]) throw FitError("refit: model " + std::to_string(m) + ": " + errors[m]);

  std::vector<FittedGP> partials;
  for (std::size_t m = 1; m < models; ++m) partials.push_back(std::move(*fitted[m]));
  state.ensemble.emplace(SurrogateEnsemble{std::move(*fitted[0]), std::move(partials), state.domain});
  if (with_partials) state.partial_fits += d;
  state.incumbent = incumbent_of(state.dataset);
}

RunState make_state(const Domain& domain, std::vector<Evaluation> dataset, const LoopConfig& config,
                    bool with_partials) {
  RunState state{domain, std::move(dataset), std::nullopt, {}, 0, stream_rng(config.seed, 2), 0};
  state.incumbent = incumbent_of(state.dataset);
  refit(state, config.gp_restarts, with_partials);
  return state;
}

Point softmax_combination(const std::vector<Point>& points, const std::vector<double>& scores) {
  if (points.empty() || points.size() != scores.size())
    throw std::invalid_argument("softmax_combination: need matching non-empty points and scores");
  const double top = *std::max_element(scores.begin(), scores.end());
  double norm = 0.0;
  Point acc = Point::Zero(points.front().size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double w = std::exp(scores[j] - top);
    norm += w;
    acc += w * points[j];
  }
  return acc / norm;
}

Point select_ms(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_ms: no candidates");
  std::size_t best = 0;
  for (std::size_t j = 1; j < candidates.size(); ++j)
    if (candidates[j].significance > candidates[best].significance) best = j;
  return candidates[best].point;
}

Point convex_point(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("convex_point: no candidates");
  std::vector<Point> pts;
  std::vector<double> scores;
  for (const Candidate& c : candidates) {
    pts.push_back(c.point);
    scores.push_back(c.significance);
  }
  return softmax_combination(pts, scores);
}

Point select_msc(const std::vector<Candidate>& candidates, const FittedGP& fgp, double alpha,
                 std::vector<Candidate>* augmented) {
  if (candidates.empty()) throw std::invalid_argument("select_msc: no candidates");
  std::vector<Candidate> extended = candidates;
  const Point convex = fgp.domain.clamp(convex_point(candidates));
  extended.push_back({convex, CandidateSource::convex, 0, significance(fgp, convex, alpha)});
  Point chosen = select_ms(extended);
  if (augmented) *augmented = std::move(extended);
  return chosen;
}

Proposal propose_gei(RunState& state, std::size_t k, double alpha, Selection selection,
                     SeedSampling sampling) {
  if (k < 1) throw std::invalid_argument("propose_gei: k must be at least 1");
  const SurrogateEnsemble& ens = ensemble_of(state);
  const Objective obj = on_unit_box(
      state.domain, [&ens](const Point& x, Point& g) { return gei_value_and_gradient(ens, x, g); });
  auto restarts = multistart_fresh(obj, state, k, Sense::minimize, sampling);
  return finish_proposal(state, std::move(restarts), alpha, selection, sampling);
}

Proposal propose_gpi(RunState& state, std::size_t k, double alpha, double eps_grad, double eps_pi,
                     Selection selection, SeedSampling sampling) {
  if (k < 1) throw std::invalid_argument("propose_gpi: k must be at least 1");
  if (!(eps_grad > 0.0)) throw std::invalid_argument("propose_gpi: eps_grad must be > 0");
  const SurrogateEnsemble& ens = ensemble_of(state);
  const Incumbent inc = state.incumbent;
  const Objective obj = on_unit_box(state.domain, [&ens, inc, eps_grad, eps_pi](const Point& x, Point& g) {
    return std::max(log_gpi_value_and_gradient(ens, x, inc, eps_grad, eps_pi, g), kLogFloor);
  });
  auto restarts = multistart_fresh(obj, state, k, Sense::maximize, sampling);
  return finish_proposal(state, std::move(restarts), alpha, selection, sampling);
}

Point propose_zobo_ei(RunState& state, std::size_t k, SeedSampling sampling) {
  if (k < 1) throw std::invalid_argument("propose_zobo_ei: k must be at least 1");
  return ei_candidate(state, k, sampling);
}

Point propose_fobo_baseline(RunState& state, std::size_t k, FoboVariant variant,
                            SeedSampling sampling) {
  if (k < 1) throw std::invalid_argument("propose_fobo_baseline: k must be at least 1");
  const SurrogateEnsemble& ens = ensemble_of(state);
  if (ens.pgp.size() != ens.dim())
    throw std::invalid_argument("propose_fobo_baseline: partial-derivative GPs are not fitted");

  std::vector<Point> points{ei_candidate(state, k, sampling)};
  for (const FittedGP& partial : ens.pgp) {
    const Objective obj = on_unit_box(state.domain, [&partial](const Point& x, Point& g) {
      return abs_gradient_value_and_gradient(partial, x, g);
    });
    const auto results = multistart_fresh(obj, state, k, Sense::minimize, sampling);
    points.push_back(results[best_index(results, Sense::minimize)].point);
  }
  std::vector<double> means;
  for (const Point& p : points) means.push_back(posterior(ens.fgp, p).mean);

  if (variant == FoboVariant::convex_combination)
    return state.domain.clamp(softmax_combination(points, means));
  const auto best = std::max_element(means.begin(), means.end()) - means.begin();
  return points[static_cast<std::size_t>(best)];
}

Problem make_problem(const BenchmarkSpec& spec, double noise_variance) {
  return Problem{spec.domain, spec.optimum_value,
                 [spec, noise_variance](const Point& x, std::mt19937_64& rng) {
                   return observe(spec, x, noise_variance, rng);
                 }};
}

RunResult run(const Problem& problem, const LoopConfig& config) {
  if (config.initial_points < 2) throw std::invalid_argument("run: initial design needs at least 2 points");
  if (config.restarts_k < 1) throw std::invalid_argument("run: restarts_k must be at least 1");
  using Clock = std::chrono::steady_clock;

  std::mt19937_64 design_rng = stream_rng(config.seed, 0);
  std::mt19937_64 noise_rng = stream_rng(config.seed, 1);
  const bool uses_gradients = config.algorithm != AlgorithmId::zobo_ei;

  RunResult result;
  RunState state{problem.domain, {}, std::nullopt, {}, 0, stream_rng(config.seed, 2), 0};
  double best_true = -std::numeric_limits<double>::infinity();

  const auto record = [&](std::size_t iteration, double ms) {
    const double regret = std::abs(problem.optimum_value - best_true);
    result.trace.push_back({iteration, best_true, regret, log10_regret(regret), ms});
  };
  const auto absorb = [&](Evaluation e) {
    best_true = std::max(best_true, e.value_true);
    state.dataset.push_back(std::move(e));
  };

  try {
    const auto t0 = Clock::now();
    for (const Point& x : draw_seeds(problem.domain, config.initial_points, design_rng))
      absorb(problem.query(x, noise_rng));
    state.incumbent = incumbent_of(state.dataset);
    record(0, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());

    for (std::size_t n = 0; n < config.budget; ++n) {
      const auto start = Clock::now();
      state.iteration = n;
      refit(state, config.gp_restarts, uses_gradients);
      const double alpha = alpha_at(config, n);
      const std::size_t k = config.restarts_k;
      Point next;
      std::size_t q_size = 0;
      switch (config.algorithm) {
        case AlgorithmId::gei_ms:
        case AlgorithmId::gei_msc: {
          const Selection sel = config.algorithm == AlgorithmId::gei_ms ? Selection::ms : Selection::msc;
          Proposal p = propose_gei(state, k, alpha, sel, config.seed_sampling);
          next = p.chosen;
          q_size = base_candidate_count(p);
          break;
        }
        case AlgorithmId::gpi_ms:
        case AlgorithmId::gpi_msc: {
          const Selection sel = config.algorithm == AlgorithmId::gpi_ms ? Selection::ms : Selection::msc;
          Proposal p = propose_gpi(state, k, alpha, config.eps_grad, config.eps_pi, sel, config.seed_sampling);
          next = p.chosen;
          q_size = base_candidate_count(p);
          break;
        }
        case AlgorithmId::zobo_ei:
          next = propose_zobo_ei(state, k, config.seed_sampling);
          break;
        case AlgorithmId::fobo_cc:
          next = propose_fobo_baseline(state, k, FoboVariant::convex_combination, config.seed_sampling);
          break;
        case AlgorithmId::fobo_mm:
          next = propose_fobo_baseline(state, k, FoboVariant::max_mean, config.seed_sampling);
          break;
      }
      result.candidate_counts.push_back(q_size);
      absorb(problem.query(problem.domain.clamp(next), noise_rng));
      state.incumbent = incumbent_of(state.dataset);
      record(n + 1, std::chrono::duration<double, std::milli>(Clock::now() - start).count());
    }
  } catch (const std::exception& ex) {
    result.failure = ex.what();
  }

  result.dataset = std::move(state.dataset);
  result.best_point = incumbent_of(result.dataset).point;
  result.partial_fits = state.partial_fits;
  return result;
}

}  // namespace fobo
