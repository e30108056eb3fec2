#pragma once

#include "fobo/acquisition.hpp"
#include "fobo/bench.hpp"
#include "fobo/optim.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fobo {

enum class AlgorithmId { gei_ms, gei_msc, gpi_ms, gpi_msc, zobo_ei, fobo_cc, fobo_mm };

std::string_view algorithm_name(AlgorithmId id);
std::optional<AlgorithmId> parse_algorithm(std::string_view name);
std::vector<AlgorithmId> all_algorithms();

enum class AlphaSchedule { constant, decaying };

struct LoopConfig {
  AlgorithmId algorithm = AlgorithmId::gpi_ms;
  std::size_t budget = 200;
  std::size_t initial_points = 5;
  std::size_t restarts_k = 10;
  double alpha = 1.0;
  AlphaSchedule alpha_schedule = AlphaSchedule::constant;
  double eps_grad = 0.05;
  double eps_pi = 0.01;
  std::size_t gp_restarts = 5;
  std::uint64_t seed = 0;
  SeedSampling seed_sampling = SeedSampling::uniform;
};

/// alpha for iteration n: constant, or alpha / sqrt(n + 1) when decaying.
double alpha_at(const LoopConfig& config, std::size_t n);

enum class CandidateSource { restart, fgp_ei, convex };

struct Candidate {
  Point point;
  CandidateSource source = CandidateSource::restart;
  std::size_t restart_index = 0;  // 1..k for restart candidates
  double significance = 0.0;
};

struct RunState {
  Domain domain;
  std::vector<Evaluation> dataset;
  std::optional<SurrogateEnsemble> ensemble;
  Incumbent incumbent;
  std::size_t iteration = 0;
  std::mt19937_64 rng;
  /// Number of partial-derivative GP fits performed so far.
  std::size_t partial_fits = 0;
};

/// Builds a state from existing data and fits the surrogates.
RunState make_state(const Domain& domain, std::vector<Evaluation> dataset, const LoopConfig& config,
                    bool with_partials = true);

/// Refits the function GP and, when requested, all partial-derivative GPs.
void refit(RunState& state, std::size_t gp_restarts, bool with_partials);

struct Proposal {
  Point chosen;
  /// Q: the k restart candidates then the EI candidate, plus the convex point
  /// last when MSC selection was used.
  std::vector<Candidate> candidates;
};

enum class Selection { ms, msc };

Proposal propose_gei(RunState& state, std::size_t k, double alpha, Selection selection,
                     SeedSampling sampling = SeedSampling::uniform);
Proposal propose_gpi(RunState& state, std::size_t k, double alpha, double eps_grad, double eps_pi,
                     Selection selection, SeedSampling sampling = SeedSampling::uniform);

/// Maximum significance; ties go to the earliest candidate.
Point select_ms(const std::vector<Candidate>& candidates);

/// Softmax(significance)-weighted average of the candidate points.
Point convex_point(const std::vector<Candidate>& candidates);

/// Adds the convex point to the candidates (re-scored under fgp) and picks the
/// maximum significance. The augmented set is written back when `augmented` is given.
Point select_msc(const std::vector<Candidate>& candidates, const FittedGP& fgp, double alpha,
                 std::vector<Candidate>* augmented = nullptr);

/// sum_j softmax(scores)_j * points[j] with max-subtraction.
Point softmax_combination(const std::vector<Point>& points, const std::vector<double>& scores);

Point propose_zobo_ei(RunState& state, std::size_t k,
                      SeedSampling sampling = SeedSampling::uniform);

enum class FoboVariant { convex_combination, max_mean };

Point propose_fobo_baseline(RunState& state, std::size_t k, FoboVariant variant,
                            SeedSampling sampling = SeedSampling::uniform);

/// Black-box objective for the loop. `query` draws observation noise from the rng.
struct Problem {
  Domain domain;
  double optimum_value = 0.0;
  std::function<Evaluation(const Point&, std::mt19937_64&)> query;
};

Problem make_problem(const BenchmarkSpec& spec, double noise_variance);

struct RunResult {
  RegretTrace trace;
  std::vector<Evaluation> dataset;
  /// Point with the best noisy observation.
  Point best_point;
  /// Size of Q (before convex augmentation) at each iteration; empty entries for baselines.
  std::vector<std::size_t> candidate_counts;
  std::size_t partial_fits = 0;
  std::optional<std::string> failure;
};

/// Initial design followed by `budget` sequential queries. The trace has
/// budget + 1 entries unless the run failed part way.
RunResult run(const Problem& problem, const LoopConfig& config);

}  // namespace fobo
