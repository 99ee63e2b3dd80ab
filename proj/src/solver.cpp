#include "equiloc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "equiloc/error.hpp"
#include "equiloc/rng.hpp"

namespace equiloc {

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(std::optional<double> seconds) {
    if (seconds) {
      at_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(*seconds));
    }
  }
  bool expired() const {
    if (tripped_.load(std::memory_order_relaxed)) return true;
    if (at_ && Clock::now() >= *at_) {
      tripped_.store(true, std::memory_order_relaxed);
      return true;
    }
    return false;
  }
  bool tripped() const { return tripped_.load(std::memory_order_relaxed); }

 private:
  std::optional<Clock::time_point> at_;
  mutable std::atomic<bool> tripped_{false};
};

bool uses_key(const ModelSpec& spec) {
  return spec.objective == Objective::kLexicographicCenter;
}

struct Candidate {
  Assignment assignment;
  double objective = 0.0;
  std::vector<double> key;  // lexicographic models only
};

bool strictly_better(const Candidate& a, const Candidate& b, bool lex) {
  if (lex) return std::lexicographical_compare(a.key.begin(), a.key.end(), b.key.begin(), b.key.end());
  return a.objective < b.objective;
}

bool ties(const Candidate& a, const Candidate& b, bool lex) {
  return lex ? a.key == b.key : a.objective == b.objective;
}

// Canonical evaluation; every reported objective goes through here so that
// re-evaluation reproduces it bit for bit.
std::optional<Candidate> evaluate(const ModelSpec& spec, Assignment a, const ScenarioSet& scen,
                                  const Instance& instance) {
  if (spec.beta) {
    const auto z = mean_outcomes(spec, a, scen, instance);
    if (!check_beta_constraint(z, *spec.beta)) return std::nullopt;
  }
  Candidate c;
  c.objective = saa_objective(spec, a, scen, instance);
  if (uses_key(spec)) c.key = lexicographic_key(a, scen, instance);
  c.assignment = std::move(a);
  return c;
}

// c[s][i][k]: outcome of node i served by open[k] in scenario s, under the
// model's weighting.
class OutcomeTable {
 public:
  OutcomeTable(const ModelSpec& spec, const std::vector<int>& open, const ScenarioSet& scen,
               const Instance& instance)
      : nodes_(instance.size()), open_(open.size()), scenarios_(scen.size()) {
    const bool weighted = weighting_for(spec.objective) == Weighting::kDemandWeighted;
    data_.resize(scenarios_ * nodes_ * open_);
    mean_.assign(nodes_ * open_, 0.0);
    for (std::size_t s = 0; s < scenarios_; ++s) {
      const Scenario& sc = scen[s];
      for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t k = 0; k < open_; ++k) {
          const double d = sc.distance(i, static_cast<std::size_t>(open[k]));
          const double v = weighted ? sc.demand[i] * d : d;
          data_[(s * nodes_ + i) * open_ + k] = v;
          mean_[i * open_ + k] += v;
        }
      }
    }
    for (double& v : mean_) v /= static_cast<double>(scenarios_);
  }
  double operator()(std::size_t s, std::size_t i, std::size_t k) const {
    return data_[(s * nodes_ + i) * open_ + k];
  }
  double mean(std::size_t i, std::size_t k) const { return mean_[i * open_ + k]; }
  std::size_t scenarios() const { return scenarios_; }

 private:
  std::size_t nodes_;
  std::size_t open_;
  std::size_t scenarios_;
  std::vector<double> data_;
  std::vector<double> mean_;
};

Assignment closest_assignment(const ModelSpec& spec, const std::vector<int>& open,
                              const ScenarioSet& scen, const Instance& instance) {
  const OutcomeTable table(spec, open, scen, instance);
  Assignment a;
  a.open = open;
  a.assign.resize(instance.size());
  for (std::size_t i = 0; i < instance.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < open.size(); ++k) {
      if (table.mean(i, k) < table.mean(i, best)) best = k;
    }
    a.assign[i] = open[best];
  }
  return a;
}

// Depth-first branch and bound over node-to-facility assignments. Every
// objective in the catalogue is nondecreasing as nodes are added to a
// partial outcome vector (outcomes are non-negative), so the objective of
// the partial vector is a valid lower bound. Monotone objectives get a
// tighter one: unassigned nodes are filled in with their cheapest outcome.
class FreeAssignmentSearch {
 public:
  FreeAssignmentSearch(const ModelSpec& spec, const std::vector<int>& open,
                       const ScenarioSet& scen, const Instance& instance,
                       const Deadline& deadline)
      : spec_(spec),
        open_(open),
        scen_(scen),
        instance_(instance),
        deadline_(deadline),
        table_(spec, open, scen, instance),
        lex_(uses_key(spec)),
        monotone_(is_monotone(spec.objective)) {
    const std::size_t n = instance.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    const auto& mu = instance.demand_mean();
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return mu[a] > mu[b]; });
    partial_.assign(scen.size(), std::vector<double>(n, 0.0));
    choice_.assign(n, 0);
    if (monotone_) {
      for (std::size_t s = 0; s < scen.size(); ++s) {
        for (std::size_t pos = 0; pos < n; ++pos) {
          double lo = table_(s, order_[pos], 0);
          for (std::size_t k = 1; k < open.size(); ++k) lo = std::min(lo, table_(s, order_[pos], k));
          // the unfilled tail of partial_ holds the floor until overwritten
          partial_[s][pos] = lo;
        }
      }
      floor_ = partial_;
    }
  }

  std::optional<Candidate> run() {
    // Seed the incumbent with the closest assignment so pruning starts early.
    if (auto seed = evaluate(spec_, closest_assignment(spec_, open_, scen_, instance_), scen_,
                             instance_)) {
      best_ = std::move(seed);
    }
    dfs(0);
    return best_;
  }

  bool timed_out() const { return timed_out_; }

 private:
  void dfs(std::size_t depth) {
    if (timed_out_) return;
    if ((++visits_ & 0xFFF) == 0 && deadline_.expired()) {
      timed_out_ = true;
      return;
    }
    if (depth == order_.size()) {
      leaf();
      return;
    }
    const std::size_t node = order_[depth];
    for (std::size_t k = 0; k < open_.size(); ++k) {
      choice_[node] = k;
      for (std::size_t s = 0; s < table_.scenarios(); ++s) partial_[s][depth] = table_(s, node, k);
      if (best_ && prune(depth + 1)) continue;
      dfs(depth + 1);
      if (timed_out_) return;
    }
    if (monotone_) {
      for (std::size_t s = 0; s < table_.scenarios(); ++s) partial_[s][depth] = floor_[s][depth];
    }
  }

  void leaf() {
    Assignment a;
    a.open = open_;
    a.assign.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) a.assign[i] = open_[choice_[i]];
    auto c = evaluate(spec_, std::move(a), scen_, instance_);
    if (!c) return;
    if (!best_ || strictly_better(*c, *best_, lex_) ||
        (ties(*c, *best_, lex_) && c->assignment.assign < best_->assignment.assign)) {
      best_ = std::move(c);
    }
  }

  static double slack(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

  bool prune(std::size_t depth) const {
    const double inv = 1.0 / static_cast<double>(table_.scenarios());
    if (monotone_) depth = order_.size();
    if (lex_) {
      std::vector<double> key(depth, 0.0);
      for (const auto& z : partial_) {
        const auto sorted = sorted_descending(std::span<const double>(z.data(), depth));
        for (std::size_t k = 0; k < depth; ++k) key[k] += sorted[k] * inv;
      }
      for (std::size_t k = 0; k < best_->key.size(); ++k) {
        const double a = k < depth ? key[k] : 0.0;
        const double b = best_->key[k];
        if (a > b + slack(b)) return true;
        if (a < b - slack(b)) return false;
      }
      return false;
    }
    double bound = 0.0;
    for (const auto& z : partial_) {
      bound += objective_on(spec_, std::span<const double>(z.data(), depth)) * inv;
    }
    return bound > best_->objective + slack(best_->objective);
  }

  const ModelSpec& spec_;
  const std::vector<int>& open_;
  const ScenarioSet& scen_;
  const Instance& instance_;
  const Deadline& deadline_;
  OutcomeTable table_;
  bool lex_;
  bool monotone_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<double>> partial_;
  std::vector<std::vector<double>> floor_;
  std::vector<std::size_t> choice_;
  std::optional<Candidate> best_;
  std::size_t visits_ = 0;
  bool timed_out_ = false;
};

std::optional<Candidate> best_for_open(const ModelSpec& spec, const std::vector<int>& open,
                                       const ScenarioSet& scen, const Instance& instance,
                                       AssignmentRule rule, const Deadline& deadline,
                                       bool* timed_out = nullptr) {
  if (rule == AssignmentRule::kClosest || open.size() == 1) {
    return evaluate(spec, closest_assignment(spec, open, scen, instance), scen, instance);
  }
  FreeAssignmentSearch search(spec, open, scen, instance, deadline);
  auto result = search.run();
  if (timed_out && search.timed_out()) *timed_out = true;
  return result;
}

bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct Incumbent {
  std::optional<Candidate> candidate;
  std::size_t rank = 0;
};

// Candidate order: objective (or key), then enumeration rank, which is the
// lexicographic order of the sorted open set.
void offer(Incumbent& inc, Candidate c, std::size_t rank, bool lex) {
  if (!inc.candidate || strictly_better(c, *inc.candidate, lex) ||
      (ties(c, *inc.candidate, lex) && rank < inc.rank)) {
    inc.candidate = std::move(c);
    inc.rank = rank;
  }
}

struct SearchResult {
  std::optional<Candidate> best;
  bool timed_out = false;
};

SearchResult enumerate_exact(const ModelSpec& spec, const Instance& instance,
                             const ScenarioSet& scen, AssignmentRule rule,
                             const SolveOptions& opts, const Deadline& deadline) {
  const int n = static_cast<int>(instance.size());
  const int p = instance.p();
  const bool lex = uses_key(spec);
  const unsigned workers = std::max(1u, opts.threads);
  std::vector<Incumbent> partial(workers);
  std::vector<char> timed_out(workers, 0);

  auto work = [&](unsigned w) {
    std::vector<int> comb(static_cast<std::size_t>(p));
    std::iota(comb.begin(), comb.end(), 0);
    std::size_t rank = 0;
    bool first = true;
    do {
      if (rank % workers == w) {
        // The first subset is always evaluated so a timed-out run still has
        // an incumbent.
        if (!first && deadline.expired()) {
          timed_out[w] = 1;
          return;
        }
        first = false;
        bool inner_timeout = false;
        auto c = best_for_open(spec, comb, scen, instance, rule, deadline, &inner_timeout);
        if (c) offer(partial[w], std::move(*c), rank, lex);
        if (inner_timeout) {
          timed_out[w] = 1;
          return;
        }
      }
      ++rank;
    } while (next_combination(comb, n));
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  SearchResult result;
  Incumbent best;
  for (unsigned w = 0; w < workers; ++w) {
    if (partial[w].candidate) offer(best, std::move(*partial[w].candidate), partial[w].rank, lex);
    result.timed_out = result.timed_out || timed_out[w];
  }
  result.best = std::move(best.candidate);
  return result;
}

std::vector<int> random_subset(const Philox4x32& rng, std::uint32_t restart, int n, int p) {
  std::vector<int> items(static_cast<std::size_t>(n));
  std::iota(items.begin(), items.end(), 0);
  for (int k = 0; k < p; ++k) {
    const double u = rng.uniforms({restart, static_cast<std::uint32_t>(k), 0, 7})[0];
    const int pick = k + std::min(n - k - 1, static_cast<int>(u * (n - k)));
    std::swap(items[k], items[pick]);
  }
  std::vector<int> subset(items.begin(), items.begin() + p);
  std::sort(subset.begin(), subset.end());
  return subset;
}

bool preferred(const Candidate& a, const Candidate& b, bool lex) {
  return strictly_better(a, b, lex) || (ties(a, b, lex) && a.assignment.open < b.assignment.open);
}

// Swap neighbourhood, first improvement.
std::optional<Candidate> swap_descent(const ModelSpec& spec, std::optional<Candidate> current,
                                      const Instance& instance, const ScenarioSet& scen,
                                      AssignmentRule rule, const Deadline& deadline) {
  if (!current) return current;
  const int n = static_cast<int>(instance.size());
  const bool lex = uses_key(spec);
  bool improved = true;
  while (improved && !deadline.expired()) {
    improved = false;
    const std::vector<int> open = current->assignment.open;
    for (std::size_t pos = 0; pos < open.size() && !improved; ++pos) {
      for (int j = 0; j < n && !improved; ++j) {
        if (std::binary_search(open.begin(), open.end(), j)) continue;
        std::vector<int> next = open;
        next[pos] = j;
        std::sort(next.begin(), next.end());
        auto c = best_for_open(spec, next, scen, instance, rule, deadline);
        if (c && strictly_better(*c, *current, lex)) {
          current = std::move(c);
          improved = true;
        }
        if (deadline.expired()) break;
      }
    }
  }
  return current;
}

struct LocalSearchResult {
  std::optional<Candidate> best;
  std::optional<Candidate> seed;
};

LocalSearchResult local_search(const ModelSpec& spec, const Instance& instance,
                               const ScenarioSet& scen, AssignmentRule rule,
                               const SolveOptions& opts, const Deadline& deadline) {
  const int n = static_cast<int>(instance.size());
  const int p = instance.p();
  const bool lex = uses_key(spec);

  // Greedy seed: add the facility that most improves the closest-assignment
  // objective of the facilities opened so far.
  std::vector<int> open;
  for (int k = 1; k <= p; ++k) {
    const Instance partial = instance.with_p(k);
    std::optional<Candidate> step;
    for (int j = 0; j < n; ++j) {
      if (std::find(open.begin(), open.end(), j) != open.end()) continue;
      std::vector<int> trial = open;
      trial.push_back(j);
      std::sort(trial.begin(), trial.end());
      auto c = evaluate(spec, closest_assignment(spec, trial, scen, partial), scen, partial);
      if (c && (!step || preferred(*c, *step, lex))) step = std::move(c);
    }
    if (!step) {
      // beta constraint unmet so far; fall back to the lowest free index
      for (int j = 0; j < n; ++j) {
        if (std::find(open.begin(), open.end(), j) == open.end()) {
          open.push_back(j);
          break;
        }
      }
      std::sort(open.begin(), open.end());
    } else {
      open = step->assignment.open;
    }
  }

  LocalSearchResult result;
  result.seed = evaluate(spec, closest_assignment(spec, open, scen, instance), scen, instance);
  auto start = best_for_open(spec, open, scen, instance, rule, deadline);
  result.best = swap_descent(spec, std::move(start), instance, scen, rule, deadline);

  const Philox4x32 rng(mix_seed(opts.seed, 0x6c6f63616c));
  for (int r = 0; r < opts.restarts && !deadline.expired(); ++r) {
    const auto subset = random_subset(rng, static_cast<std::uint32_t>(r), n, p);
    auto c = swap_descent(spec, best_for_open(spec, subset, scen, instance, rule, deadline),
                          instance, scen, rule, deadline);
    if (c && (!result.best || preferred(*c, *result.best, lex))) result.best = std::move(c);
  }
  return result;
}

Solution make_solution(const ModelSpec& spec, Candidate c, const Instance& instance,
                       const ScenarioSet& scen, SolveStatus status, const SolveOptions& opts,
                       AssignmentRule rule) {
  Solution s;
  s.per_node_outcomes = mean_outcomes(spec, c.assignment, scen, instance);
  s.assignment = std::move(c.assignment);
  s.objective = c.objective;
  s.lex_key = std::move(c.key);
  s.model = spec;
  s.status = status;
  s.provenance = Provenance{opts.method, rule, scen.generator().seed, scen.content_hash()};
  return s;
}

}  // namespace

std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::kEnumerateExact ? "enumerate_exact" : "local_search";
}

SolveMethod parse_solve_method(std::string_view name) {
  if (name == "enumerate_exact" || name == "exact") return SolveMethod::kEnumerateExact;
  if (name == "local_search" || name == "local") return SolveMethod::kLocalSearch;
  throw ValidationError("unknown solve method '" + std::string(name) + "'");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kHeuristic: return "heuristic";
    case SolveStatus::kTimeLimit: return "time_limit";
  }
  return "?";
}

AssignmentRule default_rule(Objective objective, std::size_t num_scenarios) {
  switch (objective) {
    case Objective::kPMedian:
    case Objective::kTotalDistance:
      return AssignmentRule::kClosest;
    case Objective::kPCenter:
      return num_scenarios <= 1 ? AssignmentRule::kClosest : AssignmentRule::kFree;
    default:
      return AssignmentRule::kFree;
  }
}

AssignmentRule effective_rule(const ModelSpec& spec, const SolveOptions& opts,
                              std::size_t num_scenarios) {
  if (opts.assignment_rule) return *opts.assignment_rule;
  if (spec.assignment_rule) return *spec.assignment_rule;
  return default_rule(spec.objective, num_scenarios);
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

std::optional<Assignment> inner_assignment(const ModelSpec& spec, const std::vector<int>& open,
                                           const ScenarioSet& scen, const Instance& instance,
                                           AssignmentRule rule) {
  if (open.size() != static_cast<std::size_t>(instance.p())) {
    throw ContractError("open set size must equal p");
  }
  if (scen.empty()) throw ValidationError("empty scenario set");
  std::vector<int> sorted = open;
  std::sort(sorted.begin(), sorted.end());
  const Deadline none(std::nullopt);
  auto c = best_for_open(spec, sorted, scen, instance, rule, none);
  if (!c) return std::nullopt;
  return std::move(c->assignment);
}

Solution solve(const ModelSpec& spec, const Instance& instance, const ScenarioSet& scen,
               const SolveOptions& opts) {
  spec.validate(instance.size());
  if (scen.empty()) throw ValidationError("empty scenario set");
  if (scen.instance_fingerprint() != instance.fingerprint()) {
    throw ValidationError("scenario set was drawn from a different instance");
  }
  if (scen[0].demand.size() != instance.size()) {
    throw ValidationError("scenario size does not match the instance");
  }
  const AssignmentRule rule = effective_rule(spec, opts, scen.size());
  const Deadline deadline(opts.time_limit_seconds);

  if (opts.method == SolveMethod::kEnumerateExact) {
    const double subsets = binomial(instance.size(), static_cast<std::size_t>(instance.p()));
    if (subsets > kMaxEnumeratedSubsets) {
      throw ValidationError("exact enumeration would visit " + std::to_string(subsets) +
                            " open sets (limit 1e6); use local search");
    }
    SearchResult r = enumerate_exact(spec, instance, scen, rule, opts, deadline);
    if (!r.best) {
      if (r.timed_out) throw InfeasibleError("time limit reached before any feasible solution");
      throw InfeasibleError("no open set satisfies the beta constraint");
    }
    return make_solution(spec, std::move(*r.best), instance, scen,
                         r.timed_out ? SolveStatus::kTimeLimit : SolveStatus::kOptimal, opts,
                         rule);
  }

  LocalSearchResult r = local_search(spec, instance, scen, rule, opts, deadline);
  if (!r.best) throw InfeasibleError("local search found no solution meeting the beta constraint");
  return make_solution(spec, std::move(*r.best), instance, scen,
                       deadline.tripped() ? SolveStatus::kTimeLimit : SolveStatus::kHeuristic,
                       opts, rule);
}

Solution lexicographic_minimax(const Instance& instance, const ScenarioSet& scen,
                               const SolveOptions& opts) {
  ModelSpec spec;
  spec.objective = Objective::kLexicographicCenter;
  return solve(spec, instance, scen, opts);
}

double reevaluate(const Solution& solution, const Instance& instance, const ScenarioSet& scen) {
  return saa_objective(solution.model, solution.assignment, scen, instance);
}

}  // namespace equiloc
