#include <algorithm>
#include <limits>

#include "richtab/errors.hpp"
#include "richtab/fingering.hpp"

namespace richtab {

namespace {

// Compares equal-cost sequences from the last note backwards, which is the order the
// solver's per-layer predecessor tie-break induces on complete paths.
bool reverse_lex_less(const std::vector<FingeringState>& a, const std::vector<FingeringState>& b) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return false;
}

class Enumerator {
 public:
  Enumerator(std::span<const NoteEvent> events, const FingeringConfig& config,
             const BruteForceOptions& options, std::vector<std::vector<FingeringState>> layers)
      : events_(events), config_(config), options_(options), layers_(std::move(layers)) {
    path_.resize(events.size());
  }

  void run() { extend(0, 0.0); }

  bool found() const { return found_; }
  const std::vector<FingeringState>& best_path() const { return best_path_; }
  double best_cost() const { return best_cost_; }

 private:
  void extend(std::size_t layer, double cost) {
    if (layer == layers_.size()) {
      if (!found_ || cost < best_cost_ || (cost == best_cost_ && reverse_lex_less(path_, best_path_))) {
        best_cost_ = cost;
        best_path_ = path_;
        found_ = true;
      }
      return;
    }
    for (const auto& state : layers_[layer]) {
      if (++visits_ > options_.max_visits) {
        throw InstanceTooLargeError("brute-force enumeration exceeded " +
                                    std::to_string(options_.max_visits) + " partial sequences");
      }
      double next_cost;
      if (layer == 0) {
        next_cost = node_cost(state, config_).total();
      } else {
        const auto& prev = path_[layer - 1];
        if (!transition_allowed(prev, state, events_[layer - 1].ioi_s, config_)) continue;
        next_cost = cost + transition_cost(prev, state, config_).total() + node_cost(state, config_).total();
      }
      if (options_.prune && found_ && next_cost > best_cost_) continue;
      path_[layer] = state;
      extend(layer + 1, next_cost);
    }
  }

  std::span<const NoteEvent> events_;
  const FingeringConfig& config_;
  const BruteForceOptions& options_;
  std::vector<std::vector<FingeringState>> layers_;
  std::vector<FingeringState> path_;
  std::vector<FingeringState> best_path_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  bool found_ = false;
  std::size_t visits_ = 0;
};

}  // namespace

FingeringSolution brute_force_solve(std::span<const NoteEvent> events, const InstrumentSpec& spec,
                                    const FingeringConfig& config,
                                    const BruteForceOptions& options) {
  FingeringSolution solution;
  if (events.empty()) return solution;

  std::vector<std::vector<FingeringState>> layers;
  for (const auto& ev : events) layers.push_back(enumerate_states(ev, spec, config));

  Enumerator search(events, config, options, std::move(layers));
  search.run();
  if (!search.found()) {
    // Report the first layer no feasible prefix reaches, matching the solver's diagnostic.
    std::vector<FingeringState> frontier = enumerate_states(events[0], spec, config);
    for (std::size_t i = 1; i < events.size(); ++i) {
      std::vector<FingeringState> next;
      for (const auto& s : enumerate_states(events[i], spec, config)) {
        const bool reachable = std::any_of(frontier.begin(), frontier.end(), [&](const auto& p) {
          return transition_allowed(p, s, events[i - 1].ioi_s, config);
        });
        if (reachable) next.push_back(s);
      }
      if (next.empty()) throw NoFeasiblePathError(i);
      frontier = std::move(next);
    }
    throw NoFeasiblePathError(events.size());
  }
  solution.states = search.best_path();
  solution.objective = search.best_cost();
  evaluate_path(solution.states, config, &solution.per_transition);
  return solution;
}

}  // namespace richtab
