#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rsoc/grid.hpp"
#include "rsoc/vec.hpp"

namespace rsoc {

/// Stationary Markov control tabulated on grid nodes: one relaxed action
/// (probability vector) per node. Vertex policies are stored one-hot.
class Policy {
 public:
  Policy(const OrthantDomain& domain, int num_actions, std::vector<double> weights, double theta);
  /// One-hot policy from per-node action indices.
  static Policy from_actions(const OrthantDomain& domain, int num_actions, std::span<const int> actions,
                             double theta);

  const Grid& grid() const noexcept { return grid_; }
  int num_actions() const noexcept { return num_actions_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double theta() const noexcept { return theta_; }

  std::span<const double> at(std::size_t node) const noexcept {
    return {weights_.data() + node * static_cast<std::size_t>(num_actions_),
            static_cast<std::size_t>(num_actions_)};
  }
  /// Nearest-node lookup.
  std::span<const double> lookup(const Vec& x) const noexcept { return at(grid_.nearest(x)); }
  /// Index of the largest weight at `node` (lowest index on ties).
  int action(std::size_t node) const noexcept;
  const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const Policy& a, const Policy& b) noexcept {
    return a.num_actions_ == b.num_actions_ && a.weights_ == b.weights_;
  }

 private:
  Grid grid_;
  int num_actions_;
  std::vector<double> weights_;
  double theta_;
};

/// Control applied along a simulated path. Every emitted weight vector is a
/// probability vector over the action set.
class ControlPolicy {
 public:
  enum class Kind { constant, stationary_markov, feedback };
  /// Deterministic rule (t, X_t, xi_t) -> weights, written into `out`.
  using Rule = std::function<void(double t, const Vec& x, double xi, std::span<double> out)>;

  static ControlPolicy constant(std::vector<double> weights);
  static ControlPolicy markov(std::shared_ptr<const Policy> table);
  static ControlPolicy markov(Policy table);
  static ControlPolicy feedback(int num_actions, Rule rule);

  Kind kind() const noexcept { return kind_; }
  int num_actions() const noexcept { return num_actions_; }
  bool is_stationary() const noexcept { return kind_ != Kind::feedback; }
  const Policy* table() const noexcept { return table_.get(); }

  /// Weights at (t, x, xi). `scratch` must hold num_actions() entries; it is
  /// only written for feedback rules.
  std::span<const double> weights(double t, const Vec& x, double xi, std::span<double> scratch) const;

 private:
  Kind kind_ = Kind::constant;
  int num_actions_ = 0;
  std::vector<double> constant_;
  std::shared_ptr<const Policy> table_;
  Rule rule_;
};

}  // namespace rsoc
