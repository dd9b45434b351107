#include "rsoc/policy.hpp"

#include <cmath>
#include <sstream>

#include "rsoc/errors.hpp"

namespace rsoc {
namespace {

void check_probability(std::span<const double> w) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw ValidationError("policy weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "policy weights sum to " << sum << ", expected 1";
    throw ValidationError(os.str());
  }
}

}  // namespace

Policy::Policy(const OrthantDomain& domain, int num_actions, std::vector<double> weights, double theta)
    : grid_(domain), num_actions_(num_actions), weights_(std::move(weights)), theta_(theta) {
  if (num_actions_ < 1) throw ValidationError("policy needs at least one action");
  if (weights_.size() != grid_.size() * static_cast<std::size_t>(num_actions_))
    throw ValidationError("policy table size does not match grid x actions");
  for (std::size_t p = 0; p < grid_.size(); ++p) check_probability(at(p));
}

Policy Policy::from_actions(const OrthantDomain& domain, int num_actions, std::span<const int> actions,
                            double theta) {
  std::vector<double> w(actions.size() * static_cast<std::size_t>(num_actions), 0.0);
  for (std::size_t p = 0; p < actions.size(); ++p) {
    if (actions[p] < 0 || actions[p] >= num_actions) throw ValidationError("action index out of range");
    w[p * static_cast<std::size_t>(num_actions) + static_cast<std::size_t>(actions[p])] = 1.0;
  }
  return Policy(domain, num_actions, std::move(w), theta);
}

int Policy::action(std::size_t node) const noexcept {
  const auto w = at(node);
  int best = 0;
  for (int s = 1; s < num_actions_; ++s)
    if (w[s] > w[best]) best = s;
  return best;
}

ControlPolicy ControlPolicy::constant(std::vector<double> weights) {
  check_probability(weights);
  ControlPolicy c;
  c.kind_ = Kind::constant;
  c.num_actions_ = static_cast<int>(weights.size());
  c.constant_ = std::move(weights);
  return c;
}

ControlPolicy ControlPolicy::markov(std::shared_ptr<const Policy> table) {
  if (!table) throw ValidationError("null policy table");
  ControlPolicy c;
  c.kind_ = Kind::stationary_markov;
  c.num_actions_ = table->num_actions();
  c.table_ = std::move(table);
  return c;
}

ControlPolicy ControlPolicy::markov(Policy table) {
  return markov(std::make_shared<const Policy>(std::move(table)));
}

ControlPolicy ControlPolicy::feedback(int num_actions, Rule rule) {
  if (num_actions < 1) throw ValidationError("feedback rule needs at least one action");
  if (!rule) throw ValidationError("empty feedback rule");
  ControlPolicy c;
  c.kind_ = Kind::feedback;
  c.num_actions_ = num_actions;
  c.rule_ = std::move(rule);
  return c;
}

std::span<const double> ControlPolicy::weights(double t, const Vec& x, double xi,
                                               std::span<double> scratch) const {
  switch (kind_) {
    case Kind::constant:
      return constant_;
    case Kind::stationary_markov:
      return table_->lookup(x);
    case Kind::feedback:
      break;
  }
  rule_(t, x, xi, scratch);
  check_probability(scratch);
  return scratch;
}

}  // namespace rsoc
