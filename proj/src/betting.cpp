#include "streambet/betting.hpp"

#include <cmath>
#include <string>

namespace streambet {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw InvalidInputError(std::string(name) + " must be finite, got " +
                            std::to_string(v));
  }
}

}  // namespace

DecisionInterval decision_interval(double d, IntervalMode mode) {
  require_finite(d, "d");
  if (d <= 0.0) {
    throw InvalidBoundError("outcome bound d must be > 0, got " +
                            std::to_string(d));
  }
  double half = 1.0 / (2.0 * d);
  if (mode == IntervalMode::simple) return {-half, half};
  return {-half, 0.0};
}

double wealth_step(double w_prev, double g, double theta) {
  require_finite(w_prev, "w_prev");
  require_finite(g, "g");
  require_finite(theta, "theta");
  return w_prev * (1.0 - g * theta);
}

double log_loss(double g, double theta) {
  require_finite(g, "g");
  require_finite(theta, "theta");
  double factor = 1.0 - g * theta;
  if (factor <= 0.0) {
    throw DomainError("wealth factor 1 - g*theta is nonpositive (" +
                      std::to_string(factor) + ")");
  }
  return -std::log(factor);
}

double log_loss_gradient(double g, double theta) {
  require_finite(g, "g");
  require_finite(theta, "theta");
  double factor = 1.0 - g * theta;
  if (factor <= 0.0) {
    throw DomainError("wealth factor 1 - g*theta is nonpositive (" +
                      std::to_string(factor) + ")");
  }
  return g / factor;
}

OnsBettorState ons_update(const OnsBettorState& state, double g_effective,
                          DecisionInterval next_interval) {
  double z = log_loss_gradient(g_effective, state.theta);
  OnsBettorState next = state;
  next.a = state.a + z * z;
  next.theta = next_interval.clamp(state.theta - z / (state.gamma * next.a));
  next.interval = next_interval;
  return next;
}

}  // namespace streambet
