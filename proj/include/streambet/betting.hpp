#pragma once

#include <algorithm>
#include <cmath>

#include "streambet/errors.hpp"

namespace streambet {

// Step parameter used throughout unless overridden: gamma = (2 - ln 3) / 2.
inline const double kDefaultGamma = (2.0 - std::log(3.0)) / 2.0;

enum class IntervalMode { simple, composite };

// Closed interval of admissible betting fractions.
struct DecisionInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double diameter() const { return hi - lo; }
  // max(min(v, hi), lo), matching the update rule's projection form.
  double clamp(double v) const { return std::max(std::min(v, hi), lo); }

  friend bool operator==(const DecisionInterval&,
                         const DecisionInterval&) = default;
};

// Interval keeping wealth nonnegative for outcomes bounded by d:
// simple -> [-1/(2d), +1/(2d)], composite -> [-1/(2d), 0].
DecisionInterval decision_interval(double d, IntervalMode mode);

// w_prev * (1 - g * theta).
double wealth_step(double w_prev, double g, double theta);

// -ln(1 - g * theta); requires 1 - g*theta > 0.
double log_loss(double g, double theta);

// d/dtheta of log_loss: g / (1 - g * theta).
double log_loss_gradient(double g, double theta);

// Betting fraction driven by a one-dimensional Online Newton Step.
struct OnsBettorState {
  double theta = 0.0;
  double a = 1.0;
  double gamma = kDefaultGamma;
  DecisionInterval interval;
};

// z = gradient at (g_effective, theta); a' = a + z^2;
// theta' = clamp(theta - z / (gamma * a'), next_interval).
OnsBettorState ons_update(const OnsBettorState& state, double g_effective,
                          DecisionInterval next_interval);

struct WealthState {
  double wealth = 1.0;
  long step = 0;
};

}  // namespace streambet
