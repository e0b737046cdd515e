#pragma once

// Independent reference recomputation used only by tests. Deliberately shares
// no code with the library: every formula is written out inline, straight
// through, so agreement with the engine is a genuine cross-check.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct SimpleTrace {
  std::vector<double> wealth;  // W_t for t = 1..steps
  std::vector<double> theta;   // theta_t used at step t
  bool declared = false;
  long declared_at = 0;  // first t with W_t >= 1/alpha, 0 if none
};

// Simple-mode trajectory. d_seq[t-1] bounds step t; needs size >= g.size()+1
// because the update at step t projects onto the interval built from d_{t+1}.
inline SimpleTrace simple_trace(const std::vector<double>& g,
                                const std::vector<double>& d_seq, double alpha,
                                double gamma) {
  SimpleTrace out;
  double theta = 0.0;
  double a = 1.0;
  double w = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.theta.push_back(theta);
    w = w * (1.0 - g[i] * theta);
    out.wealth.push_back(w);
    if (!out.declared && w >= 1.0 / alpha) {
      out.declared = true;
      out.declared_at = static_cast<long>(i + 1);
    }
    double z = g[i] / (1.0 - g[i] * theta);
    a = a + z * z;
    double raw = theta - (1.0 / gamma) * (z / a);
    double cap = 1.0 / (2.0 * d_seq[i + 1]);
    theta = raw > cap ? cap : raw;
    theta = theta < -cap ? -cap : theta;
    if (out.declared && out.declared_at == static_cast<long>(i + 1)) break;
  }
  return out;
}

struct CompositeTrace {
  std::vector<double> wealth_a;
  std::vector<double> wealth_b;
  std::vector<double> theta_a;
  std::vector<double> theta_b;
  bool declared = false;
  long declared_at = 0;
};

// Composite-mode trajectory: side A bets on g - eps, side B on -g - eps,
// both projected onto [-1/(2 d_{t+1}), 0]; declare when either wealth
// reaches 2/alpha.
inline CompositeTrace composite_trace(const std::vector<double>& g,
                                      const std::vector<double>& d_seq,
                                      double eps, double alpha, double gamma) {
  CompositeTrace out;
  double ta = 0.0, tb = 0.0;
  double aa = 1.0, ab = 1.0;
  double wa = 1.0, wb = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.theta_a.push_back(ta);
    out.theta_b.push_back(tb);
    double ga = g[i] - eps;
    double gb = -g[i] - eps;
    wa = wa * (1.0 - ga * ta);
    wb = wb * (1.0 - gb * tb);
    out.wealth_a.push_back(wa);
    out.wealth_b.push_back(wb);
    if (!out.declared && (wa >= 2.0 / alpha || wb >= 2.0 / alpha)) {
      out.declared = true;
      out.declared_at = static_cast<long>(i + 1);
    }
    double za = ga / (1.0 - ga * ta);
    double zb = gb / (1.0 - gb * tb);
    aa = aa + za * za;
    ab = ab + zb * zb;
    double lo = -1.0 / (2.0 * d_seq[i + 1]);
    double ra = ta - (1.0 / gamma) * (za / aa);
    double rb = tb - (1.0 / gamma) * (zb / ab);
    ta = ra > 0.0 ? 0.0 : (ra < lo ? lo : ra);
    tb = rb > 0.0 ? 0.0 : (rb < lo ? lo : rb);
    if (out.declared && out.declared_at == static_cast<long>(i + 1)) break;
  }
  return out;
}

// Central finite difference of -ln(1 - g*theta) in theta.
inline double fd_gradient(double g, double theta, double h) {
  double up = -std::log(1.0 - g * (theta + h));
  double dn = -std::log(1.0 - g * (theta - h));
  return (up - dn) / (2.0 * h);
}

// Cross-pair maximum |x_i - y_j| by literal double loop.
inline double brute_force_cross_max(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  double best = 0.0;
  for (double xi : x)
    for (double yj : y) {
      double v = xi > yj ? xi - yj : yj - xi;
      if (v > best) best = v;
    }
  return best;
}

// Exact E|mean(group1) - mean(group2)| over all C(2n, n) half-splits,
// enumerated literally via bitmask subsets of size n.
inline double exhaustive_half_split_mean_gap(const std::vector<double>& pool) {
  std::size_t m = pool.size();
  std::size_t n = m / 2;
  double total_gap = 0.0;
  double splits = 0.0;
  // Gosper's hack over all m-bit words with exactly n bits set.
  unsigned long mask = (1UL << n) - 1UL;
  unsigned long limit = 1UL << m;
  while (mask < limit) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1UL << i))
        s1 += pool[i];
      else
        s2 += pool[i];
    }
    double gap = s1 / static_cast<double>(n) - s2 / static_cast<double>(m - n);
    total_gap += gap < 0 ? -gap : gap;
    splits += 1.0;
    unsigned long c = mask & (0UL - mask);
    unsigned long r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return total_gap / splits;
}

// Exact permutation p-value by enumerating every way to choose which k of
// the 2k pooled scores land in the first group: p = #{gap > observed}/total.
inline double exhaustive_permutation_pvalue(const std::vector<double>& x,
                                            const std::vector<double>& y) {
  std::size_t k = x.size();
  std::vector<double> pool(x);
  pool.insert(pool.end(), y.begin(), y.end());
  double mx = 0.0, my = 0.0;
  for (double v : x) mx += v;
  for (double v : y) my += v;
  double observed = mx / k - my / k;
  if (observed < 0) observed = -observed;
  std::size_t m = pool.size();
  unsigned long mask = (1UL << k) - 1UL;
  unsigned long limit = 1UL << m;
  double exceed = 0.0, total = 0.0;
  while (mask < limit) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1UL << i))
        s1 += pool[i];
      else
        s2 += pool[i];
    }
    double gap = (s1 - s2) / static_cast<double>(k);
    if (gap < 0) gap = -gap;
    if (gap > observed) exceed += 1.0;
    total += 1.0;
    unsigned long c = mask & (0UL - mask);
    unsigned long r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return exceed / total;
}

}  // namespace oracle
