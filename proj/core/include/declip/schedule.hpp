#pragma once

#include <string>
#include <vector>

namespace declip {

// Power-law step-size and clipping-level schedules
//   alpha_k = a (k+1)^{-p},  tau_k = c (k+1)^{q},
// together with the noise moment order delta used by the convergence
// conditions.
struct SchedulePair {
  double alpha_coeff = 1.0;  // a > 0
  double alpha_exp = 1.0;    // p >= 0
  double tau_coeff = 1.0;    // c > 0
  double tau_exp = 0.0;      // q >= 0
  double delta = 2.0;        // in (1, 2]

  double alpha(long k) const;
  double tau(long k) const;

  // Structural requirements only (positivity, monotonicity, delta range);
  // throws ScheduleInvalid.
  void check_structure() const;
};

struct ScheduleCondition {
  std::string name;      // "c1", "c2", "c3"
  std::string detail;    // the evaluated inequality
  bool pass = false;
};

struct ScheduleReport {
  std::vector<ScheduleCondition> conditions;
  bool all_pass = false;
  std::string summary() const;
};

// Closed-form check of the convergence conditions for power-law schedules:
//   c1: sum alpha_k = inf and sum alpha_k^2 < inf      <=>  p <= 1 and 2p > 1
//   c2: tau_k >= 2 C0 and alpha_k tau_k -> 0           <=>  c >= 2 c0, q >= 0, p > q
//   c3: sum alpha_k^2 tau_k^2 < inf and
//       sum alpha_k tau_k^{2-2 delta} < inf            <=>  2p - 2q > 1 and p + (2 delta - 2) q > 1
ScheduleReport validate_schedules(const SchedulePair& schedules, double c0);

}  // namespace declip
