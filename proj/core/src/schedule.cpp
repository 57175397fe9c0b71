#include "declip/schedule.hpp"

#include <cmath>
#include <sstream>

#include "declip/errors.hpp"

namespace declip {

double SchedulePair::alpha(long k) const {
  return alpha_coeff * std::pow(static_cast<double>(k) + 1.0, -alpha_exp);
}

double SchedulePair::tau(long k) const {
  return tau_coeff * std::pow(static_cast<double>(k) + 1.0, tau_exp);
}

void SchedulePair::check_structure() const {
  if (!(alpha_coeff > 0.0)) throw ScheduleInvalid("alpha coefficient must be positive");
  if (!(tau_coeff > 0.0)) throw ScheduleInvalid("tau coefficient must be positive");
  if (!(alpha_exp >= 0.0)) throw ScheduleInvalid("alpha exponent must be >= 0 (non-increasing step)");
  if (!(tau_exp >= 0.0)) throw ScheduleInvalid("tau exponent must be >= 0 (non-decreasing clip level)");
  if (!(delta > 1.0 && delta <= 2.0)) throw ScheduleInvalid("delta must lie in (1,2]");
}

std::string ScheduleReport::summary() const {
  std::ostringstream out;
  for (const auto& c : conditions) {
    out << c.name << ": " << (c.pass ? "pass" : "FAIL") << "  [" << c.detail << "]\n";
  }
  out << (all_pass ? "all conditions satisfied" : "conditions violated");
  return out.str();
}

namespace {

std::string inequality(double lhs, const char* op, double rhs) {
  std::ostringstream out;
  out << lhs << " " << op << " " << rhs;
  return out.str();
}

}  // namespace

ScheduleReport validate_schedules(const SchedulePair& s, double c0) {
  s.check_structure();
  const double p = s.alpha_exp;
  const double q = s.tau_exp;
  const double c = s.tau_coeff;
  const double d = s.delta;

  ScheduleReport report;

  {
    // Divergent step sum needs p <= 1 (harmonic boundary included);
    // square-summability needs 2p > 1.
    const bool pass = p <= 1.0 && 2.0 * p > 1.0;
    report.conditions.push_back(
        {"c1", "p = " + inequality(p, "<=", 1.0) + " and 2p = " + inequality(2.0 * p, ">", 1.0),
         pass});
  }
  {
    const bool floor_ok = c >= 2.0 * c0;
    const bool vanishing = q >= 0.0 && p > q;
    report.conditions.push_back(
        {"c2",
         "tau_0 = " + inequality(c, ">=", 2.0 * c0) + " and p = " + inequality(p, ">", q) + " = q",
         floor_ok && vanishing});
  }
  {
    const bool sq_summable = 2.0 * p - 2.0 * q > 1.0;
    const bool bias_summable = p + (2.0 * d - 2.0) * q > 1.0;
    report.conditions.push_back(
        {"c3",
         "2p-2q = " + inequality(2.0 * p - 2.0 * q, ">", 1.0) +
             " and p+(2d-2)q = " + inequality(p + (2.0 * d - 2.0) * q, ">", 1.0),
         sq_summable && bias_summable});
  }

  report.all_pass = true;
  for (const auto& cond : report.conditions) report.all_pass &= cond.pass;
  return report;
}

}  // namespace declip
