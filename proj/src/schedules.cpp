#include "fixpoint/schedules.hpp"

#include <algorithm>

namespace fixpoint {

Schedule::Schedule(std::string id, Rule rule0, Rule rule1, Rule rule2)
   : id_(std::move(id)),
     rules_(std::make_shared<const std::array<Rule, 3>>(
        std::array<Rule, 3>{std::move(rule0), std::move(rule1), std::move(rule2)}))
{
}

Schedule::Schedule(std::string id, Rule rule) : Schedule(std::move(id), rule, rule, rule) {}

double Schedule::operator()(Index n, int i) const
{
   if (i < 0 || i > 2) throw std::out_of_range("schedule index i must be 0, 1 or 2");
   const double a = (*rules_)[static_cast<std::size_t>(i)](n);
   if (!(a >= 0.0 && a <= 1.0))
      throw RangeError("schedule '" + id_ + "' produced " + format_real(a) + " at n=" +
                       std::to_string(n) + ", outside [0,1]");
   return a;
}

namespace schedules {

Schedule example1()
{
   return Schedule("example1", [](Index n) {
      return n <= 24 ? 0.0 : 4.0 / std::sqrt(static_cast<double>(n));
   });
}

Schedule constant(double c)
{
   if (!(c >= 0.0 && c <= 1.0)) throw RangeError("constant schedule value outside [0,1]");
   return Schedule("constant(" + format_real(c) + ")", [c](Index) { return c; });
}

Schedule harmonic()
{
   return Schedule("harmonic", [](Index n) { return 1.0 / (static_cast<double>(n) + 2.0); });
}

Schedule zero()
{
   return Schedule("zero", [](Index) { return 0.0; });
}

} // namespace schedules

Theorem1Audit audit_theorem1(const Schedule& s, Index n, double threshold)
{
   if (n < 1) throw std::invalid_argument("audit_theorem1: N must be >= 1");
   if (!(threshold > 0.0)) throw std::invalid_argument("audit_theorem1: threshold must be positive");
   Theorem1Audit audit;
   for (Index k = 0; k <= n; ++k) audit.partial_sum += s(k, 1) * s(k, 2);
   audit.evidence = audit.partial_sum >= threshold;
   return audit;
}

HypothesisAudit audit_theorem3(const Schedule& s, double delta, Index n)
{
   if (n < 1) throw std::invalid_argument("audit_theorem3: N must be >= 1");
   const double cap = 1.0 / (1.0 + delta);
   const Index half = n / 2;

   HypothesisAudit audit;
   double head_max = 0.0;
   double tail_max = 0.0;
   for (Index k = 0; k <= n; ++k) {
      for (int i = 0; i < 3; ++i) {
         const double a = s(k, i);
         if (!(a < cap) && !audit.first_violation_index) audit.first_violation_index = k;
         if (k < half) head_max = std::max(head_max, a);
         else tail_max = std::max(tail_max, a);
      }
   }
   audit.decay_ok = tail_max < head_max || tail_max < 1e-3;
   audit.pass = !audit.first_violation_index && audit.decay_ok;
   return audit;
}

HypothesisAudit audit_theorem4(const Schedule& s, Index n)
{
   if (n < 1) throw std::invalid_argument("audit_theorem4: N must be >= 1");
   HypothesisAudit audit;
   for (Index k = 0; k <= n; ++k) {
      if (s(k, 1) * s(k, 2) < 0.5) {
         audit.first_violation_index = k;
         audit.pass = false;
         break;
      }
   }
   return audit;
}

ScheduleAudit audit_schedule(const Schedule& s, double delta, Index n, double threshold)
{
   ScheduleAudit audit;
   audit.schedule_id = s.id();
   audit.n = n;
   audit.delta = delta;
   audit.threshold = threshold;
   audit.theorem1 = audit_theorem1(s, n, threshold);
   audit.theorem3 = audit_theorem3(s, delta, n);
   audit.theorem4 = audit_theorem4(s, n);
   return audit;
}

} // namespace fixpoint
