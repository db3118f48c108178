#ifndef FIXPOINT_SCHEDULES_HPP
#define FIXPOINT_SCHEDULES_HPP

#include "fixpoint/core.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace fixpoint {

using Rule = std::function<double(Index)>;

/// The three control sequences a_n^0, a_n^1, a_n^2 as pure rules of n.
class Schedule
{
public:
   Schedule(std::string id, Rule rule0, Rule rule1, Rule rule2);
   /// Same rule for all three sequences.
   Schedule(std::string id, Rule rule);

   const std::string& id() const { return id_; }

   /// a_n^i. Throws RangeError if the rule leaves [0,1].
   double operator()(Index n, int i) const;

private:
   std::string id_;
   std::shared_ptr<const std::array<Rule, 3>> rules_;
};

inline double eval_schedule(const Schedule& s, Index n, int i) { return s(n, i); }

namespace schedules {

/// 0 for n <= 24, 4/sqrt(n) afterwards (n = 0 included in the zero branch).
Schedule example1();
Schedule constant(double c);
/// 1/(n+2).
Schedule harmonic();
Schedule zero();

} // namespace schedules

/// Partial sum of a_k^1 a_k^2 over k = 0..N, reported as divergence evidence.
struct Theorem1Audit
{
   double partial_sum = 0.0;
   bool evidence = false;
};

struct HypothesisAudit
{
   bool pass = true;
   std::optional<Index> first_violation_index;
   /// Theorem 3 only: whether the finite-window decay evidence held.
   bool decay_ok = true;
};

struct ScheduleAudit
{
   std::string schedule_id;
   Index n = 0;
   double delta = 0.0;
   double threshold = 0.0;
   Theorem1Audit theorem1;
   HypothesisAudit theorem3;
   HypothesisAudit theorem4;
};

Theorem1Audit audit_theorem1(const Schedule& s, Index n, double threshold);

/// Condition (i): a_n^i < 1/(1+delta) for all n <= N. Condition (ii) is
/// evidenced by the tail window [N/2, N] maximum being below the head
/// maximum on [0, N/2) or below 1e-3.
HypothesisAudit audit_theorem3(const Schedule& s, double delta, Index n);

/// a_n^1 a_n^2 >= 1/2 for all n <= N.
HypothesisAudit audit_theorem4(const Schedule& s, Index n);

ScheduleAudit audit_schedule(const Schedule& s, double delta, Index n, double threshold);

} // namespace fixpoint

#endif // FIXPOINT_SCHEDULES_HPP
