#include "fixpoint/schemes.hpp"

#include <ostream>

namespace fixpoint {

std::string_view to_string(Scheme scheme)
{
   switch (scheme) {
   case Scheme::picard: return "picard";
   case Scheme::mann: return "mann";
   case Scheme::ishikawa: return "ishikawa";
   case Scheme::noor: return "noor";
   case Scheme::sp: return "sp";
   case Scheme::thianwan: return "thianwan";
   case Scheme::s: return "s";
   case Scheme::cr: return "cr";
   case Scheme::picard_s: return "picard_s";
   }
   return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
   for (Scheme s : all_schemes)
      if (to_string(s) == name) return s;
   return std::nullopt;
}

std::string_view to_string(StopReason reason)
{
   switch (reason) {
   case StopReason::max_iters: return "max_iters";
   case StopReason::step_tol: return "step_tol";
   case StopReason::error_tol: return "error_tol";
   }
   return "?";
}

namespace {

// (1-a)u + a v, in that order.
Vector combine(double a, const Vector& u, const Vector& v)
{
   return (1.0 - a) * u + a * v;
}

} // namespace

StepResult step(Scheme scheme, const Operator& op, const Schedule& s, Index n, const Vector& x)
{
   const Operator& T = op;
   const double a0 = s(n, 0);
   const double a1 = s(n, 1);
   const double a2 = s(n, 2);
   const Vector tx = T(x);

   StepResult r;
   switch (scheme) {
   case Scheme::picard:
      r.next = tx;
      break;
   case Scheme::mann:
      r.next = combine(a0, x, tx);
      break;
   case Scheme::ishikawa:
      r.y = combine(a1, x, tx);
      r.next = combine(a0, x, T(*r.y));
      break;
   case Scheme::noor:
      r.z = combine(a2, x, tx);
      r.y = combine(a1, x, T(*r.z));
      r.next = combine(a0, x, T(*r.y));
      break;
   case Scheme::sp: {
      r.z = combine(a2, x, tx);
      r.y = combine(a1, *r.z, T(*r.z));
      r.next = combine(a0, *r.y, T(*r.y));
      break;
   }
   case Scheme::thianwan:
      r.y = combine(a1, x, tx);
      r.next = combine(a0, *r.y, T(*r.y));
      break;
   case Scheme::s:
      r.y = combine(a1, x, tx);
      r.next = combine(a0, tx, T(*r.y));
      break;
   case Scheme::cr:
      r.z = combine(a2, x, tx);
      r.y = combine(a1, tx, T(*r.z));
      r.next = combine(a0, *r.y, T(*r.y));
      break;
   case Scheme::picard_s:
      r.z = combine(a2, x, tx);
      r.y = combine(a1, tx, T(*r.z));
      r.next = T(*r.y);
      break;
   }
   return r;
}

Trajectory iterate(Scheme scheme, const Operator& op, const Schedule& s, const Vector& x0,
                   const StopCriteria& stop, const IterateOptions& options)
{
   if (stop.max_iters < 1) throw std::invalid_argument("iterate: max_iters must be >= 1");
   if (stop.error_tol && !op.fixed_point())
      throw std::invalid_argument("iterate: error_tol requires a known fixed point");
   if (!op.domain().contains(x0)) throw DomainError("iterate: x0 outside the operator domain");

   Trajectory traj;
   traj.scheme = scheme;
   traj.operator_id = op.id();
   traj.schedule_id = s.id();
   traj.x0 = x0;
   traj.first_index = options.first_index;
   traj.iterates.push_back(x0);

   auto error_met = [&](const Vector& x) {
      return stop.error_tol && distance(x, *op.fixed_point(), options.norm) <= *stop.error_tol;
   };
   if (error_met(x0)) {
      traj.stop_reason = StopReason::error_tol;
      return traj;
   }

   for (std::size_t k = 0; k < stop.max_iters; ++k) {
      const Vector& x = traj.iterates.back();
      StepResult r = step(scheme, op, s, options.first_index + k, x);
      const double moved = distance(r.next, x, options.norm);
      if (options.keep_aux) traj.aux.push_back(AuxPoints{std::move(r.z), std::move(r.y)});
      traj.iterates.push_back(std::move(r.next));

      if (error_met(traj.iterates.back())) {
         traj.stop_reason = StopReason::error_tol;
         return traj;
      }
      if (stop.step_tol && moved <= *stop.step_tol) {
         traj.stop_reason = StopReason::step_tol;
         return traj;
      }
   }
   traj.stop_reason = StopReason::max_iters;
   return traj;
}

double ps_factor(Index k)
{
   const double kk = static_cast<double>(k);
   return 0.25 - 2.0 / kk;
}

double cr_factor(Index k)
{
   const double kk = static_cast<double>(k);
   const double r = std::sqrt(kk);
   return 0.5 - 1.0 / r - 4.0 / kk + 8.0 / (kk * r);
}

LogProduct ps_closed_form(Index n, double x0)
{
   if (n < 25) throw RangeError("ps_closed_form requires n >= 25");
   return accumulate_product(x0, 25, n, ps_factor);
}

LogProduct cr_closed_form(Index n, double x0)
{
   if (n < 25) throw RangeError("cr_closed_form requires n >= 25");
   return accumulate_product(x0, 25, n, cr_factor);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<Vector>& fixed_point, Norm kind)
{
   const Eigen::Index d = traj.x0.size();
   out << "n";
   for (Eigen::Index i = 0; i < d; ++i) out << ",x[" << i << "]";
   out << ",err\n";
   for (std::size_t j = 0; j < traj.iterates.size(); ++j) {
      const Vector& x = traj.iterates[j];
      out << traj.first_index + j;
      for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_real(x[i]);
      out << ',';
      if (fixed_point) out << format_real(distance(x, *fixed_point, kind));
      out << '\n';
   }
}

} // namespace fixpoint
