#ifndef FIXPOINT_SCHEMES_HPP
#define FIXPOINT_SCHEMES_HPP

#include "fixpoint/core.hpp"
#include "fixpoint/operators.hpp"
#include "fixpoint/schedules.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fixpoint {

enum class Scheme { picard, mann, ishikawa, noor, sp, thianwan, s, cr, picard_s };

inline constexpr std::array<Scheme, 9> all_schemes = {
   Scheme::picard, Scheme::mann,     Scheme::ishikawa, Scheme::noor,    Scheme::sp,
   Scheme::thianwan, Scheme::s,      Scheme::cr,       Scheme::picard_s};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

struct StepResult
{
   Vector next;
   /// Innermost auxiliary point (z), present for three-stage schemes.
   std::optional<Vector> z;
   /// Middle auxiliary point (y), present for two- and three-stage schemes.
   std::optional<Vector> y;
};

/// One update x_n -> x_{n+1} with the control values taken at index n.
///
///   picard    x' = Tx
///   mann      x' = (1-a0)x + a0 Tx
///   ishikawa  y = (1-a1)x + a1 Tx;  x' = (1-a0)x + a0 Ty
///   noor      z = (1-a2)x + a2 Tx;  y = (1-a1)x + a1 Tz;  x' = (1-a0)x + a0 Ty
///   sp        z = (1-a2)x + a2 Tx;  y = (1-a1)z + a1 Tz;  x' = (1-a0)y + a0 Ty
///   thianwan  y = (1-a1)x + a1 Tx;  x' = (1-a0)y + a0 Ty
///   s         y = (1-a1)x + a1 Tx;  x' = (1-a0)Tx + a0 Ty
///   cr        z = (1-a2)x + a2 Tx;  y = (1-a1)Tx + a1 Tz;  x' = (1-a0)y + a0 Ty
///   picard_s  z = (1-a2)x + a2 Tx;  y = (1-a1)Tx + a1 Tz;  x' = Ty
///
/// Every convex combination is evaluated as (1-a)*u + a*v in that order.
StepResult step(Scheme scheme, const Operator& op, const Schedule& s, Index n, const Vector& x);

enum class StopReason { max_iters, step_tol, error_tol };
std::string_view to_string(StopReason reason);

struct StopCriteria
{
   std::size_t max_iters = 100000;
   /// On ||x_{n+1} - x_n||; disabled when empty.
   std::optional<double> step_tol;
   /// On ||x_n - u*||; requires a known fixed point.
   std::optional<double> error_tol;
};

struct IterateOptions
{
   bool keep_aux = false;
   /// Schedule index used for the first step.
   Index first_index = 0;
   Norm norm = Norm::euclidean;
};

struct AuxPoints
{
   std::optional<Vector> z;
   std::optional<Vector> y;
};

struct Trajectory
{
   Scheme scheme = Scheme::picard;
   std::string operator_id;
   std::string schedule_id;
   Vector x0;
   Index first_index = 0;
   /// iterates[j] is x_{first_index + j}.
   std::vector<Vector> iterates;
   /// aux[j] holds the auxiliaries of the step from iterates[j]; empty unless requested.
   std::vector<AuxPoints> aux;
   StopReason stop_reason = StopReason::max_iters;

   std::size_t steps() const { return iterates.empty() ? 0 : iterates.size() - 1; }
   const Vector& last() const { return iterates.back(); }
};

Trajectory iterate(Scheme scheme, const Operator& op, const Schedule& s, const Vector& x0,
                   const StopCriteria& stop = {}, const IterateOptions& options = {});

/// Per-step error factors of Picard-S and CR on the halving map under example1, k >= 25.
double ps_factor(Index k);
double cr_factor(Index k);

/// x0 * prod_{k=25}^{n} (1/4 - 2/k): Picard-S on the halving map, example1 schedule,
/// where x0 is the iterate at index 25. Throws RangeError for n < 25.
LogProduct ps_closed_form(Index n, double x0);

/// x0 * prod_{k=25}^{n} (1/2 - 1/sqrt(k) - 4/k + 8/(k sqrt(k))), same setting for CR.
LogProduct cr_closed_form(Index n, double x0);

/// CSV with header `n,x[0],...,x[d-1],err`; err is blank when u* is unknown.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<Vector>& fixed_point, Norm kind = Norm::euclidean);

} // namespace fixpoint

#endif // FIXPOINT_SCHEMES_HPP
