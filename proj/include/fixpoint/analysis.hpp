#ifndef FIXPOINT_ANALYSIS_HPP
#define FIXPOINT_ANALYSIS_HPP

#include "fixpoint/core.hpp"
#include "fixpoint/operators.hpp"
#include "fixpoint/schedules.hpp"
#include "fixpoint/schemes.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fixpoint {

/// ||x_n - u*|| along a trajectory. `log_values`, when nonempty, carries
/// ln(values[n]) computed without underflow and is preferred by rate_compare.
struct ErrorSequence
{
   std::vector<double> values;
   std::vector<double> log_values;
   Index first_index = 0;
   std::string scheme;
   std::string operator_id;
   std::string schedule_id;

   std::size_t size() const { return values.size(); }
   bool has_log() const { return !log_values.empty(); }
};

ErrorSequence error_sequence(const Trajectory& traj, const Vector& fixed_point,
                             Norm kind = Norm::euclidean);

/// Closed-form Example 1 errors for n = 25..n_max with x_25 = x0.
/// Only Scheme::picard_s and Scheme::cr have closed forms.
ErrorSequence closed_form_errors(Scheme scheme, Index n_max, double x0 = 1.0);

enum class RateClass { a_faster, same_rate, b_faster, inconclusive };
std::string_view to_string(RateClass c);

struct RateThresholds
{
   double faster = 0.01;   // l below: a converges faster
   double slower = 100.0;  // l above: b converges faster
   double same_low = 0.2;  // [same_low, same_high]: same rate
   double same_high = 5.0;
};

struct RateVerdict
{
   std::vector<double> ratio_tail;
   double l_estimate = 0.0;
   RateClass classification = RateClass::inconclusive;
};

RateClass classify_rate(double l, const RateThresholds& thresholds = {});

/// Estimates lim errA/errB as the median ratio over the last `window` indices.
/// Trailing indices where both errors are exactly zero are trimmed first; any
/// remaining 0/0 ratio counts as 1 and x/0 as +inf.
/// Throws InsufficientData when fewer than window/2 ratios are informative.
RateVerdict rate_compare(const ErrorSequence& a, const ErrorSequence& b, std::size_t window = 32,
                         const RateThresholds& thresholds = {});

/// delta^{2(n+1)} * x0_err * prod_{k=0}^{n} [1 - a_k^1 a_k^2 (1 - delta)].
/// Bounds ||x_{n+1} - u*|| for Picard-S. x0_err enters to the first power.
LogProduct theorem1_bound(double delta, const Schedule& s, double x0_err, Index n);

/// bounds[m] = bound on ||x_m - u*|| for m = 0..n_max (bounds[0] = x0_err).
std::vector<LogProduct> theorem1_bound_sequence(double delta, const Schedule& s, double x0_err,
                                                Index n_max);

enum class ThetaVariant { vs_sp, vs_noor };
std::string_view to_string(ThetaVariant v);

/// theta_n = delta^{2(n+1)} prod_k [1 - a_k^1 a_k^2 (1-delta)] / D_n with
///   vs_sp:   D_n = prod_k [1 - a_k^0 (1+delta)][1 - a_k^1 (1+delta)][1 - a_k^2 (1+delta)]
///   vs_noor: D_n = prod_k [1 - a_k^0 (1+delta)]
/// held in log domain.
struct ThetaSequence
{
   ThetaVariant variant = ThetaVariant::vs_sp;
   double delta = 0.0;
   std::vector<double> log_values;
   /// ratios[n] = theta_{n+1}/theta_n.
   std::vector<double> ratios;
   double tail_ratio = 0.0;
   double tail_deviation = 0.0;
};

ThetaSequence theta_ratio_test(double delta, const Schedule& s, Index n, ThetaVariant variant);

using SequenceRule = std::function<double(Index)>;

enum class LemmaMode { lemma1, lemma2 };

struct LemmaTrace
{
   LemmaMode mode = LemmaMode::lemma1;
   std::vector<double> beta;
   /// lambda_n or mu_n.
   std::vector<double> coefficient;
   /// rho_n or gamma_n.
   std::vector<double> forcing;
   double final_beta = 0.0;

   // lemma1
   double target = 0.0;
   bool decayed = false;

   // lemma2
   double tail_max = 0.0;
   double gamma_max = 0.0;
   bool limsup_ok = false;
};

/// beta_{n+1} = (1 - lambda_n) beta_n + rho_n run as an equality for n < N.
LemmaTrace lemma1_oracle(double beta0, const SequenceRule& lambda, const SequenceRule& rho, Index n,
                         double target = 1e-3);

/// beta_{n+1} = (1 - mu_n) beta_n + mu_n gamma_n; checks max beta over [N/2, N]
/// against max gamma over [0, N] plus tolerance.
LemmaTrace lemma2_oracle(double beta0, const SequenceRule& mu, const SequenceRule& gamma, Index n,
                         double tolerance = 1e-12);

struct DriverFamily
{
   std::string name;
   SequenceRule lambda;
   SequenceRule rho;
};

/// Driver pairs with lambda_n in (0,1), divergent sum and rho_n/lambda_n -> 0.
std::vector<DriverFamily> lemma1_driver_families();

struct DependenceReport
{
   double epsilon = 0.0;
   double delta = 0.0;
   Vector u_star;
   Vector u_tilde;
   double distance = 0.0;
   double bound = 0.0;
   bool pass = false;
   bool hypothesis_ok = true;
   std::size_t iterations = 0;
};

/// Runs Picard-S under T and under its constant-offset approximation from x0,
/// takes the converged T~ iterate as u~* and compares ||u* - u~*|| with
/// 5 eps / (1 - delta). Throws NotConverged if the T~ run never meets its step
/// tolerance (forced to <= 1e-13).
DependenceReport data_dependence_experiment(const Operator& op, double epsilon, const Schedule& s,
                                            const Vector& x0, StopCriteria stop = {},
                                            PerturbMode mode = PerturbMode::constant_offset,
                                            Norm kind = Norm::euclidean, std::uint64_t seed = 0);

} // namespace fixpoint

#endif // FIXPOINT_ANALYSIS_HPP
