#include "fixpoint/analysis.hpp"

#include <algorithm>

namespace fixpoint {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double pos_inf = std::numeric_limits<double>::infinity();

} // namespace

ErrorSequence error_sequence(const Trajectory& traj, const Vector& fixed_point, Norm kind)
{
   ErrorSequence seq;
   seq.first_index = traj.first_index;
   seq.scheme = std::string(to_string(traj.scheme));
   seq.operator_id = traj.operator_id;
   seq.schedule_id = traj.schedule_id;
   seq.values.reserve(traj.iterates.size());
   for (const auto& x : traj.iterates) seq.values.push_back(distance(x, fixed_point, kind));
   return seq;
}

ErrorSequence closed_form_errors(Scheme scheme, Index n_max, double x0)
{
   if (scheme != Scheme::picard_s && scheme != Scheme::cr)
      throw std::invalid_argument("closed forms exist only for picard_s and cr");
   if (n_max < 25) throw RangeError("closed_form_errors requires n_max >= 25");

   ErrorSequence seq;
   seq.first_index = 25;
   seq.scheme = std::string(to_string(scheme));
   seq.operator_id = "halving";
   seq.schedule_id = "example1";
   double value = std::abs(x0);
   double log_value = x0 == 0.0 ? neg_inf : std::log(std::abs(x0));
   for (Index n = 25; n <= n_max; ++n) {
      const double factor = scheme == Scheme::picard_s ? ps_factor(n) : cr_factor(n);
      value *= factor;
      log_value += std::log(factor);
      seq.values.push_back(value);
      seq.log_values.push_back(log_value);
   }
   return seq;
}

std::string_view to_string(RateClass c)
{
   switch (c) {
   case RateClass::a_faster: return "a_faster";
   case RateClass::same_rate: return "same_rate";
   case RateClass::b_faster: return "b_faster";
   case RateClass::inconclusive: return "inconclusive";
   }
   return "?";
}

RateClass classify_rate(double l, const RateThresholds& t)
{
   if (l < t.faster) return RateClass::a_faster;
   if (l > t.slower) return RateClass::b_faster;
   if (l >= t.same_low && l <= t.same_high) return RateClass::same_rate;
   return RateClass::inconclusive;
}

RateVerdict rate_compare(const ErrorSequence& a, const ErrorSequence& b, std::size_t window,
                         const RateThresholds& thresholds)
{
   if (window < 8) throw std::invalid_argument("rate_compare: window must be >= 8");
   if (a.size() != b.size()) throw std::invalid_argument("rate_compare: sequences differ in length");
   if (a.size() < 2 * window)
      throw InsufficientData("rate_compare: sequences shorter than 2*window");

   const bool use_log = a.has_log() && b.has_log();
   auto is_zero = [use_log](const ErrorSequence& e, std::size_t i) {
      return use_log ? e.log_values[i] == neg_inf : e.values[i] == 0.0;
   };

   std::size_t end = a.size();
   while (end > 0 && is_zero(a, end - 1) && is_zero(b, end - 1)) --end;
   const std::size_t begin = end > window ? end - window : 0;

   RateVerdict verdict;
   std::size_t informative = 0;
   for (std::size_t i = begin; i < end; ++i) {
      const bool za = is_zero(a, i);
      const bool zb = is_zero(b, i);
      double ratio;
      if (za && zb) {
         ratio = 1.0;
      } else {
         ++informative;
         if (zb) ratio = pos_inf;
         else if (use_log) ratio = std::exp(a.log_values[i] - b.log_values[i]);
         else ratio = a.values[i] / b.values[i];
      }
      verdict.ratio_tail.push_back(ratio);
   }
   if (informative < window / 2)
      throw InsufficientData("rate_compare: fewer than window/2 informative ratios");

   std::vector<double> sorted = verdict.ratio_tail;
   std::sort(sorted.begin(), sorted.end());
   const std::size_t m = sorted.size();
   verdict.l_estimate = m % 2 == 1 ? sorted[m / 2]
                        : sorted[m / 2] == pos_inf ? pos_inf
                                                   : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
   verdict.classification = classify_rate(verdict.l_estimate, thresholds);
   return verdict;
}

namespace {

double theorem1_factor(double delta, const Schedule& s, Index k)
{
   return delta * delta * (1.0 - s(k, 1) * s(k, 2) * (1.0 - delta));
}

void check_delta(double delta)
{
   if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

} // namespace

LogProduct theorem1_bound(double delta, const Schedule& s, double x0_err, Index n)
{
   check_delta(delta);
   if (!(x0_err >= 0.0)) throw std::invalid_argument("theorem1_bound: x0_err must be >= 0");
   return accumulate_product(x0_err, 0, n, [&](Index k) { return theorem1_factor(delta, s, k); });
}

std::vector<LogProduct> theorem1_bound_sequence(double delta, const Schedule& s, double x0_err,
                                                Index n_max)
{
   check_delta(delta);
   if (!(x0_err >= 0.0)) throw std::invalid_argument("theorem1_bound: x0_err must be >= 0");
   std::vector<LogProduct> out;
   out.reserve(n_max + 1);
   LogProduct p;
   p.value = x0_err;
   p.log_abs = x0_err == 0.0 ? neg_inf : std::log(x0_err);
   out.push_back(p);
   for (Index m = 1; m <= n_max; ++m) {
      const double f = theorem1_factor(delta, s, m - 1);
      p.value *= f;
      p.log_abs += std::log(f);
      p.underflow = x0_err != 0.0 && p.value < underflow_threshold;
      out.push_back(p);
   }
   return out;
}

std::string_view to_string(ThetaVariant v)
{
   return v == ThetaVariant::vs_sp ? "vs_sp" : "vs_noor";
}

ThetaSequence theta_ratio_test(double delta, const Schedule& s, Index n, ThetaVariant variant)
{
   check_delta(delta);
   if (n < 1) throw std::invalid_argument("theta_ratio_test: N must be >= 1");

   ThetaSequence theta;
   theta.variant = variant;
   theta.delta = delta;
   theta.log_values.reserve(n + 1);
   theta.ratios.reserve(n);

   const double log_delta_sq = 2.0 * std::log(delta);
   auto lower_factor = [&](Index k, int i) {
      const double f = 1.0 - s(k, i) * (1.0 + delta);
      if (!(f > 0.0))
         throw DegenerateFactor("theta_ratio_test: factor 1 - a_" + std::to_string(k) + "^" +
                                std::to_string(i) + "(1+delta) is not positive");
      return std::log(f);
   };

   double log_theta = 0.0;
   for (Index k = 0; k <= n; ++k) {
      double increment = log_delta_sq + std::log(1.0 - s(k, 1) * s(k, 2) * (1.0 - delta));
      increment -= lower_factor(k, 0);
      if (variant == ThetaVariant::vs_sp) increment -= lower_factor(k, 1) + lower_factor(k, 2);
      const double next = log_theta + increment;
      if (k > 0) theta.ratios.push_back(std::exp(increment));
      log_theta = next;
      theta.log_values.push_back(log_theta);
   }
   theta.tail_ratio = theta.ratios.back();
   theta.tail_deviation = std::abs(theta.tail_ratio - delta * delta);
   return theta;
}

LemmaTrace lemma1_oracle(double beta0, const SequenceRule& lambda, const SequenceRule& rho, Index n,
                         double target)
{
   if (!(beta0 >= 0.0)) throw std::invalid_argument("lemma1_oracle: beta0 must be >= 0");
   LemmaTrace trace;
   trace.mode = LemmaMode::lemma1;
   trace.target = target;
   trace.beta.reserve(n + 1);
   trace.coefficient.reserve(n);
   trace.forcing.reserve(n);
   double beta = beta0;
   trace.beta.push_back(beta);
   for (Index k = 0; k < n; ++k) {
      const double l = lambda(k);
      const double r = rho(k);
      if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("lemma1_oracle: lambda_n outside (0,1)");
      if (!(r >= 0.0)) throw std::invalid_argument("lemma1_oracle: rho_n negative");
      beta = (1.0 - l) * beta + r;
      trace.coefficient.push_back(l);
      trace.forcing.push_back(r);
      trace.beta.push_back(beta);
   }
   trace.final_beta = beta;
   trace.decayed = beta < target;
   return trace;
}

LemmaTrace lemma2_oracle(double beta0, const SequenceRule& mu, const SequenceRule& gamma, Index n,
                         double tolerance)
{
   if (!(beta0 >= 0.0)) throw std::invalid_argument("lemma2_oracle: beta0 must be >= 0");
   LemmaTrace trace;
   trace.mode = LemmaMode::lemma2;
   trace.beta.reserve(n + 1);
   trace.coefficient.reserve(n);
   trace.forcing.reserve(n + 1);
   double beta = beta0;
   trace.beta.push_back(beta);
   for (Index k = 0; k <= n; ++k) {
      const double g = gamma(k);
      if (!(g >= 0.0)) throw std::invalid_argument("lemma2_oracle: gamma_n negative");
      trace.forcing.push_back(g);
      trace.gamma_max = std::max(trace.gamma_max, g);
      if (k == n) break;
      const double m = mu(k);
      if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("lemma2_oracle: mu_n outside (0,1)");
      beta = (1.0 - m) * beta + m * g;
      trace.coefficient.push_back(m);
      trace.beta.push_back(beta);
   }
   trace.final_beta = beta;
   for (Index k = n / 2; k <= n; ++k) trace.tail_max = std::max(trace.tail_max, trace.beta[k]);
   trace.limsup_ok = trace.tail_max <= trace.gamma_max + tolerance;
   return trace;
}

std::vector<DriverFamily> lemma1_driver_families()
{
   auto idx = [](Index n) { return static_cast<double>(n); };
   return {
      {"geometric", [](Index) { return 0.5; }, [](Index) { return 0.0; }},
      {"harmonic", [idx](Index n) { return 2.0 / (idx(n) + 3.0); },
       [idx](Index n) { return 2.0 / ((idx(n) + 3.0) * (idx(n) + 2.0)); }},
      {"root", [idx](Index n) { return 1.0 / std::sqrt(idx(n) + 2.0); },
       [idx](Index n) { return 1.0 / (std::sqrt(idx(n) + 2.0) * (idx(n) + 2.0)); }},
   };
}

DependenceReport data_dependence_experiment(const Operator& op, double epsilon, const Schedule& s,
                                            const Vector& x0, StopCriteria stop, PerturbMode mode,
                                            Norm kind, std::uint64_t seed)
{
   if (!op.fixed_point())
      throw std::invalid_argument("data_dependence_experiment: operator needs a known fixed point");
   if (!(epsilon > 0.0))
      throw std::invalid_argument("data_dependence_experiment: epsilon must be positive");

   DependenceReport report;
   report.epsilon = epsilon;
   report.delta = op.delta();
   report.u_star = *op.fixed_point();
   report.bound = 5.0 * epsilon / (1.0 - op.delta());
   report.hypothesis_ok = audit_theorem4(s, std::max<Index>(1, stop.max_iters)).pass;

   stop.step_tol = std::min(stop.step_tol.value_or(1e-13), 1e-13);
   const IterateOptions options{false, 0, kind};

   // Unperturbed run; its only role is to confirm the reference scheme is well posed.
   (void)iterate(Scheme::picard_s, op, s, x0, stop, options);

   StopCriteria tilde_stop = stop;
   tilde_stop.error_tol.reset();
   const PerturbedOperator perturbed = perturb(op, epsilon, mode, seed, kind);
   const Trajectory tilde = iterate(Scheme::picard_s, perturbed.approx, s, x0, tilde_stop, options);
   if (tilde.stop_reason != StopReason::step_tol)
      throw NotConverged("data_dependence_experiment: perturbed Picard-S did not converge within " +
                         std::to_string(tilde_stop.max_iters) + " iterations");

   report.u_tilde = tilde.last();
   report.iterations = tilde.steps();
   report.distance = distance(report.u_star, report.u_tilde, kind);
   report.pass = report.distance <= report.bound + 1e-12;
   return report;
}

} // namespace fixpoint
