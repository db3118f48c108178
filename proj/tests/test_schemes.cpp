#include "fixpoint/schemes.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace fixpoint;

namespace {

Vector scalar(double x)
{
   Vector v(1);
   v[0] = x;
   return v;
}

Schedule fixed(double a0, double a1, double a2)
{
   return Schedule("fixed", [a0](Index) { return a0; }, [a1](Index) { return a1; },
                   [a2](Index) { return a2; });
}

} // namespace

TEST_CASE("scheme names round-trip")
{
   for (Scheme scheme : all_schemes) CHECK(parse_scheme(to_string(scheme)) == scheme);
   CHECK_FALSE(parse_scheme("newton"));
   CHECK(to_string(Scheme::picard_s) == "picard_s");
}

TEST_CASE("single steps at n = 25 under example1")
{
   const Operator halving = catalog::halving();
   const Schedule s = schedules::example1();

   const auto ps = step(Scheme::picard_s, halving, s, 25, scalar(1.0));
   REQUIRE(ps.z);
   REQUIRE(ps.y);
   CHECK((*ps.z)[0] == doctest::Approx(0.6).epsilon(1e-15));
   CHECK((*ps.y)[0] == doctest::Approx(0.34).epsilon(1e-15));
   CHECK(ps.next[0] == doctest::Approx(0.17).epsilon(1e-15));

   const auto cr = step(Scheme::cr, halving, s, 25, scalar(1.0));
   CHECK(cr.next[0] == doctest::Approx(0.204).epsilon(1e-15));

   SUBCASE("below 25 the controls vanish")
   {
      CHECK(step(Scheme::picard_s, halving, s, 3, scalar(1.0)).next[0] == 0.25);
      CHECK(step(Scheme::cr, halving, s, 3, scalar(1.0)).next[0] == 0.5);
      CHECK(step(Scheme::mann, halving, s, 3, scalar(1.0)).next[0] == 1.0);
   }
   SUBCASE("one-stage schemes report no auxiliaries")
   {
      const auto p = step(Scheme::picard, halving, s, 25, scalar(1.0));
      CHECK_FALSE(p.y);
      CHECK_FALSE(p.z);
      const auto i = step(Scheme::ishikawa, halving, s, 25, scalar(1.0));
      CHECK(i.y);
      CHECK_FALSE(i.z);
   }
}

TEST_CASE("iterate: Picard on the halving map")
{
   StopCriteria stop;
   stop.max_iters = 10;
   const auto traj = iterate(Scheme::picard, catalog::halving(), schedules::zero(), scalar(1.0), stop);
   REQUIRE(traj.iterates.size() == 11);
   for (std::size_t n = 0; n <= 10; ++n) CHECK(traj.iterates[n][0] == std::ldexp(1.0, -static_cast<int>(n)));
   CHECK(traj.last()[0] == 1.0 / 1024.0);
   CHECK(traj.stop_reason == StopReason::max_iters);
}

TEST_CASE("iterate: Picard-S stops on the error tolerance")
{
   StopCriteria stop;
   stop.error_tol = 1e-8;
   const auto traj = iterate(Scheme::picard_s, catalog::halving(), schedules::example1(), scalar(1.0), stop);
   CHECK(traj.stop_reason == StopReason::error_tol);
   // Each early step divides by 4; 4^-13 > 1e-8 >= 4^-14.
   CHECK(traj.steps() == 14);
   CHECK(traj.last()[0] == std::ldexp(1.0, -28));
   CHECK(traj.last()[0] <= 1e-8);
}

TEST_CASE("iterate: start at the fixed point with a zero step tolerance")
{
   for (Scheme scheme : all_schemes) {
      StopCriteria stop;
      stop.step_tol = 0.0;
      const auto traj = iterate(scheme, catalog::halving(), schedules::example1(), scalar(0.0), stop);
      CAPTURE(to_string(scheme));
      CHECK(traj.steps() == 1);
      CHECK(traj.stop_reason == StopReason::step_tol);
   }
}

TEST_CASE("iterate: argument checks")
{
   const Operator halving = catalog::halving();
   CHECK_THROWS_AS(iterate(Scheme::picard, halving, schedules::zero(), scalar(2.0)), DomainError);
   StopCriteria none;
   none.max_iters = 0;
   CHECK_THROWS_AS(iterate(Scheme::picard, halving, schedules::zero(), scalar(1.0), none),
                   std::invalid_argument);

   const auto p = perturb(halving, 0.01, PerturbMode::constant_offset);
   StopCriteria err;
   err.error_tol = 1e-3;
   CHECK_THROWS(iterate(Scheme::picard, p.approx, schedules::zero(), scalar(1.0), err));
}

TEST_CASE("iterate keeps auxiliaries only on request")
{
   StopCriteria stop;
   stop.max_iters = 5;
   const auto plain = iterate(Scheme::noor, catalog::halving(), schedules::harmonic(), scalar(1.0), stop);
   CHECK(plain.aux.empty());

   IterateOptions options;
   options.keep_aux = true;
   const auto kept =
      iterate(Scheme::noor, catalog::halving(), schedules::harmonic(), scalar(1.0), stop, options);
   REQUIRE(kept.aux.size() == 5);
   CHECK(kept.aux[0].z);
   CHECK(kept.aux[0].y);
}

TEST_CASE("closed forms")
{
   CHECK(ps_closed_form(25, 1.0).value == doctest::Approx(0.17).epsilon(1e-15));
   // 0.17 * (1/4 - 2/26) = 153/5200
   CHECK(ps_closed_form(26, 1.0).value == doctest::Approx(0.029423076923076923).epsilon(1e-14));
   CHECK(ps_closed_form(26, 0.0).value == 0.0);

   CHECK(cr_closed_form(25, 1.0).value == doctest::Approx(0.204).epsilon(1e-14));
   CHECK(cr_closed_form(26, 1.0).value == doctest::Approx(0.042917751991253393645).epsilon(1e-14));
   CHECK(cr_closed_form(40, 0.0).value == 0.0);

   CHECK_THROWS_AS(ps_closed_form(24, 1.0), RangeError);
   CHECK_THROWS_AS(cr_closed_form(0, 1.0), RangeError);

   SUBCASE("long products underflow into the log domain")
   {
      const auto p = ps_closed_form(2000, 1.0);
      CHECK(p.underflow);
      CHECK(p.log_abs < std::log(1e-300));
      const auto q = ps_closed_form(100, 1.0);
      CHECK_FALSE(q.underflow);
      CHECK(std::log(q.value) == doctest::Approx(q.log_abs).epsilon(1e-12));
   }
}

TEST_CASE("closed forms agree with iteration started at index 25")
{
   const Operator halving = catalog::halving();
   const Schedule s = schedules::example1();
   IterateOptions options;
   options.first_index = 25;
   StopCriteria stop;
   stop.max_iters = 176;
   const auto ps = iterate(Scheme::picard_s, halving, s, scalar(1.0), stop, options);
   const auto cr = iterate(Scheme::cr, halving, s, scalar(1.0), stop, options);
   for (Index n = 25; n <= 200; ++n) {
      const double ps_iter = ps.iterates[n - 24][0];
      const double cr_iter = cr.iterates[n - 24][0];
      const double ps_ref = ps_closed_form(n, 1.0).value;
      const double cr_ref = cr_closed_form(n, 1.0).value;
      CAPTURE(n);
      REQUIRE(std::abs(ps_iter - ps_ref) <= 1e-12 * ps_ref);
      REQUIRE(std::abs(cr_iter - cr_ref) <= 1e-12 * cr_ref);
   }
}

TEST_CASE("trajectory CSV")
{
   StopCriteria stop;
   stop.max_iters = 2;
   const auto traj = iterate(Scheme::picard, catalog::halving(), schedules::zero(), scalar(1.0), stop);

   std::ostringstream known;
   write_trajectory_csv(known, traj, scalar(0.0));
   CHECK(known.str() == "n,x[0],err\n0,1,1\n1,0.5,0.5\n2,0.25,0.25\n");

   std::ostringstream unknown;
   write_trajectory_csv(unknown, traj, std::nullopt);
   CHECK(unknown.str() == "n,x[0],err\n0,1,\n1,0.5,\n2,0.25,\n");

   SUBCASE("17 significant digits and shifted indices")
   {
      IterateOptions options;
      options.first_index = 25;
      StopCriteria one;
      one.max_iters = 1;
      const auto t = iterate(Scheme::cr, catalog::affine1d(0.5, 0.5), schedules::harmonic(),
                             scalar(0.1), one, options);
      std::ostringstream out;
      write_trajectory_csv(out, t, scalar(0.5));
      std::istringstream lines(out.str());
      std::string header, first, second;
      std::getline(lines, header);
      std::getline(lines, first);
      std::getline(lines, second);
      CHECK(first == "25,0.10000000000000001,0.40000000000000002");
      CHECK(second.rfind("26,", 0) == 0);
   }
}

// Properties

TEST_CASE("property: convex containment of iterates and auxiliaries")
{
   std::mt19937_64 rng(4242);
   std::uniform_real_distribution<double> u(0.0, 1.0);
   const std::vector<Operator> ops = builtin_catalog();
   const Schedule scheds[] = {schedules::example1(), schedules::harmonic(), schedules::constant(0.9),
                              schedules::zero()};
   IterateOptions options;
   options.keep_aux = true;
   StopCriteria stop;
   stop.max_iters = 30;
   for (int trial = 0; trial < 1000; ++trial) {
      const Operator& op = ops[trial % ops.size()];
      const Schedule& s = scheds[(trial / 3) % 4];
      const Scheme scheme = all_schemes[trial % all_schemes.size()];
      Vector x0(op.domain().dim());
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = u(rng);
      options.first_index = trial % 50;
      const auto traj = iterate(scheme, op, s, x0, stop, options);
      for (const auto& x : traj.iterates) REQUIRE(op.domain().contains(x));
      for (const auto& a : traj.aux) {
         if (a.z) REQUIRE(op.domain().contains(*a.z));
         if (a.y) REQUIRE(op.domain().contains(*a.y));
      }
   }
}

TEST_CASE("property: fixed points are invariant under every step")
{
   const Schedule scheds[] = {schedules::example1(), schedules::harmonic(), schedules::constant(0.6)};
   for (const auto& op : builtin_catalog(0.7, 0.3)) {
      const Vector& fp = *op.fixed_point();
      for (Scheme scheme : all_schemes)
         for (const auto& s : scheds)
            for (Index n : {0ull, 25ull, 1000ull}) {
               const Vector next = step(scheme, op, s, n, fp).next;
               REQUIRE((next - fp).cwiseAbs().maxCoeff() <= 1e-14);
            }
   }
}

TEST_CASE("property: reduction identities hold bit for bit")
{
   std::mt19937_64 rng(31337);
   std::uniform_real_distribution<double> u(0.0, 1.0);
   const auto ops = builtin_catalog();
   for (int k = 0; k < 1000; ++k) {
      const Operator& op = ops[k % ops.size()];
      Vector x(op.domain().dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
      const double a0 = u(rng), a1 = u(rng);

      const Schedule no_inner = fixed(a0, a1, 0.0);
      CHECK(step(Scheme::noor, op, no_inner, 0, x).next == step(Scheme::ishikawa, op, no_inner, 0, x).next);
      CHECK(step(Scheme::sp, op, no_inner, 0, x).next == step(Scheme::thianwan, op, no_inner, 0, x).next);

      const Schedule outer_only = fixed(a0, 0.0, 0.0);
      const Vector mann = step(Scheme::mann, op, outer_only, 0, x).next;
      CHECK(step(Scheme::noor, op, outer_only, 0, x).next == mann);
      CHECK(step(Scheme::sp, op, outer_only, 0, x).next == mann);
   }
}
