#include "fixpoint/io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace fixpoint;

TEST_CASE("operator_from_json")
{
   SUBCASE("halving with defaults")
   {
      const Operator op = operator_from_json(Json::parse(R"({"kind": "halving"})"));
      CHECK(op.id() == "halving");
      CHECK(op.delta() == 0.5);
      CHECK(op.lipschitz_l() == 0.0);
      CHECK(op(Vector::Constant(1, 0.5))[0] == 0.25);
   }
   SUBCASE("affine1d with slope from delta")
   {
      const Operator op =
         operator_from_json(Json::parse(R"({"id": "a", "kind": "affine1d", "delta": 0.25, "params": {"c": 0.8}})"));
      CHECK(op.id() == "a");
      CHECK(op.fixed_point()->coeff(0) == doctest::Approx(0.8));
      CHECK(op(Vector::Constant(1, 0.0))[0] == doctest::Approx(0.6));
   }
   SUBCASE("affine2d with an explicit matrix")
   {
      const Operator op = operator_from_json(
         Json::parse(R"({"kind": "affine2d", "params": {"A": [[0.5, 0.0], [0.0, 0.5]], "b": [0.25, 0.5]}})"));
      CHECK(op.domain().dim() == 2);
      CHECK(op.fixed_point()->coeff(0) == doctest::Approx(0.5));
      CHECK(op.fixed_point()->coeff(1) == doctest::Approx(1.0));
   }
   SUBCASE("errors become LoadError")
   {
      CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"kind": "logistic"})")), LoadError);
      CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"id": "x"})")), LoadError);
      CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"kind": "halving", "delta": 1.5})")), LoadError);
      CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"kind": "affine2d", "params": {"A": [[1]]}})")),
                      LoadError);
   }
}

TEST_CASE("schedule_from_json")
{
   const Schedule ex = schedule_from_json(Json::parse(R"({"kind": "example1"})"));
   CHECK(ex(25, 0) == 0.8);
   const Schedule c = schedule_from_json(Json::parse(R"({"id": "steady", "kind": "constant", "params": {"c": 0.75}})"));
   CHECK(c.id() == "steady");
   CHECK(c(9, 2) == 0.75);
   CHECK(schedule_from_json(Json::parse(R"({"kind": "harmonic"})"))(0, 0) == 0.5);
   CHECK_THROWS_AS(schedule_from_json(Json::parse(R"({"kind": "sawtooth"})")), LoadError);
   CHECK_THROWS_AS(schedule_from_json(Json::parse(R"({"kind": "constant", "params": {"c": 2}})")), LoadError);
}

TEST_CASE("vectors")
{
   CHECK(vector_from_json(Json(0.5)).size() == 1);
   CHECK(vector_from_json(Json::parse("[1, 2, 3]"))[2] == 3.0);
   CHECK_THROWS_AS(vector_from_json(Json::parse("[]")), LoadError);
   CHECK_THROWS_AS(vector_from_json(Json::parse(R"(["a"])")), LoadError);
   CHECK(vector_to_json(vector_from_json(Json::parse("[0.25, 4]"))) == Json::parse("[0.25, 4.0]"));
}

TEST_CASE("dump_json sorts keys and prints 17 digits")
{
   const Json doc = {{"zeta", 0.1}, {"alpha", 1}, {"mid", {{"b", true}, {"a", nullptr}}}};
   CHECK(dump_json(doc) == R"({"alpha":1,"mid":{"a":null,"b":true},"zeta":0.10000000000000001})");
   CHECK(dump_json(Json(std::numeric_limits<double>::infinity())) == R"("inf")");
}

TEST_CASE("report serialization")
{
   RateVerdict v;
   v.l_estimate = std::numeric_limits<double>::infinity();
   v.classification = RateClass::b_faster;
   v.ratio_tail = {1.0, std::numeric_limits<double>::infinity()};
   const Json j = to_json(v);
   CHECK(j["l_estimate"] == "inf");
   CHECK(j["classification"] == "b_faster");
   CHECK(j["ratio_tail"][1] == "inf");

   DependenceReport r;
   r.epsilon = 0.001;
   r.distance = 0.002;
   r.bound = 0.01;
   r.pass = true;
   r.u_star = Vector::Zero(1);
   r.u_tilde = Vector::Constant(1, 0.002);
   const Json d = to_json(r);
   for (const char* key : {"epsilon", "distance", "bound", "pass", "hypothesis_ok"}) CHECK(d.contains(key));
   CHECK(d["pass"] == true);

   const auto audit = audit_schedule(schedules::example1(), 0.5, 100, 10.0);
   const Json a = to_json(audit);
   CHECK(a["theorem3"]["first_violation_index"] == 25);
   CHECK(a["theorem3_pass"] == false);
   CHECK(a["theorem4"]["first_violation_index"] == 0);
   CHECK(a["partial_sum"].get<double>() > 10.0);
}
