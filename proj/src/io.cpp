#include "fixpoint/io.hpp"

#include <sstream>

namespace fixpoint {

namespace {

const Json& require(const Json& doc, const char* key)
{
   if (!doc.is_object() || !doc.contains(key))
      throw LoadError(std::string("missing required key '") + key + "'");
   return doc.at(key);
}

double number_or(const Json& doc, const char* key, double fallback)
{
   if (!doc.is_object() || !doc.contains(key)) return fallback;
   const Json& v = doc.at(key);
   if (!v.is_number()) throw LoadError(std::string("key '") + key + "' must be a number");
   return v.get<double>();
}

Domain domain_from_params(const Json& params, Eigen::Index dim)
{
   if (!params.contains("lower") && !params.contains("upper")) return Domain::unit_box(dim);
   return Domain(vector_from_json(require(params, "lower")), vector_from_json(require(params, "upper")));
}

void dump(std::ostream& out, const Json& doc)
{
   switch (doc.type()) {
   case Json::value_t::object: {
      out << '{';
      bool first = true;
      for (const auto& [key, value] : doc.items()) {
         if (!first) out << ',';
         first = false;
         out << Json(key).dump() << ':';
         dump(out, value);
      }
      out << '}';
      break;
   }
   case Json::value_t::array: {
      out << '[';
      for (std::size_t i = 0; i < doc.size(); ++i) {
         if (i) out << ',';
         dump(out, doc[i]);
      }
      out << ']';
      break;
   }
   case Json::value_t::number_float: {
      const double v = doc.get<double>();
      if (std::isfinite(v)) out << format_real(v);
      else out << '"' << format_real(v) << '"';
      break;
   }
   default:
      out << doc.dump();
   }
}

} // namespace

Json vector_to_json(const Vector& v)
{
   Json arr = Json::array();
   for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
   return arr;
}

Vector vector_from_json(const Json& doc)
{
   if (doc.is_number()) {
      Vector v(1);
      v << doc.get<double>();
      return v;
   }
   if (!doc.is_array() || doc.empty()) throw LoadError("expected a number or a nonempty array");
   Vector v(static_cast<Eigen::Index>(doc.size()));
   for (std::size_t i = 0; i < doc.size(); ++i) {
      if (!doc[i].is_number()) throw LoadError("vector entries must be numbers");
      v[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
   }
   return v;
}

Operator operator_from_json(const Json& doc)
{
   try {
      const std::string kind = require(doc, "kind").get<std::string>();
      const Json params = doc.value("params", Json::object());
      const std::string id = doc.value("id", kind);

      if (kind == "halving") {
         Operator base = catalog::halving(domain_from_params(params, 1));
         const double delta = number_or(doc, "delta", 0.5);
         const double l = number_or(doc, "L", 0.0);
         const Domain& dom = base.domain();
         return Operator(id, dom, [](const Vector& x) -> Vector { return 0.5 * x; }, delta, l,
                         Vector::Zero(dom.dim()));
      }
      if (kind == "affine1d") {
         const double delta = number_or(doc, "delta", 0.5);
         const double slope = number_or(params, "slope", delta);
         const double c = number_or(params, "c", 0.5);
         Operator base = catalog::affine1d(slope, c, delta, domain_from_params(params, 1));
         return Operator(id, base.domain(),
                         [base](const Vector& x) -> Vector { return base(x); }, delta,
                         number_or(doc, "L", 0.0), base.fixed_point());
      }
      if (kind == "affine2d") {
         Matrix a(2, 2);
         a << 0.3, 0.0, 0.0, 0.6;
         Vector b(2);
         b << 0.7, 0.2;
         if (params.contains("A")) {
            const Json& rows = params.at("A");
            if (!rows.is_array() || rows.empty()) throw LoadError("params.A must be a square matrix");
            const auto n = static_cast<Eigen::Index>(rows.size());
            a.resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
               const Vector row = vector_from_json(rows[static_cast<std::size_t>(i)]);
               if (row.size() != n) throw LoadError("params.A must be a square matrix");
               a.row(i) = row.transpose();
            }
         }
         if (params.contains("b")) b = vector_from_json(params.at("b"));
         std::optional<double> delta;
         if (doc.contains("delta")) delta = number_or(doc, "delta", 0.0);
         Operator base = catalog::affine(a, b, id, delta);
         const double l = number_or(doc, "L", 0.0);
         if (l == 0.0) return base;
         return Operator(id, base.domain(), [base](const Vector& x) -> Vector { return base(x); },
                         base.delta(), l, base.fixed_point());
      }
      throw LoadError("unknown operator kind '" + kind + "'");
   } catch (const LoadError&) {
      throw;
   } catch (const std::exception& e) {
      throw LoadError(std::string("invalid operator definition: ") + e.what());
   }
}

Schedule schedule_from_json(const Json& doc)
{
   try {
      const std::string kind = require(doc, "kind").get<std::string>();
      const Json params = doc.value("params", Json::object());
      auto rename = [&doc](Schedule s, const std::string& fallback_id) {
         const std::string id = doc.value("id", fallback_id);
         return Schedule(id, [s](Index n) { return s(n, 0); }, [s](Index n) { return s(n, 1); },
                         [s](Index n) { return s(n, 2); });
      };
      Schedule s = [&] {
         if (kind == "example1") return schedules::example1();
         if (kind == "harmonic") return schedules::harmonic();
         if (kind == "zero") return schedules::zero();
         if (kind == "constant") return schedules::constant(number_or(require(doc, "params"), "c", 0.0));
         throw LoadError("unknown schedule kind '" + kind + "'");
      }();
      if (!doc.contains("id")) return s;
      return rename(s, s.id());
   } catch (const LoadError&) {
      throw;
   } catch (const std::exception& e) {
      throw LoadError(std::string("invalid schedule definition: ") + e.what());
   }
}

Json to_json(const RateVerdict& v)
{
   Json doc;
   if (std::isinf(v.l_estimate)) doc["l_estimate"] = "inf";
   else doc["l_estimate"] = v.l_estimate;
   doc["classification"] = std::string(to_string(v.classification));
   Json tail = Json::array();
   for (double r : v.ratio_tail) {
      if (std::isinf(r)) tail.push_back("inf");
      else tail.push_back(r);
   }
   doc["ratio_tail"] = tail;
   return doc;
}

Json to_json(const DependenceReport& r)
{
   return Json{{"epsilon", r.epsilon},
               {"delta", r.delta},
               {"u_star", vector_to_json(r.u_star)},
               {"u_tilde", vector_to_json(r.u_tilde)},
               {"distance", r.distance},
               {"bound", r.bound},
               {"pass", r.pass},
               {"hypothesis_ok", r.hypothesis_ok},
               {"iterations", r.iterations}};
}

Json to_json(const ConditionReport& r)
{
   return Json{{"max_violation", r.max_violation},
               {"worst_pair", Json::array({vector_to_json(r.worst_pair.first),
                                           vector_to_json(r.worst_pair.second)})},
               {"pass", r.pass},
               {"grid_per_dim", r.grid_per_dim}};
}

namespace {

Json to_json(const HypothesisAudit& h)
{
   Json doc{{"pass", h.pass}};
   doc["first_violation_index"] =
      h.first_violation_index ? Json(*h.first_violation_index) : Json(nullptr);
   return doc;
}

} // namespace

Json to_json(const ScheduleAudit& a)
{
   Json t3 = to_json(a.theorem3);
   t3["decay_evidence"] = a.theorem3.decay_ok;
   return Json{{"schedule_id", a.schedule_id},
               {"n", a.n},
               {"delta", a.delta},
               {"partial_sum", a.theorem1.partial_sum},
               {"threshold", a.threshold},
               {"theorem1_evidence", a.theorem1.evidence},
               {"theorem3", t3},
               {"theorem3_pass", a.theorem3.pass},
               {"theorem4", to_json(a.theorem4)},
               {"theorem4_pass", a.theorem4.pass}};
}

std::string dump_json(const Json& doc)
{
   std::ostringstream out;
   dump(out, doc);
   return out.str();
}

} // namespace fixpoint
