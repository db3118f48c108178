#ifndef FIXPOINT_IO_HPP
#define FIXPOINT_IO_HPP

#include "fixpoint/analysis.hpp"
#include "fixpoint/operators.hpp"
#include "fixpoint/schedules.hpp"

#include <json.hpp>

namespace fixpoint {

using Json = nlohmann::json;

/// {"id": str, "kind": "halving"|"affine1d"|"affine2d", "params": {...}, "delta": num, "L": num}
///
/// params: halving  {"lower": [..], "upper": [..]}           (default [0,1])
///         affine1d {"c": num, "slope": num}                  (slope defaults to delta)
///         affine2d {"A": [[..],[..]], "b": [..]}             (default diag(0.3,0.6), (0.7,0.2))
/// Throws LoadError on malformed documents or an unknown kind.
Operator operator_from_json(const Json& doc);

/// {"id": str, "kind": "example1"|"constant"|"harmonic"|"zero", "params": {"c": num}}
Schedule schedule_from_json(const Json& doc);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& doc);

Json to_json(const RateVerdict& v);
Json to_json(const DependenceReport& r);
Json to_json(const ConditionReport& r);
Json to_json(const ScheduleAudit& a);

/// Serializes with sorted keys and doubles at 17 significant digits.
std::string dump_json(const Json& doc);

} // namespace fixpoint

#endif // FIXPOINT_IO_HPP
