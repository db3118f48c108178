#ifndef FIXPOINT_OPERATORS_HPP
#define FIXPOINT_OPERATORS_HPP

#include "fixpoint/core.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fixpoint {

/// Closed axis-aligned box [lower, upper] in R^dim.
class Domain
{
public:
   Domain(Vector lower, Vector upper);

   static Domain unit_box(Eigen::Index dim);

   Eigen::Index dim() const { return lower_.size(); }
   const Vector& lower() const { return lower_; }
   const Vector& upper() const { return upper_; }

   /// Componentwise membership with zero tolerance.
   bool contains(const Vector& x) const;
   Vector clamp(const Vector& x) const;

   /// Tensor grid with `per_dim` points along every axis.
   std::vector<Vector> grid(int per_dim) const;

private:
   Vector lower_;
   Vector upper_;
};

using MapFn = std::function<Vector(const Vector&)>;

/// A self-map T of a box D declared to satisfy
///   ||Tx - Ty|| <= delta ||x - y|| + L ||y - Ty||
/// for all x, y in D. Immutable after construction and safe to share.
class Operator
{
public:
   Operator(std::string id, Domain domain, MapFn map, double delta, double lipschitz_l,
            std::optional<Vector> fixed_point = std::nullopt);

   const std::string& id() const { return id_; }
   const Domain& domain() const { return domain_; }
   double delta() const { return delta_; }
   double lipschitz_l() const { return lipschitz_l_; }
   const std::optional<Vector>& fixed_point() const { return fixed_point_; }

   /// Applies T. Throws DomainError if x is outside the box.
   Vector operator()(const Vector& x) const;

private:
   std::string id_;
   Domain domain_;
   std::shared_ptr<const MapFn> map_;
   double delta_;
   double lipschitz_l_;
   std::optional<Vector> fixed_point_;
};

inline Vector evaluate(const Operator& op, const Vector& x) { return op(x); }

struct ConditionReport
{
   double max_violation = 0.0;
   std::pair<Vector, Vector> worst_pair;
   bool pass = true;
   int grid_per_dim = 0;
};

inline constexpr double weak_contraction_tolerance = 1e-12;

/// Exhaustive check of the weak-contraction inequality over all ordered pairs
/// of a tensor grid. Throws DimensionError for dim > 3.
ConditionReport verify_weak_contraction(const Operator& op, int grid_per_dim,
                                        Norm kind = Norm::euclidean);

enum class PerturbMode { constant_offset, uniform_random, zero_offset };

struct PerturbedOperator
{
   Operator base;
   double epsilon;
   PerturbMode mode;
   /// The approximate operator, clamped into base.domain().
   Operator approx;
};

/// Builds an approximate operator with ||Tx - T~x|| <= epsilon in `kind`.
/// Per-component offsets are epsilon for the max norm and epsilon/sqrt(dim)
/// for the Euclidean norm. uniform_random draws each component from
/// [-offset, offset] by hashing (seed, x), so T~ stays a pure function.
PerturbedOperator perturb(const Operator& op, double epsilon, PerturbMode mode,
                          std::uint64_t seed = 0, Norm kind = Norm::euclidean);

namespace catalog {

/// T(x) = x/2 on [lower, upper]; requires lower <= 0 <= upper componentwise.
Operator halving(Domain domain = Domain::unit_box(1));

/// T(x) = slope*x + (1-slope)*c on [0,1]. Fixed point c.
Operator affine1d(double slope, double c);
Operator affine1d(double slope, double c, double declared_delta, Domain domain);

/// T(x) = A x + b on [0,1]^n with fixed point (I-A)^{-1} b. The declared delta
/// defaults to max(||A||_2, ||A||_inf) so the certificate holds in both norms.
Operator affine(const Matrix& a, const Vector& b, std::string id = "affine2d",
                std::optional<double> declared_delta = std::nullopt);

/// A = diag(0.3, 0.6), b = (0.7, 0.2); fixed point (1, 0.5).
Operator affine2d_default();

} // namespace catalog

/// halving, affine1d(affine_delta, affine_c) and the default 2-D affine map.
std::vector<Operator> builtin_catalog(double affine_delta = 0.5, double affine_c = 0.5);

} // namespace fixpoint

#endif // FIXPOINT_OPERATORS_HPP
