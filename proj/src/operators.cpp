#include "fixpoint/operators.hpp"

#include <bit>
#include <cstdio>

namespace fixpoint {

std::string_view to_string(Norm norm)
{
   return norm == Norm::max ? "max" : "euclidean";
}

Norm parse_norm(std::string_view name)
{
   if (name == "euclidean") return Norm::euclidean;
   if (name == "max") return Norm::max;
   throw std::invalid_argument("unknown norm '" + std::string(name) + "'");
}

std::string format_real(double value)
{
   if (std::isnan(value)) return "nan";
   if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", value);
   return buf;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper))
{
   if (lower_.size() != upper_.size() || lower_.size() == 0)
      throw DimensionError("domain bounds must be nonempty and of equal length");
   if ((lower_.array() > upper_.array()).any())
      throw std::invalid_argument("domain lower bound exceeds upper bound");
}

Domain Domain::unit_box(Eigen::Index dim)
{
   return Domain(Vector::Zero(dim), Vector::Ones(dim));
}

bool Domain::contains(const Vector& x) const
{
   return x.size() == dim() && (x.array() >= lower_.array()).all() &&
          (x.array() <= upper_.array()).all();
}

Vector Domain::clamp(const Vector& x) const
{
   return x.cwiseMax(lower_).cwiseMin(upper_);
}

std::vector<Vector> Domain::grid(int per_dim) const
{
   if (per_dim < 2) throw std::invalid_argument("grid needs at least 2 points per dimension");
   const auto d = dim();
   std::size_t total = 1;
   for (Eigen::Index i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_dim);

   std::vector<Vector> points;
   points.reserve(total);
   std::vector<int> idx(static_cast<std::size_t>(d), 0);
   for (std::size_t p = 0; p < total; ++p) {
      Vector x(d);
      for (Eigen::Index i = 0; i < d; ++i) {
         const double t = static_cast<double>(idx[i]) / (per_dim - 1);
         // Endpoints are hit exactly so extreme pairs are part of the sweep.
         x[i] = idx[i] == per_dim - 1 ? upper_[i] : lower_[i] + t * (upper_[i] - lower_[i]);
      }
      points.push_back(std::move(x));
      for (Eigen::Index i = d - 1; i >= 0; --i) {
         if (++idx[i] < per_dim) break;
         idx[i] = 0;
      }
   }
   return points;
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::string id, Domain domain, MapFn map, double delta, double lipschitz_l,
                   std::optional<Vector> fixed_point)
   : id_(std::move(id)), domain_(std::move(domain)),
     map_(std::make_shared<const MapFn>(std::move(map))), delta_(delta),
     lipschitz_l_(lipschitz_l), fixed_point_(std::move(fixed_point))
{
   if (!(delta_ > 0.0 && delta_ < 1.0))
      throw std::invalid_argument("operator '" + id_ + "': delta must lie in (0,1)");
   if (!(lipschitz_l_ >= 0.0))
      throw std::invalid_argument("operator '" + id_ + "': L must be nonnegative");
   if (fixed_point_) {
      if (!domain_.contains(*fixed_point_))
         throw std::invalid_argument("operator '" + id_ + "': fixed point outside domain");
      const double residual = distance((*map_)(*fixed_point_), *fixed_point_);
      if (residual > 1e-12)
         throw std::invalid_argument("operator '" + id_ + "': declared fixed point has residual " +
                                     format_real(residual));
   }
}

Vector Operator::operator()(const Vector& x) const
{
   if (!domain_.contains(x))
      throw DomainError("operator '" + id_ + "': argument outside domain");
   Vector y = (*map_)(x);
   if (!domain_.contains(y))
      throw DomainError("operator '" + id_ + "': image left the domain");
   return y;
}

// ---------------------------------------------------------------------------
// Weak-contraction certificate

ConditionReport verify_weak_contraction(const Operator& op, int grid_per_dim, Norm kind)
{
   if (op.domain().dim() > 3)
      throw DimensionError("verify_weak_contraction supports dim <= 3");
   const auto points = op.domain().grid(grid_per_dim);
   std::vector<Vector> images;
   std::vector<double> residuals;
   images.reserve(points.size());
   residuals.reserve(points.size());
   for (const auto& p : points) {
      images.push_back(op(p));
      residuals.push_back(distance(p, images.back(), kind));
   }

   ConditionReport report;
   report.grid_per_dim = grid_per_dim;
   report.max_violation = -std::numeric_limits<double>::infinity();
   report.worst_pair = {points.front(), points.front()};
   const double delta = op.delta();
   const double l = op.lipschitz_l();
   for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < points.size(); ++j) {
         const double lhs = distance(images[i], images[j], kind);
         const double rhs = delta * distance(points[i], points[j], kind) + l * residuals[j];
         const double violation = lhs - rhs;
         if (violation > report.max_violation) {
            report.max_violation = violation;
            report.worst_pair = {points[i], points[j]};
         }
      }
   }
   report.pass = report.max_violation <= weak_contraction_tolerance;
   return report;
}

// ---------------------------------------------------------------------------
// Perturbation

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
   z += 0x9e3779b97f4a7c15ULL;
   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
   z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
   return z ^ (z >> 31);
}

// Uniform in [-1, 1], a pure function of (seed, x, component).
double hashed_unit(std::uint64_t seed, const Vector& x, Eigen::Index component)
{
   std::uint64_t h = splitmix64(seed ^ static_cast<std::uint64_t>(component));
   for (Eigen::Index i = 0; i < x.size(); ++i)
      h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x[i]));
   const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
   return 2.0 * u - 1.0;
}

std::string mode_suffix(PerturbMode mode)
{
   switch (mode) {
   case PerturbMode::constant_offset: return "constant";
   case PerturbMode::uniform_random: return "uniform";
   case PerturbMode::zero_offset: return "zero";
   }
   return "?";
}

} // namespace

PerturbedOperator perturb(const Operator& op, double epsilon, PerturbMode mode, std::uint64_t seed,
                          Norm kind)
{
   if (!(epsilon > 0.0)) throw std::invalid_argument("perturb: epsilon must be positive");
   const Domain domain = op.domain();
   const double per_component =
      kind == Norm::max ? epsilon : epsilon / std::sqrt(static_cast<double>(domain.dim()));

   MapFn map = [op, domain, per_component, mode, seed](const Vector& x) -> Vector {
      Vector target = op(x);
      switch (mode) {
      case PerturbMode::constant_offset:
         target.array() += per_component;
         break;
      case PerturbMode::uniform_random:
         for (Eigen::Index i = 0; i < target.size(); ++i)
            target[i] += per_component * hashed_unit(seed, x, i);
         break;
      case PerturbMode::zero_offset:
         break;
      }
      // T(x) lies in D, so projecting onto the box cannot move further from it.
      return domain.clamp(target);
   };

   Operator approx(op.id() + "~" + mode_suffix(mode), domain, std::move(map), op.delta(),
                   op.lipschitz_l());
   return PerturbedOperator{op, epsilon, mode, std::move(approx)};
}

// ---------------------------------------------------------------------------
// Catalog

namespace catalog {

namespace {

// An affine map sends a box into a box iff every corner lands inside.
void require_affine_self_map(const std::string& id, const Domain& domain, const MapFn& map)
{
   const auto corners = domain.grid(2);
   for (const auto& c : corners) {
      if (!domain.contains(map(c)))
         throw std::invalid_argument("operator '" + id + "' does not map its domain into itself");
   }
}

} // namespace

Operator halving(Domain domain)
{
   MapFn map = [](const Vector& x) -> Vector { return 0.5 * x; };
   require_affine_self_map("halving", domain, map);
   Vector fixed = Vector::Zero(domain.dim());
   return Operator("halving", std::move(domain), std::move(map), 0.5, 0.0, std::move(fixed));
}

Operator affine1d(double slope, double c)
{
   return affine1d(slope, c, slope, Domain::unit_box(1));
}

Operator affine1d(double slope, double c, double declared_delta, Domain domain)
{
   if (domain.dim() != 1) throw DimensionError("affine1d requires a 1-D domain");
   if (!(slope >= 0.0 && slope < 1.0)) throw std::invalid_argument("affine1d: slope must be in [0,1)");
   MapFn map = [slope, c](const Vector& x) -> Vector {
      return (slope * x.array() + (1.0 - slope) * c).matrix();
   };
   require_affine_self_map("affine1d", domain, map);
   Vector fixed(1);
   fixed << c;
   return Operator("affine1d", std::move(domain), std::move(map), declared_delta, 0.0, fixed);
}

Operator affine(const Matrix& a, const Vector& b, std::string id, std::optional<double> declared_delta)
{
   if (a.rows() != a.cols() || a.rows() != b.size())
      throw DimensionError("affine: A must be square and match b");
   const auto n = a.rows();
   Domain domain = Domain::unit_box(n);
   MapFn map = [a, b](const Vector& x) -> Vector { return a * x + b; };
   require_affine_self_map(id, domain, map);

   const double spectral = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
   const double row_sum = a.cwiseAbs().rowwise().sum().maxCoeff();
   const double delta = declared_delta.value_or(std::max(spectral, row_sum));

   const Matrix shifted = Matrix::Identity(n, n) - a;
   Vector fixed = shifted.fullPivLu().solve(b);
   // Snap tiny excursions produced by the solve back onto the box.
   fixed = domain.clamp(fixed);
   return Operator(std::move(id), std::move(domain), std::move(map), delta, 0.0, fixed);
}

Operator affine2d_default()
{
   Matrix a(2, 2);
   a << 0.3, 0.0, 0.0, 0.6;
   Vector b(2);
   b << 0.7, 0.2;
   return affine(a, b, "affine2d");
}

} // namespace catalog

std::vector<Operator> builtin_catalog(double affine_delta, double affine_c)
{
   return {catalog::halving(), catalog::affine1d(affine_delta, affine_c), catalog::affine2d_default()};
}

} // namespace fixpoint
