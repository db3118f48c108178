#ifndef FIXPOINT_CORE_HPP
#define FIXPOINT_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fixpoint {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = std::uint64_t;

enum class Norm { euclidean, max };

std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view name);

template <typename Derived>
double norm(const Eigen::MatrixBase<Derived>& v, Norm kind = Norm::euclidean)
{
   if (v.size() == 0) return 0.0;
   return kind == Norm::max ? v.template lpNorm<Eigen::Infinity>() : v.norm();
}

template <typename DerivedA, typename DerivedB>
double distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                Norm kind = Norm::euclidean)
{
   return norm(a - b, kind);
}

// Error hierarchy. Each maps onto one failure mode named in the contracts.
struct DomainError : std::domain_error { using std::domain_error::domain_error; };
struct DimensionError : std::invalid_argument { using std::invalid_argument::invalid_argument; };
struct RangeError : std::range_error { using std::range_error::range_error; };
struct DegenerateFactor : std::runtime_error { using std::runtime_error::runtime_error; };
struct InsufficientData : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotConverged : std::runtime_error { using std::runtime_error::runtime_error; };
struct LoadError : std::runtime_error { using std::runtime_error::runtime_error; };

/// A product of many positive factors, tracked both directly and as a log.
/// `value` may underflow to zero; `log_abs` stays finite while x0 != 0.
struct LogProduct
{
   double value = 1.0;
   double log_abs = 0.0;
   bool underflow = false;
};

/// Values below this are treated as underflowed and reported in log domain.
inline constexpr double underflow_threshold = 1e-300;

/// Sequential multiplication of factor(k) for k in [first, last], times scale.
template <typename Factor>
LogProduct accumulate_product(double scale, Index first, Index last, Factor&& factor)
{
   LogProduct p;
   p.value = scale;
   p.log_abs = scale == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(scale));
   for (Index k = first; k <= last; ++k) {
      const double f = factor(k);
      p.value *= f;
      p.log_abs += std::log(std::abs(f));
   }
   p.underflow = scale != 0.0 && std::abs(p.value) < underflow_threshold;
   return p;
}

/// Fixed 17-significant-digit rendering, independent of the global locale.
std::string format_real(double value);

} // namespace fixpoint

#endif // FIXPOINT_CORE_HPP
