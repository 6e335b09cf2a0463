#pragma once

// Zeta matrices, Möbius coefficients and the magnitude function of the
// generalized metric space of texts, d(x,y) = -ln π(y|x).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "textmag/category.hpp"
#include "textmag/matrix.hpp"
#include "textmag/tolerances.hpp"

namespace textmag {

struct HomologyTable;

enum class MagnitudeMethod { entropy, mobius, dense, euler };

std::string_view to_string(MagnitudeMethod m);
MagnitudeMethod parse_method(std::string_view name);

/// ζ_t(x,y) = π(y|x)^t; upper triangular in canonical order.
SquareIndexedMatrix zeta_matrix(const TextCategory& cat, double t);

/// ζ_t^{-1} from the structure of the prefix tree: 1 on the diagonal,
/// -π(y|x)^t when y extends x by one token, 0 elsewhere.
SquareIndexedMatrix mobius_closed_form(const TextCategory& cat, double t);

/// Numerical inverse of zeta_matrix(). Throws TooLargeForDense.
SquareIndexedMatrix mobius_dense_inverse(const TextCategory& cat, double t, const Limits& limits = kDefaultLimits);

/// Alternating sum over strictly increasing chains x = y_0 < ... < y_k = y of
/// prod π(y_i|y_{i-1})^t, enumerated chain by chain.
double mobius_path_sum(const TextCategory& cat, double t, ObjectId x, ObjectId y);
double mobius_path_sum(const TextCategory& cat, double t, const Text& x, const Text& y);
/// The same sum using that every chain has weight π(y|x)^t and there are
/// C(m-1, k-1) chains of length k inside a saturated chain of length m.
double mobius_path_sum_binomial(const TextCategory& cat, double t, ObjectId x, ObjectId y);

/// Mag(tM) of the category. `euler` needs a complete homology table.
double magnitude(const TextCategory& cat, double t, MagnitudeMethod method, const HomologyTable* table = nullptr,
                 const Tolerances& tol = kDefaultTolerances, const Limits& limits = kDefaultLimits);

struct MagnitudePoint {
  double t;
  double value;
  MagnitudeMethod method;
};

struct MagnitudeCurve {
  std::vector<MagnitudePoint> points;
};

/// Pointwise magnitude over a strictly increasing positive grid (evaluated in parallel).
MagnitudeCurve magnitude_curve(const TextCategory& cat, std::span<const double> t_grid, MagnitudeMethod method,
                               const HomologyTable* table = nullptr);

/// `t,f_entropy,f_mobius,f_dense,f_euler`; methods without a curve leave their cell empty.
void write_curve_csv(std::ostream& out, std::span<const MagnitudeCurve> curves);

/// (1 - sum p^t)/(t - 1) with 0^t = 0. At t = 1 this returns the Shannon limit.
double tsallis_entropy(std::span<const double> p, double t);
/// -sum p ln p in nats, 0 ln 0 = 0.
double shannon_entropy(std::span<const double> p);

/// f'(1) = sum over non-terminating objects of H(p_x).
double magnitude_derivative_at_1(const TextCategory& cat);

/// Z_x(t) = sum_a p_x(a)^t.
double partition_function(const TextCategory& cat, ObjectId x, double t);
/// Z~(t) = sum over (interior x, a) of p_x(a)^t; f(t) = #ob - Z~(t).
double total_partition_function(const TextCategory& cat, double t);
/// Mean energy E(x,a) = -ln p_x(a) under the Gibbs state at inverse temperature t.
double gibbs_expected_energy(const TextCategory& cat, double t);

/// Möbius function of the prefix poset by the recursion over the interval [x,y].
std::int64_t poset_mobius(const TextCategory& cat, ObjectId x, ObjectId y);
std::int64_t poset_mobius(const TextCategory& cat, const Text& x, const Text& y);
/// Hall's theorem: sum_k (-1)^k #{chains x = y_0 < ... < y_k = y}, counted by enumeration.
std::int64_t poset_mobius_hall(const TextCategory& cat, ObjectId x, ObjectId y);
/// Sum of all Möbius values, in integers.
std::int64_t poset_magnitude(const TextCategory& cat);

/// #A^{N-1} + 2 #A^{N-2} + ... + 2 #A + 2 (1 for N = 1).
std::uint64_t count_objects(std::uint64_t alphabet_size, Cutoff cutoff);

/// Magnitude of the subspace of texts extending x, from the full category's data.
double subspace_magnitude(const TextCategory& cat, ObjectId x, double t, const Tolerances& tol = kDefaultTolerances);
double subspace_magnitude(const TextCategory& cat, const Text& x, double t,
                          const Tolerances& tol = kDefaultTolerances);

}  // namespace textmag
