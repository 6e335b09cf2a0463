#include "textmag/magnitude.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "textmag/error.hpp"
#include "textmag/format.hpp"
#include "textmag/homology.hpp"
#include "textmag/kernels.hpp"

namespace textmag {

namespace {

void require_positive(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "scale t must be a positive real");
}

inline double power(double p, double t) { return p == 0.0 ? 0.0 : (p == 1.0 ? 1.0 : std::pow(p, t)); }

std::vector<ObjectId> all_objects(const TextCategory& cat) {
  std::vector<ObjectId> ids(cat.size());
  for (ObjectId i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

}  // namespace

std::string_view to_string(MagnitudeMethod m) {
  switch (m) {
    case MagnitudeMethod::entropy: return "entropy";
    case MagnitudeMethod::mobius: return "mobius";
    case MagnitudeMethod::dense: return "dense";
    case MagnitudeMethod::euler: return "euler";
  }
  return "?";
}

MagnitudeMethod parse_method(std::string_view name) {
  if (name == "entropy") return MagnitudeMethod::entropy;
  if (name == "mobius") return MagnitudeMethod::mobius;
  if (name == "dense") return MagnitudeMethod::dense;
  if (name == "euler") return MagnitudeMethod::euler;
  throw Error(ErrorCode::ParseError, "unknown magnitude method '" + std::string(name) + "'");
}

SquareIndexedMatrix zeta_matrix(const TextCategory& cat, double t) {
  require_positive(t);
  return {all_objects(cat), kernels::zeta_omp(cat, t)};
}

SquareIndexedMatrix mobius_closed_form(const TextCategory& cat, double t) {
  require_positive(t);
  const std::size_t n = cat.size();
  DenseMatrix m = DenseMatrix::identity(n);
  for (ObjectId x = 0; x < n; ++x) {
    if (!cat.is_interior(x)) continue;
    for (std::size_t s = 0; s < cat.branching(); ++s) {
      const ObjectId y = cat.child(x, s);
      m(x, y) = -power(cat.pi(x, y), t);
    }
  }
  return {all_objects(cat), std::move(m)};
}

SquareIndexedMatrix mobius_dense_inverse(const TextCategory& cat, double t, const Limits& limits) {
  require_positive(t);
  if (cat.size() > limits.max_dense)
    throw Error(ErrorCode::TooLargeForDense, std::to_string(cat.size()) + " objects exceed the dense cap of " +
                                                 std::to_string(limits.max_dense));
  return {all_objects(cat), kernels::invert_omp(kernels::zeta_omp(cat, t))};
}

double mobius_path_sum(const TextCategory& cat, double t, ObjectId x, ObjectId y) {
  if (x == y) return 1.0;
  const auto sat = cat.chain(x, y);
  if (sat.empty()) return 0.0;
  const std::size_t inner = sat.size() - 2;
  if (inner > 30) throw Error(ErrorCode::TooLarge, "chain too long for path enumeration");
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
    // Chain x = y_0 < (chosen interior points) < y_k = y.
    double w = 1.0;
    ObjectId prev = x;
    for (std::size_t b = 0; b < inner; ++b)
      if (mask >> b & 1) {
        w *= power(cat.pi(prev, sat[b + 1]), t);
        prev = sat[b + 1];
      }
    w *= power(cat.pi(prev, y), t);
    const std::size_t k = static_cast<std::size_t>(std::popcount(mask)) + 1;
    total += (k % 2 == 0) ? w : -w;
  }
  return total;
}

double mobius_path_sum(const TextCategory& cat, double t, const Text& x, const Text& y) {
  return mobius_path_sum(cat, t, cat.id(x), cat.id(y));
}

double mobius_path_sum_binomial(const TextCategory& cat, double t, ObjectId x, ObjectId y) {
  if (x == y) return 1.0;
  if (!cat.precedes(x, y)) return 0.0;
  const std::size_t m = cat.node(y).length - cat.node(x).length;
  // sum_{k=1}^{m} (-1)^k C(m-1, k-1), accumulated exactly in integers.
  std::int64_t signed_count = 0;
  std::int64_t binom = 1;  // C(m-1, k-1)
  for (std::size_t k = 1; k <= m; ++k) {
    signed_count += (k % 2 == 0) ? binom : -binom;
    binom = binom * static_cast<std::int64_t>(m - k) / static_cast<std::int64_t>(k);
  }
  return static_cast<double>(signed_count) * power(cat.pi(x, y), t);
}

namespace {

double magnitude_entropy(const TextCategory& cat, std::span<const ObjectId> objects, std::size_t terminating,
                         double t, const Tolerances& tol) {
  if (std::abs(t - 1.0) <= tol.unit_t) return static_cast<double>(terminating);
  double entropy_sum = 0.0;
  for (ObjectId x : objects)
    if (cat.is_interior(x)) entropy_sum += tsallis_entropy(cat.distribution(x), t);
  return (t - 1.0) * entropy_sum + static_cast<double>(terminating);
}

double magnitude_mobius(const TextCategory& cat, double t) {
  // Diagonal ones plus the one-token-extension entries of the inverse.
  double total = static_cast<double>(cat.size());
  for (ObjectId x = 0; x < cat.size(); ++x) {
    if (!cat.is_interior(x)) continue;
    for (std::size_t s = 0; s < cat.branching(); ++s) total -= power(cat.pi(x, cat.child(x, s)), t);
  }
  return total;
}

}  // namespace

double magnitude(const TextCategory& cat, double t, MagnitudeMethod method, const HomologyTable* table,
                 const Tolerances& tol, const Limits& limits) {
  require_positive(t);
  switch (method) {
    case MagnitudeMethod::entropy: {
      const auto ids = all_objects(cat);
      return magnitude_entropy(cat, ids, cat.terminating_count(), t, tol);
    }
    case MagnitudeMethod::mobius: return magnitude_mobius(cat, t);
    case MagnitudeMethod::dense: return kernels::sum_omp(mobius_dense_inverse(cat, t, limits).entries);
    case MagnitudeMethod::euler:
      if (!table) throw Error(ErrorCode::MissingTable, "the euler method needs a homology table");
      return euler_magnitude(t, *table);
  }
  return 0.0;
}

MagnitudeCurve magnitude_curve(const TextCategory& cat, std::span<const double> t_grid, MagnitudeMethod method,
                               const HomologyTable* table) {
  if (t_grid.empty()) throw Error(ErrorCode::EmptyGrid, "empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    require_positive(t_grid[i]);
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "t grid must be strictly increasing");
  }
  if (method == MagnitudeMethod::euler && !table)
    throw Error(ErrorCode::MissingTable, "the euler method needs a homology table");
  if (method == MagnitudeMethod::dense && cat.size() > kDefaultLimits.max_dense)
    throw Error(ErrorCode::TooLargeForDense, "category too large for dense inversion");

  std::vector<double> values;
  if (method == MagnitudeMethod::dense) {
    // The dense path is already parallel inside; keep the outer loop serial.
    values = kernels::map_serial(t_grid, [&](double t) { return magnitude(cat, t, method, table); });
  } else {
    values = kernels::map_omp(t_grid, [&](double t) { return magnitude(cat, t, method, table); });
  }
  MagnitudeCurve curve;
  for (std::size_t i = 0; i < t_grid.size(); ++i) curve.points.push_back({t_grid[i], values[i], method});
  return curve;
}

void write_curve_csv(std::ostream& out, std::span<const MagnitudeCurve> curves) {
  out << "t,f_entropy,f_mobius,f_dense,f_euler\n";
  if (curves.empty()) return;
  const std::size_t rows = curves.front().points.size();
  constexpr MagnitudeMethod order[] = {MagnitudeMethod::entropy, MagnitudeMethod::mobius, MagnitudeMethod::dense,
                                       MagnitudeMethod::euler};
  for (std::size_t r = 0; r < rows; ++r) {
    out << format_real(curves.front().points[r].t);
    for (auto m : order) {
      out << ',';
      for (const auto& c : curves)
        if (!c.points.empty() && c.points.front().method == m) out << format_real(c.points.at(r).value);
    }
    out << '\n';
  }
}

double tsallis_entropy(std::span<const double> p, double t) {
  if (t == 1.0) return shannon_entropy(p);
  // 1 - sum p^t = -sum p (p^{t-1} - 1), which keeps precision near t = 1.
  double acc = 0.0;
  for (double pi : p)
    if (pi > 0.0) acc -= pi * std::expm1((t - 1.0) * std::log(pi));
  return acc / (t - 1.0);
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double pi : p)
    if (pi > 0.0) h -= pi * std::log(pi);
  return h;
}

double magnitude_derivative_at_1(const TextCategory& cat) {
  double total = 0.0;
  for (ObjectId x = 0; x < cat.size(); ++x)
    if (cat.is_interior(x)) total += shannon_entropy(cat.distribution(x));
  return total;
}

double partition_function(const TextCategory& cat, ObjectId x, double t) {
  if (cat.node(x).finished) throw Error(ErrorCode::FinishedText, "finished texts have no next-token distribution");
  if (!cat.is_interior(x)) throw Error(ErrorCode::OverCutoff, "texts at the cutoff have no next-token distribution");
  double z = 0.0;
  for (double p : cat.distribution(x)) z += power(p, t);
  return z;
}

double total_partition_function(const TextCategory& cat, double t) {
  double z = 0.0;
  for (ObjectId x = 0; x < cat.size(); ++x)
    if (cat.is_interior(x)) z += partition_function(cat, x, t);
  return z;
}

double gibbs_expected_energy(const TextCategory& cat, double t) {
  require_positive(t);
  double weighted = 0.0;
  double z = 0.0;
  for (ObjectId x = 0; x < cat.size(); ++x) {
    if (!cat.is_interior(x)) continue;
    for (double p : cat.distribution(x)) {
      if (p <= 0.0) continue;  // infinite energy, zero Gibbs weight
      const double w = power(p, t);
      weighted += -std::log(p) * w;
      z += w;
    }
  }
  if (z == 0.0) throw Error(ErrorCode::EmptySystem, "no interior objects");
  return weighted / z;
}

std::int64_t poset_mobius(const TextCategory& cat, ObjectId x, ObjectId y) {
  if (x == y) return 1;
  if (!cat.precedes(x, y)) return 0;
  // The interval [x, y] of the prefix order is the saturated chain.
  const auto interval = cat.chain(x, y);
  std::vector<std::int64_t> mu(interval.size(), 0);
  mu[0] = 1;
  for (std::size_t j = 1; j < interval.size(); ++j) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < j; ++i) s += mu[i];
    mu[j] = -s;
  }
  return mu.back();
}

std::int64_t poset_mobius(const TextCategory& cat, const Text& x, const Text& y) {
  return poset_mobius(cat, cat.id(x), cat.id(y));
}

std::int64_t poset_mobius_hall(const TextCategory& cat, ObjectId x, ObjectId y) {
  if (x == y) return 1;
  const auto sat = cat.chain(x, y);
  if (sat.empty()) return 0;
  const std::size_t inner = sat.size() - 2;
  if (inner > 30) throw Error(ErrorCode::TooLarge, "chain too long for path enumeration");
  std::int64_t total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
    const std::size_t k = static_cast<std::size_t>(std::popcount(mask)) + 1;
    total += (k % 2 == 0) ? 1 : -1;
  }
  return total;
}

std::int64_t poset_magnitude(const TextCategory& cat) {
  std::int64_t total = 0;
  for (ObjectId y = 0; y < cat.size(); ++y) {
    total += poset_mobius(cat, y, y);
    for (ObjectId x = y; x != 0;) {
      x = cat.node(x).parent;
      total += poset_mobius(cat, x, y);
    }
  }
  return total;
}

std::uint64_t count_objects(std::uint64_t alphabet_size, Cutoff cutoff) {
  if (cutoff.value == 1) return 1;
  // #A^{N-1} + 2 (#A^{N-2} + ... + #A) + 2
  std::uint64_t total = 2;
  std::uint64_t power_of_a = 1;
  for (std::size_t i = 1; i + 1 < cutoff.value; ++i) {
    power_of_a *= alphabet_size;
    total += 2 * power_of_a;
  }
  return total + power_of_a * alphabet_size;
}

double subspace_magnitude(const TextCategory& cat, ObjectId x, double t, const Tolerances& tol) {
  require_positive(t);
  const auto objects = cat.descendants(x);
  std::size_t terminating = 0;
  for (ObjectId y : objects)
    if (cat.node(y).terminating) ++terminating;
  return magnitude_entropy(cat, objects, terminating, t, tol);
}

double subspace_magnitude(const TextCategory& cat, const Text& x, double t, const Tolerances& tol) {
  return subspace_magnitude(cat, cat.id(x), t, tol);
}

}  // namespace textmag
