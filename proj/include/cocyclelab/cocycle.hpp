#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cocyclelab/base_dynamics.hpp"
#include "cocyclelab/linalg.hpp"

namespace cocyclelab {

/// Linear cocycle over a base system, given by its generator A(w).
class Cocycle {
 public:
  using Generator = std::function<Mat(const BasePoint&)>;

  Cocycle(std::size_t dimension, Generator generator, bool invertible, std::string descriptor);

  std::size_t dimension() const noexcept { return dimension_; }
  bool invertible() const noexcept { return invertible_; }
  const std::string& descriptor() const noexcept { return descriptor_; }

  Mat generator(const BasePoint& w) const;

 private:
  std::size_t dimension_;
  Generator generator_;
  bool invertible_;
  std::string descriptor_;
};

using CocyclePtr = std::shared_ptr<const Cocycle>;

/// Produces successive generator matrices along a forward orbit. Both the
/// ordinary cocycle and induced (return-map) cocycles are consumed this way.
using StepSource = std::function<Mat()>;

/// Generators A(w), A(sigma w), A(sigma^2 w), ...
StepSource forward_steps(CocyclePtr c, BaseSystem base, BasePoint w);

/// Groups `k` consecutive steps of `source` into one (the k-step cocycle).
StepSource grouped_steps(StepSource source, std::size_t k);

struct MatrixProduct {
  Mat value;
  BasePoint start;
  std::int64_t length = 0;
  double condition = 1.0;  ///< sigma_max / sigma_min of value (inf if singular)
  bool overflow = false;   ///< some entry exceeded 1e300; use log-scaled paths
};

/// A(sigma^{n-1} w) ... A(w).
MatrixProduct evolve(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t n);

/// (A(sigma^{-n} w, n))^{-1}; needs an invertible generator.
MatrixProduct evolve_back(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t n);

/// Product stored as exp(log_scale) * direction, renormalized every `period`
/// steps so that long products never overflow.
struct ScaledProduct {
  Mat direction;
  double log_scale = 0.0;
};
ScaledProduct evolve_scaled(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t n,
                            std::int64_t period = 10);

/// Vector-valued function sampled on the orbit window {sigma^k w : first <= k <= last}.
struct OrbitFunction {
  BasePoint anchor;
  std::int64_t first = 0;
  std::vector<Vec> values;
  std::vector<double> weights;  ///< optional weight samples C(sigma^k w), same indexing

  std::int64_t last() const noexcept { return first + static_cast<std::int64_t>(values.size()) - 1; }
  bool contains(std::int64_t k) const noexcept { return k >= first && k <= last(); }
  const Vec& at(std::int64_t k) const { return values.at(static_cast<std::size_t>(k - first)); }
  Vec& at(std::int64_t k) { return values.at(static_cast<std::size_t>(k - first)); }
  std::size_t size() const noexcept { return values.size(); }

  static OrbitFunction zeros(const BasePoint& anchor, std::int64_t first, std::int64_t last, std::size_t d);
  /// g(sigma^k w) = generator(k)
  static OrbitFunction tabulate(const BasePoint& anchor, std::int64_t first, std::int64_t last,
                                const std::function<Vec(std::int64_t)>& generator);
};

/// Mather operator: (Af)(sigma^k w) = A(sigma^{k-1} w) f(sigma^{k-1} w). The
/// output window loses its leftmost point.
OrbitFunction mather_apply(const Cocycle& c, const BaseSystem& base, const OrbitFunction& f);

enum class Builtin { Diagonal, Shear, RandomSl2, NonuniformRotation, BlockMixed };

Builtin parse_builtin(std::string_view name);
std::string_view builtin_name(Builtin b);

/// Example cocycles.
///  - Diagonal: constant diag(params...); d = params.size().
///  - Shear: constant [[1,1],[0,1]].
///  - RandomSl2: A(w) = M[symbol_0(w)] over a Bernoulli base (required);
///    params are the matrices flattened row-major, 4 per matrix (defaults
///    [[2,1],[1,1]], [[1,1],[1,2]]).
///  - NonuniformRotation(lambda, eps): over the rotation,
///    diag(e^{lambda + eps cos 2 pi theta}, e^{-lambda + eps cos 2 pi theta}).
///  - BlockMixed(rate, angle): blockdiag(e^{rate}, R(angle), e^{-rate}), with
///    R a planar rotation (isometric zero-exponent block); d = 4.
CocyclePtr builtin(Builtin name, std::span<const double> params = {}, const BaseSystem* base = nullptr);
CocyclePtr builtin(std::string_view name, std::span<const double> params = {}, const BaseSystem* base = nullptr);

/// A(w) = matrices[symbol_0(w)] on Bernoulli bases or matrices[state] on
/// periodic bases.
CocyclePtr symbol_table(const BaseSystem& base, std::vector<Mat> matrices, std::string descriptor = "symbol_table");

/// Constant generator.
CocyclePtr constant_cocycle(Mat a, std::string descriptor = "constant");

}  // namespace cocyclelab
