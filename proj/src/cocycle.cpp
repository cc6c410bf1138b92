#include "cocyclelab/cocycle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cocyclelab/error.hpp"

namespace cocyclelab {

namespace {

double condition_of(const Mat& m) {
  if (m.rows() == 0) return 1.0;
  const double big = spectral_norm(m);
  const double small = smallest_singular_value(m);
  return small > 0.0 ? big / small : std::numeric_limits<double>::infinity();
}

bool overflowed(const Mat& m) { return !m.allFinite() || m.cwiseAbs().maxCoeff() > 1e300; }

}  // namespace

Cocycle::Cocycle(std::size_t dimension, Generator generator, bool invertible, std::string descriptor)
    : dimension_(dimension),
      generator_(std::move(generator)),
      invertible_(invertible),
      descriptor_(std::move(descriptor)) {
  require(dimension_ >= 1, "cocycle dimension must be positive");
  require(static_cast<bool>(generator_), "cocycle needs a generator");
}

Mat Cocycle::generator(const BasePoint& w) const {
  Mat a = generator_(w);
  if (a.rows() != static_cast<Eigen::Index>(dimension_) || a.cols() != static_cast<Eigen::Index>(dimension_))
    fail(ErrorCode::Internal, descriptor_ + ": generator returned a matrix of the wrong shape");
  return a;
}

StepSource forward_steps(CocyclePtr c, BaseSystem base, BasePoint w) {
  return [c = std::move(c), base = std::move(base), w = std::move(w)]() mutable {
    Mat a = c->generator(w);
    w = base.step(w, 1);
    return a;
  };
}

StepSource grouped_steps(StepSource source, std::size_t k) {
  require(k >= 1, "grouped_steps needs k >= 1");
  return [source = std::move(source), k]() mutable {
    Mat m = source();
    for (std::size_t i = 1; i < k; ++i) m = source() * m;
    return m;
  };
}

MatrixProduct evolve(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t n) {
  require(n >= 0, "evolve needs n >= 0");
  const auto d = static_cast<Eigen::Index>(c.dimension());
  Mat value = Mat::Identity(d, d);
  BasePoint x = w;
  bool overflow = false;
  for (std::int64_t k = 0; k < n; ++k) {
    value = c.generator(x) * value;
    x = base.step(x, 1);
    if (!overflow && overflowed(value)) overflow = true;
  }
  const double cond = overflow ? std::numeric_limits<double>::infinity() : condition_of(value);
  return {std::move(value), w, n, cond, overflow};
}

MatrixProduct evolve_back(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t n) {
  require(n >= 0, "evolve_back needs n >= 0");
  if (!c.invertible()) fail(ErrorCode::SingularGenerator, c.descriptor() + " is not flagged invertible");
  const auto d = static_cast<Eigen::Index>(c.dimension());
  Mat value = Mat::Identity(d, d);
  // (A(sigma^{-1} w) ... A(sigma^{-n} w))^{-1} = A(sigma^{-n} w)^{-1} ... A(sigma^{-1} w)^{-1}
  BasePoint x = w;
  bool overflow = false;
  for (std::int64_t k = 1; k <= n; ++k) {
    x = base.step(x, -1);
    const Mat a = c.generator(x);
    const double smin = smallest_singular_value(a);
    if (!(smin > 1e-12 * std::max(1.0, spectral_norm(a))))
      fail(ErrorCode::SingularGenerator, "generator numerically singular at " + x.describe());
    value = a.partialPivLu().inverse() * value;
    if (!overflow && overflowed(value)) overflow = true;
  }
  const double cond = overflow ? std::numeric_limits<double>::infinity() : condition_of(value);
  return {std::move(value), w, -n, cond, overflow};
}

ScaledProduct evolve_scaled(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t n,
                            std::int64_t period) {
  require(n >= 0 && period >= 1, "evolve_scaled needs n >= 0 and period >= 1");
  const auto d = static_cast<Eigen::Index>(c.dimension());
  ScaledProduct p{Mat::Identity(d, d), 0.0};
  BasePoint x = w;
  for (std::int64_t k = 0; k < n; ++k) {
    p.direction = c.generator(x) * p.direction;
    x = base.step(x, 1);
    if ((k + 1) % period == 0 || k + 1 == n) {
      const double s = p.direction.cwiseAbs().maxCoeff();
      if (s > 0.0 && std::isfinite(s)) {
        p.direction /= s;
        p.log_scale += std::log(s);
      }
    }
  }
  return p;
}

OrbitFunction OrbitFunction::zeros(const BasePoint& anchor, std::int64_t first, std::int64_t last, std::size_t d) {
  require(last >= first, "orbit window must be non-empty");
  OrbitFunction f{anchor, first, {}, {}};
  f.values.assign(static_cast<std::size_t>(last - first + 1), Vec::Zero(static_cast<Eigen::Index>(d)));
  return f;
}

OrbitFunction OrbitFunction::tabulate(const BasePoint& anchor, std::int64_t first, std::int64_t last,
                                      const std::function<Vec(std::int64_t)>& generator) {
  require(last >= first, "orbit window must be non-empty");
  OrbitFunction f{anchor, first, {}, {}};
  f.values.reserve(static_cast<std::size_t>(last - first + 1));
  for (std::int64_t k = first; k <= last; ++k) f.values.push_back(generator(k));
  return f;
}

OrbitFunction mather_apply(const Cocycle& c, const BaseSystem& base, const OrbitFunction& f) {
  if (f.size() < 2) fail(ErrorCode::WindowUnderflow, "Mather operator needs a window of at least two points");
  OrbitFunction out{f.anchor, f.first + 1, {}, {}};
  out.values.reserve(f.size() - 1);
  BasePoint x = base.step(f.anchor, f.first);
  for (std::int64_t k = f.first + 1; k <= f.last(); ++k) {
    out.values.push_back(c.generator(x) * f.at(k - 1));
    x = base.step(x, 1);
  }
  return out;
}

Builtin parse_builtin(std::string_view name) {
  if (name == "diagonal") return Builtin::Diagonal;
  if (name == "shear") return Builtin::Shear;
  if (name == "random_sl2") return Builtin::RandomSl2;
  if (name == "nonuniform_rotation") return Builtin::NonuniformRotation;
  if (name == "block_mixed") return Builtin::BlockMixed;
  fail(ErrorCode::UnknownName, "unknown cocycle '" + std::string(name) + "'");
}

std::string_view builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Diagonal: return "diagonal";
    case Builtin::Shear: return "shear";
    case Builtin::RandomSl2: return "random_sl2";
    case Builtin::NonuniformRotation: return "nonuniform_rotation";
    case Builtin::BlockMixed: return "block_mixed";
  }
  return "?";
}

CocyclePtr constant_cocycle(Mat a, std::string descriptor) {
  require(a.rows() == a.cols() && a.rows() > 0, "constant cocycle needs a square matrix");
  const bool invertible = smallest_singular_value(a) > 1e-12 * spectral_norm(a);
  const auto d = static_cast<std::size_t>(a.rows());
  return std::make_shared<const Cocycle>(d, [a = std::move(a)](const BasePoint&) { return a; }, invertible,
                                         std::move(descriptor));
}

CocyclePtr symbol_table(const BaseSystem& base, std::vector<Mat> matrices, std::string descriptor) {
  require(!matrices.empty(), "symbol table needs at least one matrix");
  if (base.kind() == BaseSystem::Kind::Rotation)
    fail(ErrorCode::IncompatibleBase, "symbol table cocycles need a Bernoulli or periodic base");
  const std::size_t needed = base.kind() == BaseSystem::Kind::Bernoulli ? base.alphabet_size() : base.period();
  if (matrices.size() != needed)
    fail(ErrorCode::IncompatibleBase, "symbol table has " + std::to_string(matrices.size()) + " matrices, base has " +
                                          std::to_string(needed) + " symbols");
  const auto d = matrices.front().rows();
  bool invertible = true;
  for (const auto& m : matrices) {
    require(m.rows() == d && m.cols() == d && d > 0, "symbol table matrices must be square and of equal size");
    if (!(smallest_singular_value(m) > 1e-12 * spectral_norm(m))) invertible = false;
  }
  auto gen = [base, matrices = std::move(matrices)](const BasePoint& w) -> Mat {
    if (!w.bernoulli() && !w.periodic())
      fail(ErrorCode::IncompatibleBase, "symbol table evaluated at " + w.describe());
    return matrices.at(base.symbol(w, 0));
  };
  return std::make_shared<const Cocycle>(static_cast<std::size_t>(d), std::move(gen), invertible,
                                         std::move(descriptor));
}

namespace {

std::string format_params(std::string_view name, std::span<const double> params) {
  std::ostringstream os;
  os.precision(17);
  os << name << "(";
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  os << ")";
  return os.str();
}

void expect_params(std::string_view name, std::span<const double> params, std::size_t n) {
  if (params.size() != n)
    fail(ErrorCode::InvalidArgument, std::string(name) + " takes " + std::to_string(n) + " parameters, got " +
                                         std::to_string(params.size()));
}

}  // namespace

CocyclePtr builtin(Builtin name, std::span<const double> params, const BaseSystem* base) {
  const std::string descriptor = format_params(builtin_name(name), params);
  switch (name) {
    case Builtin::Diagonal: {
      require(!params.empty(), "diagonal needs at least one entry");
      Vec diag(static_cast<Eigen::Index>(params.size()));
      for (std::size_t i = 0; i < params.size(); ++i) diag(static_cast<Eigen::Index>(i)) = params[i];
      return constant_cocycle(diag.asDiagonal().toDenseMatrix(), descriptor);
    }
    case Builtin::Shear: {
      expect_params("shear", params, 0);
      Mat a(2, 2);
      a << 1.0, 1.0, 0.0, 1.0;
      return constant_cocycle(std::move(a), descriptor);
    }
    case Builtin::RandomSl2: {
      if (base == nullptr || base->kind() != BaseSystem::Kind::Bernoulli)
        fail(ErrorCode::IncompatibleBase, "random_sl2 needs a Bernoulli base");
      std::vector<double> flat(params.begin(), params.end());
      if (flat.empty()) flat = {2, 1, 1, 1, 1, 1, 1, 2};
      require(flat.size() % 4 == 0, "random_sl2 parameters are 2x2 matrices flattened row-major");
      std::vector<Mat> mats;
      for (std::size_t i = 0; i < flat.size(); i += 4) {
        Mat m(2, 2);
        m << flat[i], flat[i + 1], flat[i + 2], flat[i + 3];
        if (std::abs(m.determinant() - 1.0) > 1e-9)
          fail(ErrorCode::InvalidArgument, "random_sl2 matrix " + std::to_string(i / 4) + " is not in SL(2,R)");
        mats.push_back(std::move(m));
      }
      return symbol_table(*base, std::move(mats), descriptor);
    }
    case Builtin::NonuniformRotation: {
      expect_params("nonuniform_rotation", params, 2);
      if (base != nullptr && base->kind() != BaseSystem::Kind::Rotation)
        fail(ErrorCode::IncompatibleBase, "nonuniform_rotation needs the rotation base");
      const double lambda = params[0];
      const double eps = params[1];
      auto gen = [lambda, eps](const BasePoint& w) -> Mat {
        const auto* r = w.rotation();
        if (r == nullptr) fail(ErrorCode::IncompatibleBase, "nonuniform_rotation evaluated at " + w.describe());
        const double wobble = eps * std::cos(2.0 * std::numbers::pi * r->angle());
        Mat a = Mat::Zero(2, 2);
        a(0, 0) = std::exp(lambda + wobble);
        a(1, 1) = std::exp(-lambda + wobble);
        return a;
      };
      return std::make_shared<const Cocycle>(2, std::move(gen), true, descriptor);
    }
    case Builtin::BlockMixed: {
      expect_params("block_mixed", params, 2);
      const double rate = params[0];
      const double angle = params[1];
      Mat a = Mat::Zero(4, 4);
      a(0, 0) = std::exp(rate);
      a(1, 1) = std::cos(angle);
      a(1, 2) = -std::sin(angle);
      a(2, 1) = std::sin(angle);
      a(2, 2) = std::cos(angle);
      a(3, 3) = std::exp(-rate);
      return constant_cocycle(std::move(a), descriptor);
    }
  }
  fail(ErrorCode::UnknownName, "unknown cocycle");
}

CocyclePtr builtin(std::string_view name, std::span<const double> params, const BaseSystem* base) {
  return builtin(parse_builtin(name), params, base);
}

}  // namespace cocyclelab
