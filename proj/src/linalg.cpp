#include "cocyclelab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "cocyclelab/error.hpp"

namespace cocyclelab {

namespace {

// Singular values of a 2x2 matrix [[a, b], [c, d]].
std::pair<double, double> singular_values_2x2(double a, double b, double c, double d) {
  const double s1 = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
  const double big = std::sqrt(0.5 * (s1 + disc));
  const double small = big > 0.0 ? std::abs(det) / big : 0.0;
  return {big, small};
}

}  // namespace

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  if (m.rows() == 2 && m.cols() == 2) return singular_values_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1)).first;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double smallest_singular_value(const Mat& m) {
  require(m.rows() == m.cols(), "smallest_singular_value expects a square matrix");
  if (m.rows() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2) return singular_values_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1)).second;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

ThinQr thin_qr(const Mat& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index k = a.cols();
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(n, k);
  Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

Mat orthonormal_basis(const Mat& columns, double tol) {
  if (columns.cols() == 0) return Mat(columns.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(columns, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

Mat orthogonal_complement(const Mat& orthonormal_columns) {
  const Eigen::Index d = orthonormal_columns.rows();
  const Eigen::Index k = orthonormal_columns.cols();
  if (k == 0) return Mat::Identity(d, d);
  if (k == d) return Mat(d, 0);
  Eigen::HouseholderQR<Mat> qr(orthonormal_columns);
  Mat full = qr.householderQ() * Mat::Identity(d, d);
  return full.rightCols(d - k);
}

Vec principal_cosines(const Mat& u, const Mat& v) {
  if (u.cols() == 0 || v.cols() == 0) return Vec(0);
  Eigen::JacobiSVD<Mat> svd(u.transpose() * v);
  Vec s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(1.0, s(i));
  return s;
}

double subspace_distance(const Mat& u, const Mat& v) {
  require(u.cols() == v.cols(), "subspace_distance expects equal dimensions");
  if (u.cols() == 0) return 0.0;
  // ||(I - P_v) u|| is the sine of the largest principal angle.
  const Mat residual = u - v * (v.transpose() * u);
  return std::min(1.0, spectral_norm(residual));
}

Mat oblique_projection(const Mat& range, const Mat& kernel) {
  const Eigen::Index d = range.rows();
  require(range.cols() + kernel.cols() == d, "oblique_projection: bases must span R^d");
  if (range.cols() == 0) return Mat::Zero(d, d);
  if (kernel.cols() == 0) return Mat::Identity(d, d);
  Mat frame(d, d);
  frame << range, kernel;
  Mat selector = Mat::Zero(d, d);
  selector.topLeftCorner(range.cols(), range.cols()).setIdentity();
  // P = S diag(I, 0) S^{-1}
  Mat inv = frame.partialPivLu().inverse();
  return frame * selector * inv;
}

}  // namespace cocyclelab
