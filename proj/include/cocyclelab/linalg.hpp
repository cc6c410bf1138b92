#pragma once

#include <Eigen/Dense>

namespace cocyclelab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Largest singular value. Closed form for d <= 2.
double spectral_norm(const Mat& m);

/// Smallest singular value of a square matrix.
double smallest_singular_value(const Mat& m);

/// Thin QR with the sign convention diag(R) >= 0; Q is overwritten by the
/// orthonormal factor and R returned.
struct ThinQr {
  Mat q;
  Mat r;
};
ThinQr thin_qr(const Mat& a);

/// Orthonormal basis of the column span (rank decided at tolerance `tol`
/// relative to the largest singular value).
Mat orthonormal_basis(const Mat& columns, double tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of span(columns).
Mat orthogonal_complement(const Mat& orthonormal_columns);

/// Cosines of the principal angles between two subspaces given by
/// orthonormal bases, in decreasing order.
Vec principal_cosines(const Mat& u, const Mat& v);

/// sin of the largest principal angle between equal-dimension subspaces.
double subspace_distance(const Mat& u, const Mat& v);

/// Oblique projection onto span(range) along span(kernel). Both bases must
/// together span R^d.
Mat oblique_projection(const Mat& range, const Mat& kernel);

}  // namespace cocyclelab
