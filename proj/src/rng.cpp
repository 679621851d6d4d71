#include "entspec/rng.hpp"

#include <Eigen/QR>

#include <cmath>

namespace entspec {

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on our own uniforms keeps the stream standard-pinned.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(bits() % span);
}

ComplexMatrix random_matrix(Rng& rng, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian_complex();
  }
  return m;
}

ComplexMatrix random_hermitian(Rng& rng, int d) {
  ComplexMatrix g = random_matrix(rng, d, d);
  return (g + g.adjoint()) * 0.5;
}

ComplexMatrix random_psd(Rng& rng, int d) {
  ComplexMatrix g = random_matrix(rng, d, d);
  return g * g.adjoint() / static_cast<double>(d);
}

ComplexMatrix haar_unitary(Rng& rng, int d) {
  ComplexMatrix g = random_matrix(rng, d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= (mag > 1e-300) ? rii / mag : Complex(1.0, 0.0);
  }
  return q;
}

PureState random_pure(Rng& rng, int d, std::optional<BipartiteSplit> split) {
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.gaussian_complex();
  v /= v.norm();
  return PureState(std::move(v), split);
}

DensityMatrix random_density(Rng& rng, int d, std::optional<BipartiteSplit> split) {
  ComplexMatrix g = random_matrix(rng, d, d);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho), split);
}

ComplexMatrix random_contraction(Rng& rng, int d) {
  ComplexMatrix u = haar_unitary(rng, d);
  ComplexMatrix diag = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) diag(i, i) = rng.uniform();
  return u * diag * u.adjoint();
}

RealVector random_probability_vector(Rng& rng, int k) {
  RealVector p(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double g = rng.gaussian();
    p(i) = g * g;
    total += p(i);
  }
  return p / total;
}

}  // namespace entspec
