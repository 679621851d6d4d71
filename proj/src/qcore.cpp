#include "entspec/qcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace entspec {

namespace detail {

void require(bool cond, const char* code, const std::string& message) {
  if (!cond) throw Error(code, message);
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

using detail::require;

namespace {

void check_square(const ComplexMatrix& m, const char* what) {
  require(m.rows() == m.cols(), "dimension",
          std::string(what) + " must be square");
  require(m.rows() >= 1 && m.rows() <= kDimensionCap, "cap",
          std::string(what) + " dimension outside [1, 4096]");
}

void check_hermitian(const ComplexMatrix& m, const char* what) {
  check_square(m, what);
  require(detail::hermiticity_defect(m) <= kHermTol, "invariant",
          std::string(what) + " is not Hermitian within 1e-10");
}

// Non-increasing eigenvalues; Eigen returns ascending.
EigResult eig_sorted(const ComplexMatrix& herm) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (herm + herm.adjoint()) * 0.5);
  require(solver.info() == Eigen::Success, "invariant",
          "eigendecomposition failed to converge");
  const int d = static_cast<int>(herm.rows());
  EigResult out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(d, d);
  for (int i = 0; i < d; ++i) out.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  return out;
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m, std::optional<BipartiteSplit> split)
    : matrix_(std::move(m)), split_(split) {
  check_hermitian(matrix_, "density matrix");
  const double tr = matrix_.trace().real();
  require(std::abs(tr - 1.0) <= kTraceTol, "invariant",
          "density matrix trace deviates from 1 by more than 1e-10");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (matrix_ + matrix_.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  require(solver.eigenvalues().minCoeff() >= -kPsdTol, "invariant",
          "density matrix has an eigenvalue below -1e-10");
  if (split_) {
    require(split_->dim() == dim(), "dimension",
            "bipartite split does not factor the ambient dimension");
  }
}

BipartiteSplit DensityMatrix::split_or_throw() const {
  require(split_.has_value(), "dimension", "state carries no bipartite split");
  return *split_;
}

PureState::PureState(ComplexVector amplitudes, std::optional<BipartiteSplit> split)
    : amplitudes_(std::move(amplitudes)), split_(split) {
  require(amplitudes_.size() >= 1 && amplitudes_.size() <= kDimensionCap, "cap",
          "pure state dimension outside [1, 4096]");
  require(std::abs(amplitudes_.norm() - 1.0) <= kHermTol, "invariant",
          "pure state norm deviates from 1 by more than 1e-10");
  if (split_) {
    require(split_->dim() == dim(), "dimension",
            "bipartite split does not factor the ambient dimension");
  }
}

BipartiteSplit PureState::split_or_throw() const {
  require(split_.has_value(), "dimension", "state carries no bipartite split");
  return *split_;
}

DensityMatrix PureState::to_density() const {
  return DensityMatrix(amplitudes_ * amplitudes_.adjoint(), split_);
}

int SchmidtForm::rank(double rel_tol) const {
  if (coefficients.size() == 0) return 0;
  const double cutoff = rel_tol * coefficients(0);
  int r = 0;
  for (int i = 0; i < coefficients.size(); ++i) {
    if (coefficients(i) > cutoff) ++r;
  }
  return r;
}

double SchmidtForm::kept_weight(int m) const {
  require(m >= 0 && m <= coefficients.size(), "dimension",
          "kept_weight rank out of range");
  return coefficients.head(m).sum();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix kronecker_power(const ComplexMatrix& a, int n) {
  require(n >= 1, "args", "kronecker_power needs n >= 1");
  ComplexMatrix out = a;
  for (int i = 1; i < n; ++i) {
    require(out.rows() * a.rows() <= kDimensionCap, "cap",
            "kronecker power exceeds the 4096 ambient-dimension cap");
    out = tensor_product(out, a);
  }
  return out;
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& m, const BipartiteSplit& split,
                                Subsystem keep) {
  check_square(m, "partial trace input");
  require(split.dim() == m.rows(), "dimension",
          "partial trace split does not match the operator dimension");
  const int da = split.dim_a;
  const int db = split.dim_b;
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (int a = 0; a < da; ++a) {
      for (int a2 = 0; a2 < da; ++a2) {
        Complex sum = 0.0;
        for (int b = 0; b < db; ++b) sum += m(a * db + b, a2 * db + b);
        out(a, a2) = sum;
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int b = 0; b < db; ++b) {
    for (int b2 = 0; b2 < db; ++b2) {
      Complex sum = 0.0;
      for (int a = 0; a < da; ++a) sum += m(a * db + b, a * db + b2);
      out(b, b2) = sum;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const BipartiteSplit& split,
                            Subsystem keep) {
  return DensityMatrix(partial_trace_raw(rho.matrix(), split, keep));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  return partial_trace(rho, rho.split_or_throw(), keep);
}

EigResult hermitian_eig(const ComplexMatrix& a) {
  check_hermitian(a, "hermitian_eig input");
  return eig_sorted(a);
}

SchmidtForm schmidt_decompose(const PureState& psi, const BipartiteSplit& split) {
  require(split.dim() == psi.dim(), "dimension",
          "schmidt split does not match the state dimension");
  const int da = split.dim_a;
  const int db = split.dim_b;
  ComplexMatrix m(da, db);
  for (int a = 0; a < da; ++a) {
    for (int b = 0; b < db; ++b) m(a, b) = psi.amplitudes()(a * db + b);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int r = std::min(da, db);
  SchmidtForm out;
  out.coefficients.resize(r);
  out.basis_a = svd.matrixU();
  // |psi> = sum_k s_k |u_k> (x) conj(|v_k>), so the B-side Schmidt vectors
  // are the conjugated right singular vectors.
  out.basis_b = svd.matrixV().conjugate();
  for (int k = 0; k < r; ++k) {
    const double s = svd.singularValues()(k);
    out.coefficients(k) = s * s;
  }
  // Canonical phases: largest-magnitude entry of each A vector made real
  // positive, with the inverse phase pushed onto the B partner so the
  // reconstruction is untouched. Keeps truncation projectors reproducible.
  for (int k = 0; k < r; ++k) {
    int arg_max = 0;
    double best = -1.0;
    for (int i = 0; i < da; ++i) {
      const double mag = std::abs(out.basis_a(i, k));
      if (mag > best + 1e-15) {
        best = mag;
        arg_max = i;
      }
    }
    const Complex pivot = out.basis_a(arg_max, k);
    if (std::abs(pivot) > 1e-15) {
      const Complex phase = pivot / std::abs(pivot);
      out.basis_a.col(k) *= std::conj(phase);
      out.basis_b.col(k) *= phase;
    }
  }
  const double total = out.coefficients.sum();
  require(std::abs(total - 1.0) <= 1e-9, "invariant",
          "schmidt coefficients do not sum to 1");
  return out;
}

SchmidtForm schmidt_decompose(const PureState& psi) {
  return schmidt_decompose(psi, psi.split_or_throw());
}

PureState maximally_entangled(int m, const BipartiteSplit& split) {
  require(m >= 1 && m <= std::min(split.dim_a, split.dim_b), "dimension",
          "Schmidt rank exceeds a local dimension");
  ComplexVector amp = ComplexVector::Zero(split.dim());
  const double w = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i) amp(i * split.dim_b + i) = w;
  return PureState(std::move(amp), split);
}

double fidelity_subnormalized(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  check_hermitian(rho, "fidelity rho");
  check_hermitian(sigma, "fidelity sigma");
  require(rho.rows() == sigma.rows(), "dimension", "fidelity dimension mismatch");
  // Project onto the support of rho: with rho = V D V^+ (rank r), the
  // nonzero spectrum of sqrt(rho) sigma sqrt(rho) equals that of the r x r
  // matrix D^{1/2} V^+ sigma V D^{1/2}. Working in the support keeps the
  // ambient null space from polluting Tr sqrt(.) with sqrt(noise) terms.
  EigResult eig = eig_sorted(rho);
  const double top = std::max(eig.values(0), 0.0);
  if (top <= 0.0) return 0.0;
  const double cutoff = kRankRelTol * top;
  int r = 0;
  while (r < eig.values.size() && eig.values(r) > cutoff) ++r;
  ComplexMatrix w(rho.rows(), r);
  for (int k = 0; k < r; ++k) {
    w.col(k) = eig.vectors.col(k) * std::sqrt(eig.values(k));
  }
  ComplexMatrix core = w.adjoint() * sigma * w;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((core + core.adjoint()) * 0.5,
                                                      Eigen::EigenvaluesOnly);
  // Negative eigenvalues here are PSD drift from the inputs; clip to zero.
  double f = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    const double v = solver.eigenvalues()(i);
    if (v > 0.0) f += std::sqrt(v);
  }
  return f;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const double f = fidelity_subnormalized(rho.matrix(), sigma.matrix());
  return std::min(f, 1.0);
}

double entropy_of_spectrum(const RealVector& probs) {
  double s = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p > 1e-300) s -= p * std::log(p);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (rho.matrix() + rho.matrix().adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = solver.eigenvalues()(i);
    if (p > 1e-300) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& omega) {
  require(rho.dim() == omega.dim(), "dimension",
          "relative entropy dimension mismatch");
  EigResult er = eig_sorted(rho.matrix());
  EigResult ew = eig_sorted(omega.matrix());
  const double rho_cut = kRankRelTol * std::max(er.values(0), 0.0);
  const double omega_cut = kRankRelTol * std::max(ew.values(0), 0.0);
  double s = 0.0;
  for (int i = 0; i < er.values.size(); ++i) {
    const double p = er.values(i);
    if (p > rho_cut && p > 0.0) s += p * std::log(p);
  }
  for (int j = 0; j < ew.values.size(); ++j) {
    const double q = ew.values(j);
    const double weight =
        (ew.vectors.col(j).adjoint() * rho.matrix() * ew.vectors.col(j))(0, 0)
            .real();
    if (q <= omega_cut) {
      if (weight > 1e-12) return std::numeric_limits<double>::infinity();
      continue;
    }
    s -= weight * std::log(q);
  }
  return std::max(s, 0.0);
}

PureState purify(const DensityMatrix& rho) {
  EigResult eig = eig_sorted(rho.matrix());
  const double cutoff = kRankRelTol * std::max(eig.values(0), 0.0);
  int r = 0;
  while (r < eig.values.size() && eig.values(r) > cutoff) ++r;
  r = std::max(r, 1);
  const int d = rho.dim();
  ComplexVector amp = ComplexVector::Zero(d * r);
  for (int k = 0; k < r; ++k) {
    const double w = std::sqrt(std::max(eig.values(k), 0.0));
    for (int i = 0; i < d; ++i) amp(i * r + k) = w * eig.vectors(i, k);
  }
  amp /= amp.norm();
  return PureState(std::move(amp), BipartiteSplit{d, r});
}

ComplexMatrix tensor_power_regrouped(const ComplexMatrix& rho,
                                     const BipartiteSplit& base, int n) {
  require(base.dim() == rho.rows(), "dimension",
          "tensor_power_regrouped split mismatch");
  ComplexMatrix power = kronecker_power(rho, n);
  const int da = base.dim_a;
  const int db = base.dim_b;
  const Eigen::Index dim = power.rows();
  // new index = (a_1..a_n, b_1..b_n); old index interleaves (a_j, b_j).
  std::vector<Eigen::Index> to_old(dim);
  Eigen::Index dan = 1;
  for (int i = 0; i < n; ++i) dan *= da;
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index a_part = idx / (dim / dan);
    Eigen::Index b_part = idx % (dim / dan);
    Eigen::Index old = 0;
    Eigen::Index a_rem = a_part;
    Eigen::Index b_rem = b_part;
    Eigen::Index a_scale = dan / da;
    Eigen::Index b_scale = (dim / dan) / db;
    for (int j = 0; j < n; ++j) {
      const Eigen::Index aj = a_rem / a_scale;
      const Eigen::Index bj = b_rem / b_scale;
      a_rem %= a_scale;
      b_rem %= b_scale;
      if (j + 1 < n) {
        a_scale /= da;
        b_scale /= db;
      }
      old = old * (da * db) + (aj * db + bj);
    }
    to_old[static_cast<std::size_t>(idx)] = old;
  }
  ComplexMatrix out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out(i, j) = power(to_old[static_cast<std::size_t>(i)],
                        to_old[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace entspec
