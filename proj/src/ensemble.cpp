#include "entspec/ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>

namespace entspec::ent {

using entspec::detail::require;

BipartiteSplit Ensemble::split() const {
  require(!members.empty(), "invariant", "ensemble has no members");
  const BipartiteSplit s = members.front().split_or_throw();
  for (const PureState& m : members) {
    require(m.split_or_throw() == s, "dimension",
            "ensemble members carry inconsistent splits");
  }
  return s;
}

ComplexMatrix Ensemble::mixture_matrix() const {
  require(probabilities.size() == members.size(), "invariant",
          "ensemble probability/member count mismatch");
  require(!members.empty(), "invariant", "ensemble has no members");
  const int d = members.front().dim();
  ComplexMatrix mix = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const ComplexVector& v = members[i].amplitudes();
    mix += probabilities[i] * (v * v.adjoint());
  }
  return mix;
}

DensityMatrix Ensemble::mixture() const {
  return DensityMatrix(mixture_matrix(), split());
}

void Ensemble::validate() const {
  require(probabilities.size() == members.size(), "invariant",
          "ensemble probability/member count mismatch");
  double total = 0.0;
  for (double p : probabilities) {
    require(p >= -1e-12, "invariant", "ensemble probability below zero");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-9, "invariant",
          "ensemble probabilities do not sum to 1");
  (void)mixture();  // throws if the mixture violates state invariants
}

ComplexMatrix CqExtension::ra_marginal() const {
  const BipartiteSplit s = ensemble.split();
  const int k = ensemble.size();
  const int da = s.dim_a;
  ComplexMatrix out = ComplexMatrix::Zero(k * da, k * da);
  for (int i = 0; i < k; ++i) {
    const ComplexVector& v = ensemble.members[static_cast<std::size_t>(i)].amplitudes();
    const ComplexMatrix proj = v * v.adjoint();
    out.block(i * da, i * da, da, da) =
        ensemble.probabilities[static_cast<std::size_t>(i)] *
        partial_trace_raw(proj, s, Subsystem::A);
  }
  return out;
}

ComplexMatrix CqExtension::r_marginal() const {
  const int k = ensemble.size();
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    out(i, i) = ensemble.probabilities[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<std::pair<double, ComplexMatrix>> CqExtension::a_blocks() const {
  const BipartiteSplit s = ensemble.split();
  std::vector<std::pair<double, ComplexMatrix>> blocks;
  blocks.reserve(static_cast<std::size_t>(ensemble.size()));
  for (int i = 0; i < ensemble.size(); ++i) {
    const ComplexVector& v = ensemble.members[static_cast<std::size_t>(i)].amplitudes();
    blocks.emplace_back(ensemble.probabilities[static_cast<std::size_t>(i)],
                        partial_trace_raw(v * v.adjoint(), s, Subsystem::A));
  }
  return blocks;
}

void CqExtension::validate() const { ensemble.validate(); }

namespace {

// Columns sqrt(mu_k) |e_k| over the support of rho.
ComplexMatrix support_factor(const DensityMatrix& rho, int* rank_out) {
  EigResult eig = hermitian_eig(rho.matrix());
  const double cutoff = kRankRelTol * std::max(eig.values(0), 0.0);
  int r = 0;
  while (r < eig.values.size() && eig.values(r) > cutoff) ++r;
  r = std::max(r, 1);
  ComplexMatrix c(rho.dim(), r);
  for (int k = 0; k < r; ++k) {
    c.col(k) = eig.vectors.col(k) * std::sqrt(std::max(eig.values(k), 0.0));
  }
  if (rank_out) *rank_out = r;
  return c;
}

}  // namespace

Ensemble ensemble_from_isometry(const DensityMatrix& rho,
                                const ComplexMatrix& unitary, int member_count) {
  int rank = 0;
  const ComplexMatrix c = support_factor(rho, &rank);
  require(member_count >= rank, "args",
          "member_count below the rank of the state");
  require(unitary.rows() == member_count && unitary.cols() == member_count,
          "dimension", "reference unitary has the wrong size");
  require((unitary.adjoint() * unitary - ComplexMatrix::Identity(member_count, member_count))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-9,
          "invariant", "reference operator is not unitary");
  Ensemble out;
  const auto split = rho.split();
  for (int i = 0; i < member_count; ++i) {
    ComplexVector v = ComplexVector::Zero(rho.dim());
    for (int k = 0; k < rank; ++k) v += unitary(i, k) * c.col(k);
    const double p = v.squaredNorm();
    if (p < 1e-14) continue;
    out.probabilities.push_back(p);
    out.members.emplace_back(v / std::sqrt(p), split);
  }
  return out;
}

ComplexMatrix reference_unitary_of_ensemble(const DensityMatrix& rho,
                                            const Ensemble& ensemble,
                                            int member_count) {
  int rank = 0;
  const ComplexMatrix c = support_factor(rho, &rank);
  require(member_count >= ensemble.size() && member_count >= rank, "args",
          "member_count too small for the ensemble");
  // Rows u_i with u_i(k) = <e_k| sqrt(p_i) phi_i> / sqrt(mu_k); the K x r
  // block has orthonormal columns, completed to a unitary by QR.
  ComplexMatrix u = ComplexMatrix::Zero(member_count, member_count);
  for (int i = 0; i < ensemble.size(); ++i) {
    const ComplexVector scaled =
        std::sqrt(ensemble.probabilities[static_cast<std::size_t>(i)]) *
        ensemble.members[static_cast<std::size_t>(i)].amplitudes();
    for (int k = 0; k < rank; ++k) {
      const double mu = c.col(k).squaredNorm();
      u(i, k) = (c.col(k).adjoint() * scaled)(0, 0) / mu;
    }
  }
  // Complete the remaining columns.
  Eigen::HouseholderQR<ComplexMatrix> qr(u.leftCols(rank));
  ComplexMatrix q = qr.householderQ();
  for (int k = rank; k < member_count; ++k) u.col(k) = q.col(k);
  require((u.adjoint() * u - ComplexMatrix::Identity(member_count, member_count))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-8,
          "invariant", "ensemble does not induce a reference unitary");
  return u;
}

Ensemble eigendecomposition_ensemble(const DensityMatrix& rho) {
  int rank = 0;
  const ComplexMatrix c = support_factor(rho, &rank);
  Ensemble out;
  for (int k = 0; k < rank; ++k) {
    const double p = c.col(k).squaredNorm();
    if (p < 1e-14) continue;
    out.probabilities.push_back(p);
    out.members.emplace_back(c.col(k) / std::sqrt(p), rho.split());
  }
  // Absorb truncation drift so the probabilities sum to 1 exactly.
  double total = 0.0;
  for (double p : out.probabilities) total += p;
  for (double& p : out.probabilities) p /= total;
  return out;
}

}  // namespace entspec::ent
