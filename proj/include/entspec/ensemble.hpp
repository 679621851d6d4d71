// ensemble.hpp — pure-state ensembles and their classical-quantum extensions.
#pragma once

#include "entspec/qcore.hpp"

#include <utility>
#include <vector>

namespace entspec::ent {

// {p_i, |phi_i>} with a common bipartite split. Probabilities are
// nonnegative and sum to 1; the mixture is a valid DensityMatrix.
struct Ensemble {
  std::vector<double> probabilities;
  std::vector<PureState> members;

  int size() const { return static_cast<int>(probabilities.size()); }
  BipartiteSplit split() const;
  DensityMatrix mixture() const;
  ComplexMatrix mixture_matrix() const;
  void validate() const;
};

// Attaches an orthonormal flag basis R to the ensemble members:
//   rho_RAB = sum_i p_i |i><i|_R (x) |phi_i><phi_i|_AB.
struct CqExtension {
  Ensemble ensemble;

  int flag_dimension() const { return ensemble.size(); }
  // Assembled rho_RA = sum_i p_i |i><i| (x) tr_B |phi_i><phi_i|.
  ComplexMatrix ra_marginal() const;
  ComplexMatrix r_marginal() const;  // diag(p)
  // Blockwise view: (p_i, rho_A^i).
  std::vector<std::pair<double, ComplexMatrix>> a_blocks() const;
  void validate() const;
};

// HJW correspondence: every size-K ensemble of rho arises from a K-dim
// reference unitary acting on the canonical purification. Members with
// probability below 1e-14 are dropped.
Ensemble ensemble_from_isometry(const DensityMatrix& rho,
                                const ComplexMatrix& unitary, int member_count);

// Inverse direction: a reference unitary (member_count x member_count) whose
// HJW ensemble reproduces the given one; used to seed warm starts.
ComplexMatrix reference_unitary_of_ensemble(const DensityMatrix& rho,
                                            const Ensemble& ensemble,
                                            int member_count);

Ensemble eigendecomposition_ensemble(const DensityMatrix& rho);

}  // namespace entspec::ent
