// eof.hpp — entanglement of formation: exact two-qubit closed forms (test
// oracles), the general decomposition minimizer, regularized estimates, and
// the finite-n entanglement-cost proxy.
#pragma once

#include "entspec/ensemble.hpp"
#include "entspec/spectra.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace entspec::ent {

// Mean entanglement entropy sum_i p_i S(tr_B |phi_i><phi_i|), in nats.
double eof_objective(const Ensemble& ensemble);

// S(rho_RA) - S(rho_R) of the assembled cq extension. Equals
// eof_objective(cq.ensemble) by the block-diagonal identity; computed via
// the entropy route so the identity stays a genuine cross-check.
double conditional_entropy_cq(const CqExtension& cq);

// Wootters closed forms for two qubits. Oracles only; the minimizer below
// never consults them.
double concurrence_two_qubit(const DensityMatrix& rho);
double eof_two_qubit(const DensityMatrix& rho);  // nats

struct EntanglementReport {
  double value_nats = 0.0;
  Ensemble witness;
  int restarts_used = 0;
  bool converged = false;
};

struct MinimizeOptions {
  int member_count = 0;  // 0: default rank^2
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_sweeps = 500;
  double tol = 1e-9;
  // Additional deterministic starting points (reference unitaries).
  std::vector<ComplexMatrix> extra_starts;
};

EntanglementReport eof_minimize(const DensityMatrix& rho,
                                const MinimizeOptions& options);
EntanglementReport eof_minimize(const DensityMatrix& rho, int member_count,
                                int restarts, std::uint64_t seed);

// E_F(rho^{(x)n})/n for n = 1..n_max; the n-copy search is warm-started from
// the product of the best (n-1)- and 1-copy witnesses, so the per-copy values
// cannot exceed the n=1 value (subadditivity direction).
std::vector<std::pair<int, double>> eof_regularized_estimate(
    const DensityMatrix& rho, int n_max, const MinimizeOptions& options);

// Finite-n entanglement-cost proxy: minimize, over
// cq-extensions searched through the same reference-unitary space as
// eof_minimize, the conditional-entropy-axis midpoint of the spectral sweep.
struct CostProxyOptions {
  int member_count = 0;
  int restarts = 8;
  std::uint64_t seed = 0;
  int max_sweeps = 200;
  double tol = 1e-9;
  double epsilon = 0.05;
  std::vector<double> gamma_grid;  // empty: default grid
};

// `rho` is the explicit n-th state of the sequence.
EntanglementReport cost_proxy_minimize_explicit(const DensityMatrix& rho, int n,
                                                const CostProxyOptions& options);
// i.i.d. sequence rho_base^{(x)n}; the search runs over base-level
// cq-extensions powered i.i.d. and is evaluated on the type-class path.
EntanglementReport cost_proxy_minimize_iid(const DensityMatrix& rho_base, int n,
                                           const CostProxyOptions& options);

namespace detail {

// Alternating Givens sweeps with golden-section line search over reference
// unitaries, random restarts from Haar starts. The objective sees the matrix
// of unnormalized member vectors (columns; column norms squared are the
// probabilities). Deterministic for a fixed seed regardless of schedule.
// Starts run concurrently; the factory hands each one its own objective
// instance so stateful objectives (caches) stay thread-confined.
struct UnitarySearchResult {
  double value = 0.0;
  ComplexMatrix members;  // d x K unnormalized member vectors
  bool converged = false;
  int restarts_used = 0;
};

using ObjectiveFactory =
    std::function<std::function<double(const ComplexMatrix&)>()>;

UnitarySearchResult minimize_over_decompositions(
    const DensityMatrix& rho, int member_count,
    const ObjectiveFactory& objective_factory, int restarts, std::uint64_t seed,
    int max_sweeps, double tol, const std::vector<ComplexMatrix>& extra_starts);

Ensemble ensemble_from_member_matrix(const ComplexMatrix& members,
                                     const BipartiteSplit& split);

}  // namespace detail

}  // namespace entspec::ent
