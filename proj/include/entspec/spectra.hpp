// spectra.hpp — spectral projections, the two workhorse trace inequalities,
// and finite-n estimators of spectral divergence / conditional entropy rates.
#pragma once

#include "entspec/ensemble.hpp"
#include "entspec/qcore.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace entspec::spectra {

// Projector onto the nonnegative eigenspace. Eigenvalues above
// -1e-12*||A|| count as nonnegative, so {0 >= 0} = I.
struct SpectralProjector {
  ComplexMatrix matrix;
  int source_dimension = 0;
  int rank = 0;
};

SpectralProjector positive_part_projector(const ComplexMatrix& a);
// {A >= B} := {A - B >= 0}.
SpectralProjector spectral_compare(const ComplexMatrix& a, const ComplexMatrix& b);

// Tr[{A>=B}(A-B)] - Tr[P(A-B)]; nonnegative for any 0 <= P <= I.
double lemma1_gap(const ComplexMatrix& a, const ComplexMatrix& b,
                  const ComplexMatrix& p);

struct Lemma2Result {
  double value;  // Tr[{rho >= e^{n gamma} omega} omega]
  double bound;  // e^{-n gamma}
};
Lemma2Result lemma2_check(const DensityMatrix& rho, const ComplexMatrix& omega,
                          int n, double gamma);

// Tr[{Pi(gamma) >= 0} Pi(gamma)] with Pi(gamma) = rho - e^{n gamma} omega.
// rho is the n-copy-level operator itself; n only enters through the
// threshold scaling.
double pi_trace(const ComplexMatrix& rho, const ComplexMatrix& omega, int n,
                double gamma);

// Conditional-axis pi trace of a cq extension, evaluated blockwise without
// assembling the R (x) A operator. gamma is on the conditional-entropy axis:
// the threshold is e^{-n gamma} and the assembled equivalent is
// pi_trace(rho_RA, rho_R (x) I_A, n, -gamma).
double cq_conditional_pi_trace(const ent::CqExtension& cq, double gamma, int n);

// Same quantity for the n-fold i.i.d. power of a base-level cq extension,
// evaluated through type classes.
double cq_conditional_pi_trace_iid(const ent::CqExtension& base, double gamma,
                                   int n);

enum class SweepMode { Divergence, ConditionalEntropy };

const char* to_string(SweepMode mode);

// f_n(gamma) tables over a gamma grid (nats per copy). In divergence mode f
// is non-increasing in gamma; in conditional mode the grid is already on the
// conditional-entropy axis (gamma_S = -gamma_D), so f is non-decreasing.
struct GammaSweep {
  SweepMode mode = SweepMode::Divergence;
  std::vector<double> gamma_grid;
  std::vector<int> n_values;
  std::vector<std::vector<double>> f_values;  // [n index][gamma index]
};

struct RateEstimate {
  int n = 0;
  double gamma_low = 0.0;
  double gamma_high = 0.0;
  double midpoint = 0.0;
  double epsilon = 0.0;
  bool low_open = false;
  bool high_open = false;
  bool midpoint_open = false;
};

std::vector<double> default_gamma_grid();  // [-2, 2] nats, step 0.01

// i.i.d. divergence sweep of (rho^{(x)n}, omega^{(x)n}). Commuting pairs go
// through the type-class path; non-commuting pairs assemble Kronecker powers
// under the 4096 ambient-dimension cap.
GammaSweep gamma_sweep_iid(const DensityMatrix& rho, const ComplexMatrix& omega,
                           const std::vector<int>& n_values,
                           const std::vector<double>& gamma_grid);

// Explicit sequence: one (rho^{(n)}, omega^{(n)}) pair per requested n.
GammaSweep gamma_sweep_explicit(
    const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& sequence,
    const std::vector<int>& n_values, const std::vector<double>& gamma_grid);

// Conditional-entropy sweep of the i.i.d. powers of a base cq extension,
// against rho_R^n (x) I_A^n. Always evaluated on the classical (type-class)
// path; the blocks are diagonal in their own eigenbases.
GammaSweep gamma_sweep_cq_iid(const ent::CqExtension& base,
                              const std::vector<int>& n_values,
                              const std::vector<double>& gamma_grid);

// Conditional-entropy sweep of a single explicit cq extension at level n.
GammaSweep gamma_sweep_cq_explicit(const ent::CqExtension& cq, int n,
                                   const std::vector<double>& gamma_grid);

std::vector<RateEstimate> rate_estimate(const GammaSweep& sweep, double epsilon);

// Spectrum of rho^{(x)n} for a diagonal base spectrum: distinct eigenvalue
// products with multinomial multiplicities (values merged at relative
// tolerance 1e-12; products accumulated in log space).
struct TypeClassSpectrum {
  std::vector<double> values;      // distinct, non-increasing
  std::vector<double> log_values;  // matching logs (value may underflow)
  std::vector<std::uint64_t> multiplicities;

  double total_mass() const;
  double total_count() const;
  // Sum of the `count` largest eigenvalues (whole classes plus a partial
  // boundary class).
  double top_mass(double count) const;
};

TypeClassSpectrum iid_spectrum(const RealVector& eigenvalues, int n);
TypeClassSpectrum combine_spectra(const TypeClassSpectrum& a,
                                  const TypeClassSpectrum& b);

// Co-diagonalization test at entrywise tolerance `tol`; on success returns
// the paired eigenvalues in a common eigenbasis.
std::optional<std::vector<std::pair<double, double>>> try_codiagonalize(
    const ComplexMatrix& rho, const ComplexMatrix& omega, double tol = 1e-10);

namespace detail {

// Joint type classes of an i.i.d. pair of commuting spectra, reduced to
// prefix sums over the sorted log-likelihood ratio so each f_n(gamma)
// evaluation is a binary search.
class PairSweepTable {
 public:
  // symbols: (p weight, q weight, base multiplicity) per common eigenbasis
  // index; pairs deduplicated internally.
  PairSweepTable(std::vector<std::pair<double, double>> symbols, int n);

  // f(t) = sum_{classes : p >= t q} (p_mass - t * q_mass), t = e^{threshold_log}.
  double evaluate(double threshold_log) const;

 private:
  std::vector<double> ratio_;     // sorted non-increasing log(p/q), finite part
  std::vector<double> p_prefix_;  // cumulative p mass along ratio_
  std::vector<double> q_prefix_;  // cumulative q mass along ratio_
  double p_q_zero_mass_ = 0.0;    // classes with q = 0 (always kept)
};

}  // namespace detail

}  // namespace entspec::spectra
