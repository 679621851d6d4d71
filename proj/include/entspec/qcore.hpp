// qcore.hpp — dense complex linear algebra and quantum-state primitives.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace entspec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Hard cap on ambient dimensions; nothing in this toolkit is meant to run
// beyond desk scale.
inline constexpr int kDimensionCap = 4096;

// Tolerances shared across the toolkit.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kRankRelTol = 1e-12;

// Error with a machine-readable code ("args", "dimension", "invariant",
// "parse", "cap"). The CLI maps these onto its JSON diagnostic records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct BipartiteSplit {
  int dim_a = 1;
  int dim_b = 1;

  int dim() const { return dim_a * dim_b; }
  friend bool operator==(const BipartiteSplit&, const BipartiteSplit&) = default;
};

// Hermitian, PSD, unit-trace matrix with an optional bipartite split.
// Validates on construction; subnormalized operators are handled as raw
// ComplexMatrix values, never as DensityMatrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m,
                         std::optional<BipartiteSplit> split = std::nullopt);

  const ComplexMatrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const std::optional<BipartiteSplit>& split() const { return split_; }
  BipartiteSplit split_or_throw() const;

 private:
  ComplexMatrix matrix_;
  std::optional<BipartiteSplit> split_;
};

class PureState {
 public:
  explicit PureState(ComplexVector amplitudes,
                     std::optional<BipartiteSplit> split = std::nullopt);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const std::optional<BipartiteSplit>& split() const { return split_; }
  BipartiteSplit split_or_throw() const;
  DensityMatrix to_density() const;

 private:
  ComplexVector amplitudes_;
  std::optional<BipartiteSplit> split_;
};

// Schmidt data of a bipartite pure state. `coefficients` has
// min(dim_a, dim_b) entries in non-increasing order and sums to 1.
// basis_a / basis_b are full orthonormal bases of the local spaces whose
// first min(dim_a, dim_b) columns are the Schmidt vectors, in coefficient
// order; the remaining columns complete the bases (used by the dilution
// protocol, which needs a basis for the whole local space).
struct SchmidtForm {
  RealVector coefficients;
  ComplexMatrix basis_a;
  ComplexMatrix basis_b;

  int rank(double rel_tol = kRankRelTol) const;
  // Sum of the M largest coefficients.
  double kept_weight(int m) const;
};

struct EigResult {
  RealVector values;      // non-increasing
  ComplexMatrix vectors;  // orthonormal columns, matching order
};

enum class Subsystem { A, B };

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);
ComplexMatrix kronecker_power(const ComplexMatrix& a, int n);

// Partial trace on a raw matrix (caller provides the split); used for
// subnormalized blocks inside protocols.
ComplexMatrix partial_trace_raw(const ComplexMatrix& m, const BipartiteSplit& split,
                                Subsystem keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const BipartiteSplit& split,
                            Subsystem keep);
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

EigResult hermitian_eig(const ComplexMatrix& a);

SchmidtForm schmidt_decompose(const PureState& psi, const BipartiteSplit& split);
SchmidtForm schmidt_decompose(const PureState& psi);

PureState maximally_entangled(int m, const BipartiteSplit& split);

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
// Variant used by the dilution bounds: sigma may be subnormalized.
double fidelity_subnormalized(const ComplexMatrix& rho, const ComplexMatrix& sigma);

double von_neumann_entropy(const DensityMatrix& rho);
double entropy_of_spectrum(const RealVector& probs);

// +infinity when support(rho) is not contained in support(omega).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& omega);

// Canonical purification; reference dimension equals rank(rho); split of the
// result is (dim, rank).
PureState purify(const DensityMatrix& rho);

// rho^{(n)} on (H_A (x) H_B)^{(n)}, legs regrouped to (A^n, B^n) ordering.
ComplexMatrix tensor_power_regrouped(const ComplexMatrix& rho,
                                     const BipartiteSplit& base, int n);

namespace detail {
void require(bool cond, const char* code, const std::string& message);
double hermiticity_defect(const ComplexMatrix& m);
}  // namespace detail

}  // namespace entspec
