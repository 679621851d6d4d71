// dilution.hpp — exact density-matrix simulation of the entanglement
// dilution protocol (basis-align rotation, rank-M scissors teleportation,
// receiver correction), the closed-form fidelity, achievability curves and
// the evaluable weak-converse bound.
#pragma once

#include "entspec/ensemble.hpp"
#include "entspec/spectra.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace entspec::dilution {

// Orthogonal projector onto the span of the Schmidt vectors of the M largest
// coefficients of one member, on the A factor. Rank is exactly M; ties at the
// M-th coefficient follow the deterministic Schmidt ordering.
struct TruncationProjector {
  int member_index = 0;
  ComplexMatrix matrix;
  int rank = 0;
};

TruncationProjector truncation_projector(const SchmidtForm& member,
                                         int member_index, int m);

// Theta on R (x) A': block j maps member j's B-side Schmidt basis to the
// canonical basis in coefficient order.
ComplexMatrix theta_unitary(const ent::Ensemble& ensemble);

// How the teleportation failure weight is represented. Both variants keep
// the truncated component at full weight; they differ in the error state:
//   OrthogonalFlag — measure {Q, I-Q} before an ideal rank-M teleportation;
//     failure goes to a flag state on one appended orthogonal dimension.
//   WeylTeleport — rank-M generalized Bell measurement on the top-M window
//     with shift/phase corrections; failure leaves the receiver maximally
//     mixed on the window.
enum class ScissorsVariant { OrthogonalFlag, WeylTeleport };

const char* to_string(ScissorsVariant variant);
ScissorsVariant variant_from_string(const std::string& name);

// Channel output for a single member (split of the member preserved; the
// OrthogonalFlag variant appends one dimension to the B side).
DensityMatrix scissors_channel(const SchmidtForm& member,
                               const BipartiteSplit& split, int m,
                               ScissorsVariant variant);

struct DilutionReport {
  int m_rank = 0;
  double rate_nats = 0.0;  // ln(M)/n; n = 1 for single-shot simulations
  double fidelity_sim = 0.0;
  double fidelity_formula = 0.0;  // sqrt(sum_i p_i sum_{j<=M} lambda_j^i)
  double lower_bound = 0.0;       // (sum_i p_i q_i)^2
  double upper_bound = 0.0;       // sum_i p_i q_i
  ScissorsVariant variant = ScissorsVariant::OrthogonalFlag;
};

DilutionReport simulate_dilution(const ent::Ensemble& ensemble, int m,
                                 ScissorsVariant variant);

double dilution_fidelity_formula(const ent::Ensemble& ensemble, int m);

struct CurvePoint {
  int n = 0;
  double rate_nats = 0.0;
  double m_rank = 0.0;  // ceil(e^{nR}), clamped to the total rank
  double f2 = 0.0;      // exact cumulative top-M tensor-power Schmidt mass
  double f2_lower = 0.0;
  double f2_upper = 0.0;
};

// F^2(n, R) for the i.i.d. powers of the base ensemble with M_n = ceil(e^{nR}),
// evaluated through type classes (no explicit matrices). For multi-member
// bases the n-copy member index runs over product sequences with product
// weights.
std::vector<CurvePoint> achievability_curve_iid(const ent::Ensemble& base,
                                                const std::vector<double>& rates,
                                                const std::vector<int>& n_values);

// f_n(gamma) + e^{-n(gamma - R)} with f_n the conditional-axis pi trace of
// the given cq extension at level n.
double converse_bound(const ent::CqExtension& cq, double gamma, double rate_nats,
                      int n);
// Same bound for the i.i.d. powers of a base-level cq extension.
double converse_bound_iid(const ent::CqExtension& base, double gamma,
                          double rate_nats, int n);

}  // namespace entspec::dilution
