#include "entspec/dilution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace entspec::dilution {

using entspec::detail::require;

const char* to_string(ScissorsVariant variant) {
  return variant == ScissorsVariant::OrthogonalFlag ? "orthogonal-flag"
                                                    : "weyl-teleport";
}

ScissorsVariant variant_from_string(const std::string& name) {
  if (name == "orthogonal-flag") return ScissorsVariant::OrthogonalFlag;
  if (name == "weyl-teleport") return ScissorsVariant::WeylTeleport;
  throw Error("args", "unknown scissors variant: " + name);
}

TruncationProjector truncation_projector(const SchmidtForm& member,
                                         int member_index, int m) {
  require(m >= 1 && m <= member.basis_a.cols(), "dimension",
          "truncation rank out of range");
  TruncationProjector out;
  out.member_index = member_index;
  out.rank = m;
  out.matrix = member.basis_a.leftCols(m) * member.basis_a.leftCols(m).adjoint();
  return out;
}

ComplexMatrix theta_unitary(const ent::Ensemble& ensemble) {
  ensemble.validate();
  const BipartiteSplit split = ensemble.split();
  const int k = ensemble.size();
  const int d = split.dim_b;
  ComplexMatrix theta = ComplexMatrix::Zero(k * d, k * d);
  for (int j = 0; j < k; ++j) {
    const SchmidtForm form =
        schmidt_decompose(ensemble.members[static_cast<std::size_t>(j)], split);
    // U_j = sum_l |chi_l><psi_{j,l}| on the B-side basis.
    theta.block(j * d, j * d, d, d) = form.basis_b.adjoint();
  }
  return theta;
}

namespace {

// Per-member truncated component |phi_hat> = sum_{k<M} sqrt(lambda_k) a_k b_k,
// with the B legs living in a dim_b + pad space.
ComplexVector truncated_member(const SchmidtForm& form, const BipartiteSplit& split,
                               int m, int b_dim_out) {
  const int da = split.dim_a;
  ComplexVector out = ComplexVector::Zero(da * b_dim_out);
  const int pairs = std::min<int>(m, static_cast<int>(form.coefficients.size()));
  for (int k = 0; k < pairs; ++k) {
    const double w = std::sqrt(std::max(form.coefficients(k), 0.0));
    if (w <= 0.0) continue;
    for (int a = 0; a < da; ++a) {
      for (int b = 0; b < split.dim_b; ++b) {
        out(a * b_dim_out + b) += w * form.basis_a(a, k) * form.basis_b(b, k);
      }
    }
  }
  return out;
}

// A-side marginal of the cut-off part, sum_{k>=M} lambda_k |a_k><a_k|.
ComplexMatrix failure_a_marginal(const SchmidtForm& form, const BipartiteSplit& split,
                                 int m) {
  ComplexMatrix out = ComplexMatrix::Zero(split.dim_a, split.dim_a);
  for (int k = m; k < form.coefficients.size(); ++k) {
    const double lam = std::max(form.coefficients(k), 0.0);
    if (lam <= 0.0) continue;
    out += lam * (form.basis_a.col(k) * form.basis_a.col(k).adjoint());
  }
  return out;
}

ComplexMatrix member_output(const SchmidtForm& form, const BipartiteSplit& split,
                            int m, ScissorsVariant variant) {
  const int da = split.dim_a;
  const int db = split.dim_b;
  const int b_out = variant == ScissorsVariant::OrthogonalFlag ? db + 1 : db;
  const ComplexVector kept = truncated_member(form, split, m, b_out);
  ComplexMatrix out = kept * kept.adjoint();
  const ComplexMatrix fail_a = failure_a_marginal(form, split, m);
  if (variant == ScissorsVariant::OrthogonalFlag) {
    // failure weight parked on the appended flag dimension
    for (int a = 0; a < da; ++a) {
      for (int a2 = 0; a2 < da; ++a2) {
        out(a * b_out + db, a2 * b_out + db) += fail_a(a, a2);
      }
    }
  } else {
    // receiver left maximally mixed on the top-M window
    ComplexMatrix window = ComplexMatrix::Zero(db, db);
    for (int l = 0; l < m; ++l) {
      window += form.basis_b.col(l) * form.basis_b.col(l).adjoint();
    }
    window /= static_cast<double>(m);
    for (int a = 0; a < da; ++a) {
      for (int a2 = 0; a2 < da; ++a2) {
        for (int b = 0; b < db; ++b) {
          for (int b2 = 0; b2 < db; ++b2) {
            out(a * b_out + b, a2 * b_out + b2) += fail_a(a, a2) * window(b, b2);
          }
        }
      }
    }
  }
  return out;
}

ComplexMatrix apply_on_third_factor(const ComplexMatrix& rho, int d1, int d2,
                                    const ComplexMatrix& op) {
  // op: rows x cols acting on the third factor; returns K rho K^+.
  const int in = static_cast<int>(op.cols());
  const int out = static_cast<int>(op.rows());
  ComplexMatrix result = ComplexMatrix::Zero(d1 * d2 * out, d1 * d2 * out);
  for (int r1 = 0; r1 < d1 * d2; ++r1) {
    for (int r2 = 0; r2 < d1 * d2; ++r2) {
      for (int i = 0; i < out; ++i) {
        for (int j = 0; j < out; ++j) {
          Complex sum = 0.0;
          for (int a = 0; a < in; ++a) {
            if (op(i, a) == Complex(0.0, 0.0)) continue;
            for (int b = 0; b < in; ++b) {
              sum += op(i, a) * rho(r1 * in + a, r2 * in + b) * std::conj(op(j, b));
            }
          }
          result(r1 * out + i, r2 * out + j) += sum;
        }
      }
    }
  }
  return result;
}

}  // namespace

DensityMatrix scissors_channel(const SchmidtForm& member,
                               const BipartiteSplit& split, int m,
                               ScissorsVariant variant) {
  require(m >= 1 && m <= split.dim_b, "dimension",
          "scissors rank exceeds the teleported dimension");
  const int b_out = variant == ScissorsVariant::OrthogonalFlag ? split.dim_b + 1
                                                               : split.dim_b;
  return DensityMatrix(member_output(member, split, m, variant),
                       BipartiteSplit{split.dim_a, b_out});
}

double dilution_fidelity_formula(const ent::Ensemble& ensemble, int m) {
  ensemble.validate();
  const BipartiteSplit split = ensemble.split();
  require(m >= 1 && m <= split.dim_b, "dimension", "resource rank out of range");
  double f2 = 0.0;
  for (int i = 0; i < ensemble.size(); ++i) {
    const SchmidtForm form =
        schmidt_decompose(ensemble.members[static_cast<std::size_t>(i)], split);
    const int pairs = std::min<int>(m, static_cast<int>(form.coefficients.size()));
    f2 += ensemble.probabilities[static_cast<std::size_t>(i)] *
          form.kept_weight(pairs);
  }
  return std::sqrt(std::min(f2, 1.0));
}

DilutionReport simulate_dilution(const ent::Ensemble& ensemble, int m,
                                 ScissorsVariant variant) {
  ensemble.validate();
  const BipartiteSplit split = ensemble.split();
  const int k = ensemble.size();
  const int da = split.dim_a;
  const int db = split.dim_b;
  require(m >= 1 && m <= db, "dimension",
          "resource rank exceeds the teleported dimension");

  std::vector<SchmidtForm> forms;
  forms.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    forms.push_back(
        schmidt_decompose(ensemble.members[static_cast<std::size_t>(i)], split));
  }

  // Sender-side state on R (x) A (x) A', block diagonal in the flag.
  const int dim = k * da * db;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < k; ++i) {
    const ComplexVector& v = ensemble.members[static_cast<std::size_t>(i)].amplitudes();
    rho.block(i * da * db, i * da * db, da * db, da * db) +=
        ensemble.probabilities[static_cast<std::size_t>(i)] * (v * v.adjoint());
  }

  // Theta on R (x) A': block j applies U_j = basis_b(j)^+ on A'.
  {
    ComplexMatrix theta = ComplexMatrix::Zero(dim, dim);
    for (int j = 0; j < k; ++j) {
      const ComplexMatrix uj = forms[static_cast<std::size_t>(j)].basis_b.adjoint();
      for (int a = 0; a < da; ++a) {
        theta.block((j * da + a) * db, (j * da + a) * db, db, db) = uj;
      }
    }
    rho = theta * rho * theta.adjoint();
  }

  // Scissors teleportation on the A' factor.
  const int b_out = variant == ScissorsVariant::OrthogonalFlag ? db + 1 : db;
  {
    std::vector<ComplexMatrix> kraus;
    if (variant == ScissorsVariant::OrthogonalFlag) {
      ComplexMatrix keep = ComplexMatrix::Zero(b_out, db);
      for (int l = 0; l < m; ++l) keep(l, l) = 1.0;
      kraus.push_back(keep);
      for (int x = m; x < db; ++x) {
        ComplexMatrix fail = ComplexMatrix::Zero(b_out, db);
        fail(db, x) = 1.0;
        kraus.push_back(fail);
      }
    } else {
      ComplexMatrix keep = ComplexMatrix::Zero(db, db);
      for (int l = 0; l < m; ++l) keep(l, l) = 1.0;
      kraus.push_back(keep);
      const double w = 1.0 / std::sqrt(static_cast<double>(m));
      for (int b = 0; b < m; ++b) {
        for (int x = m; x < db; ++x) {
          ComplexMatrix fail = ComplexMatrix::Zero(db, db);
          fail(b, x) = w;
          kraus.push_back(fail);
        }
      }
    }
    ComplexMatrix next = ComplexMatrix::Zero(k * da * b_out, k * da * b_out);
    for (const ComplexMatrix& op : kraus) {
      next += apply_on_third_factor(rho, k, da, op);
    }
    rho = std::move(next);
  }

  // Classical send of R, then the receiver undoes the rotation blockwise
  // (identity on the flag dimension, when present).
  {
    ComplexMatrix theta_dag = ComplexMatrix::Zero(k * da * b_out, k * da * b_out);
    for (int j = 0; j < k; ++j) {
      ComplexMatrix vj = ComplexMatrix::Identity(b_out, b_out);
      vj.topLeftCorner(db, db) = forms[static_cast<std::size_t>(j)].basis_b;
      for (int a = 0; a < da; ++a) {
        theta_dag.block((j * da + a) * b_out, (j * da + a) * b_out, b_out, b_out) = vj;
      }
    }
    rho = theta_dag * rho * theta_dag.adjoint();
  }

  // Trace out the flag register.
  ComplexMatrix out_ab = ComplexMatrix::Zero(da * b_out, da * b_out);
  for (int i = 0; i < k; ++i) {
    out_ab += rho.block(i * da * b_out, i * da * b_out, da * b_out, da * b_out);
  }

  // Target padded with zeros on the appended dimension, if any.
  ComplexMatrix target = ComplexMatrix::Zero(da * b_out, da * b_out);
  for (int i = 0; i < k; ++i) {
    const ComplexVector& v = ensemble.members[static_cast<std::size_t>(i)].amplitudes();
    ComplexVector padded = ComplexVector::Zero(da * b_out);
    for (int a = 0; a < da; ++a) {
      for (int b = 0; b < db; ++b) padded(a * b_out + b) = v(a * db + b);
    }
    target += ensemble.probabilities[static_cast<std::size_t>(i)] *
              (padded * padded.adjoint());
  }

  DilutionReport report;
  report.m_rank = m;
  report.rate_nats = std::log(static_cast<double>(m));
  report.variant = variant;
  report.fidelity_sim =
      std::min(fidelity_subnormalized(target, out_ab), 1.0);
  report.fidelity_formula = dilution_fidelity_formula(ensemble, m);
  report.upper_bound = report.fidelity_formula * report.fidelity_formula;
  report.lower_bound = report.upper_bound * report.upper_bound;
  return report;
}

std::vector<CurvePoint> achievability_curve_iid(const ent::Ensemble& base,
                                                const std::vector<double>& rates,
                                                const std::vector<int>& n_values) {
  base.validate();
  require(!rates.empty(), "args", "rate grid is empty");
  require(!n_values.empty(), "args", "n grid is empty");
  const BipartiteSplit split = base.split();
  const int k = base.size();

  std::vector<RealVector> member_spectra;
  member_spectra.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    member_spectra.push_back(
        schmidt_decompose(base.members[static_cast<std::size_t>(i)], split)
            .coefficients);
  }

  std::vector<CurvePoint> out;
  for (int n : n_values) {
    require(n >= 1, "args", "n values must be >= 1");
    // Member sequences grouped by composition; all sequences in a class
    // share the same tensor-power Schmidt spectrum.
    struct MemberClass {
      double log_weight;  // log multinomial + sum m_i log p_i, or -inf
      spectra::TypeClassSpectrum spectrum;
    };
    std::vector<MemberClass> classes;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    std::function<void(int, int)> rec = [&](int idx, int rem) {
      if (idx == k - 1) {
        counts[static_cast<std::size_t>(idx)] = rem;
        double log_weight = std::lgamma(n + 1.0);
        bool zero = false;
        spectra::TypeClassSpectrum spectrum;
        bool first = true;
        for (int i = 0; i < k; ++i) {
          const int mi = counts[static_cast<std::size_t>(i)];
          log_weight -= std::lgamma(mi + 1.0);
          if (mi == 0) continue;
          const double p = base.probabilities[static_cast<std::size_t>(i)];
          if (p <= 0.0) {
            zero = true;
            break;
          }
          log_weight += mi * std::log(p);
          spectra::TypeClassSpectrum powered =
              spectra::iid_spectrum(member_spectra[static_cast<std::size_t>(i)], mi);
          spectrum = first ? std::move(powered)
                           : spectra::combine_spectra(spectrum, powered);
          first = false;
        }
        if (!zero) classes.push_back({log_weight, std::move(spectrum)});
        return;
      }
      for (int c = 0; c <= rem; ++c) {
        counts[static_cast<std::size_t>(idx)] = c;
        rec(idx + 1, rem - c);
      }
    };
    rec(0, n);

    double rank_cap = 1.0;
    for (int i = 0; i < n; ++i) rank_cap *= split.dim_b;
    for (double rate : rates) {
      CurvePoint point;
      point.n = n;
      point.rate_nats = rate;
      double m_target = std::ceil(std::exp(n * rate));
      if (!std::isfinite(m_target)) m_target = rank_cap;
      point.m_rank = std::min(m_target, rank_cap);
      double f2 = 0.0;
      for (const MemberClass& cls : classes) {
        const double m_eff = std::min(m_target, cls.spectrum.total_count());
        f2 += std::exp(cls.log_weight) * cls.spectrum.top_mass(m_eff);
      }
      point.f2 = std::min(f2, 1.0);
      point.f2_upper = point.f2;
      point.f2_lower = point.f2 * point.f2;
      out.push_back(point);
    }
  }
  return out;
}

double converse_bound(const ent::CqExtension& cq, double gamma, double rate_nats,
                      int n) {
  return spectra::cq_conditional_pi_trace(cq, gamma, n) +
         std::exp(-static_cast<double>(n) * (gamma - rate_nats));
}

double converse_bound_iid(const ent::CqExtension& base, double gamma,
                          double rate_nats, int n) {
  return spectra::cq_conditional_pi_trace_iid(base, gamma, n) +
         std::exp(-static_cast<double>(n) * (gamma - rate_nats));
}

}  // namespace entspec::dilution
