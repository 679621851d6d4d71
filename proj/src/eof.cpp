#include "entspec/eof.hpp"

#include "entspec/parallel.hpp"
#include "entspec/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <utility>

namespace entspec::ent {

using entspec::detail::require;

namespace {

double binary_entropy(double x) {
  double s = 0.0;
  if (x > 1e-300) s -= x * std::log(x);
  if (1.0 - x > 1e-300) s -= (1.0 - x) * std::log(1.0 - x);
  return s;
}

// Entanglement entropy carried by an unnormalized member column:
// ||w||^2 * S(reduced state of w / ||w||). Reduces over the smaller side.
double member_entropy_contribution(const ComplexVector& w,
                                   const BipartiteSplit& split) {
  const double p = w.squaredNorm();
  if (p < 1e-14) return 0.0;
  const int da = split.dim_a;
  const int db = split.dim_b;
  const bool keep_a = da <= db;
  const int dk = keep_a ? da : db;
  ComplexMatrix red = ComplexMatrix::Zero(dk, dk);
  if (keep_a) {
    for (int a = 0; a < da; ++a) {
      for (int a2 = 0; a2 < da; ++a2) {
        Complex sum = 0.0;
        for (int b = 0; b < db; ++b) sum += w(a * db + b) * std::conj(w(a2 * db + b));
        red(a, a2) = sum;
      }
    }
  } else {
    for (int b = 0; b < db; ++b) {
      for (int b2 = 0; b2 < db; ++b2) {
        Complex sum = 0.0;
        for (int a = 0; a < da; ++a) sum += w(a * db + b) * std::conj(w(a * db + b2));
        red(b, b2) = sum;
      }
    }
  }
  red /= p;
  double s = 0.0;
  if (dk == 2) {
    const double tr = red(0, 0).real() + red(1, 1).real();
    const double det = (red(0, 0) * red(1, 1) - red(0, 1) * red(1, 0)).real();
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double lo = std::clamp((tr - disc) / 2.0, 0.0, 1.0);
    s = binary_entropy(lo);
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((red + red.adjoint()) * 0.5,
                                                        Eigen::EigenvaluesOnly);
    for (int i = 0; i < dk; ++i) {
      const double e = solver.eigenvalues()(i);
      if (e > 1e-300) s -= e * std::log(e);
    }
  }
  return p * s;
}

// Mean-entropy objective over member columns, with a per-column cache so
// line searches that touch two columns only recompute two terms.
class MeanEntropyObjective {
 public:
  explicit MeanEntropyObjective(const BipartiteSplit& split) : split_(split) {}

  double operator()(const ComplexMatrix& members) {
    const int k = static_cast<int>(members.cols());
    if (cache_cols_.rows() != members.rows() || cache_cols_.cols() != k) {
      cache_cols_ = ComplexMatrix::Zero(members.rows(), k);
      cache_vals_.assign(static_cast<std::size_t>(k), 0.0);
      cache_valid_.assign(static_cast<std::size_t>(k), false);
    }
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const bool hit =
          cache_valid_[static_cast<std::size_t>(i)] &&
          std::memcmp(members.col(i).data(), cache_cols_.col(i).data(),
                      sizeof(Complex) * static_cast<std::size_t>(members.rows())) == 0;
      if (!hit) {
        cache_vals_[static_cast<std::size_t>(i)] =
            member_entropy_contribution(members.col(i), split_);
        cache_cols_.col(i) = members.col(i);
        cache_valid_[static_cast<std::size_t>(i)] = true;
      }
      total += cache_vals_[static_cast<std::size_t>(i)];
    }
    return total;
  }

 private:
  BipartiteSplit split_;
  ComplexMatrix cache_cols_;
  std::vector<double> cache_vals_;
  std::vector<bool> cache_valid_;
};

ComplexMatrix support_columns(const DensityMatrix& rho, int* rank_out) {
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

struct GoldenResult {
  double theta;
  double value;
};

// Golden-section minimization over theta in [-pi/4, pi/4].
GoldenResult golden_section(const std::function<double(double)>& f) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = -M_PI / 4.0;
  double b = M_PI / 4.0;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 26; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

struct SingleStartResult {
  double value = 0.0;
  ComplexMatrix members;
  bool converged = false;
};

SingleStartResult run_sweeps(ComplexMatrix members,
                             const std::function<double(const ComplexMatrix&)>& objective,
                             int max_sweeps, double tol) {
  const int k = static_cast<int>(members.cols());
  double value = objective(members);
  bool converged = false;
  ComplexMatrix trial = members;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = value;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        for (double phase : {0.0, M_PI / 2.0}) {
          const Complex ph = std::polar(1.0, phase);
          auto rotate = [&](double theta) -> double {
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            trial = members;
            trial.col(i) = c * members.col(i) - std::conj(ph) * s * members.col(j);
            trial.col(j) = ph * s * members.col(i) + c * members.col(j);
            return objective(trial);
          };
          const GoldenResult best = golden_section(rotate);
          if (best.value < value) {
            const double c = std::cos(best.theta);
            const double s = std::sin(best.theta);
            const ComplexVector wi = members.col(i);
            const ComplexVector wj = members.col(j);
            members.col(i) = c * wi - std::conj(ph) * s * wj;
            members.col(j) = ph * s * wi + c * wj;
            value = best.value;
          }
        }
      }
    }
    if (before - value < tol) {
      converged = true;
      break;
    }
  }
  return {value, std::move(members), converged};
}

}  // namespace

double eof_objective(const Ensemble& ensemble) {
  const BipartiteSplit split = ensemble.split();
  double total = 0.0;
  for (int i = 0; i < ensemble.size(); ++i) {
    const ComplexVector w =
        std::sqrt(ensemble.probabilities[static_cast<std::size_t>(i)]) *
        ensemble.members[static_cast<std::size_t>(i)].amplitudes();
    total += member_entropy_contribution(w, split);
  }
  return total;
}

double conditional_entropy_cq(const CqExtension& cq) {
  // Entropy route on the assembled marginals, so the block identity
  // S(RA) - S(R) = sum_i p_i S(rho_A^i) stays an independent cross-check.
  const ComplexMatrix ra = cq.ra_marginal();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((ra + ra.adjoint()) * 0.5,
                                                      Eigen::EigenvaluesOnly);
  double s_ra = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    const double e = solver.eigenvalues()(i);
    if (e > 1e-300) s_ra -= e * std::log(e);
  }
  double s_r = 0.0;
  for (double p : cq.ensemble.probabilities) {
    if (p > 1e-300) s_r -= p * std::log(p);
  }
  return s_ra - s_r;
}

double concurrence_two_qubit(const DensityMatrix& rho) {
  require(rho.dim() == 4, "dimension", "concurrence needs a two-qubit state");
  ComplexMatrix yy = ComplexMatrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const ComplexMatrix tilde = yy * rho.matrix().conjugate() * yy;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(rho.matrix() * tilde);
  std::array<double, 4> mu{};
  for (int i = 0; i < 4; ++i) {
    mu[static_cast<std::size_t>(i)] =
        std::sqrt(std::max(solver.eigenvalues()(i).real(), 0.0));
  }
  std::sort(mu.begin(), mu.end(), std::greater<>());
  return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

double eof_two_qubit(const DensityMatrix& rho) {
  const double c = concurrence_two_qubit(rho);
  const double x = (1.0 + std::sqrt(std::max(1.0 - c * c, 0.0))) / 2.0;
  return binary_entropy(x);
}

namespace detail {

Ensemble ensemble_from_member_matrix(const ComplexMatrix& members,
                                     const BipartiteSplit& split) {
  Ensemble out;
  double total = 0.0;
  for (int i = 0; i < members.cols(); ++i) total += members.col(i).squaredNorm();
  for (int i = 0; i < members.cols(); ++i) {
    const double p = members.col(i).squaredNorm();
    if (p < 1e-14) continue;
    out.probabilities.push_back(p / total);
    out.members.emplace_back(members.col(i) / std::sqrt(p), split);
  }
  return out;
}

UnitarySearchResult minimize_over_decompositions(
    const DensityMatrix& rho, int member_count,
    const ObjectiveFactory& objective_factory, int restarts, std::uint64_t seed,
    int max_sweeps, double tol, const std::vector<ComplexMatrix>& extra_starts) {
  int rank = 0;
  const ComplexMatrix c = support_columns(rho, &rank);
  require(member_count >= rank, "args",
          "member_count below the rank of the state");
  for (const ComplexMatrix& u : extra_starts) {
    require(u.rows() == member_count && u.cols() == member_count, "dimension",
            "start unitary has the wrong size");
  }

  // Member matrices W = C * U(:, 1:r)^+; U = I gives the eigendecomposition
  // ensemble, one start per extra unitary, then Haar restarts.
  const int total_starts = 1 + static_cast<int>(extra_starts.size()) + restarts;
  std::vector<SingleStartResult> results(static_cast<std::size_t>(total_starts));
  Rng base(seed);
  parallel_for_index(static_cast<std::size_t>(total_starts), [&](std::size_t idx) {
    ComplexMatrix u;
    if (idx == 0) {
      u = ComplexMatrix::Identity(member_count, member_count);
    } else if (idx <= extra_starts.size()) {
      u = extra_starts[idx - 1];
    } else {
      Rng rng = base.derive(idx - extra_starts.size() - 1);
      u = haar_unitary(rng, member_count);
    }
    ComplexMatrix members = c * u.leftCols(rank).adjoint();
    auto objective = objective_factory();
    results[idx] = run_sweeps(std::move(members), objective, max_sweeps, tol);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].value < results[best].value - 1e-15) best = i;
  }
  UnitarySearchResult out;
  out.value = results[best].value;
  out.members = std::move(results[best].members);
  out.converged = results[best].converged;
  out.restarts_used = total_starts;
  return out;
}

}  // namespace detail

EntanglementReport eof_minimize(const DensityMatrix& rho,
                                const MinimizeOptions& options) {
  const BipartiteSplit split = rho.split_or_throw();
  int rank = 0;
  (void)support_columns(rho, &rank);
  const int member_count =
      options.member_count > 0 ? options.member_count : rank * rank;
  require(member_count >= rank, "args",
          "member_count below the rank of the state");

  if (rank == 1) {
    // Unique decomposition; nothing to search.
    Ensemble witness = eigendecomposition_ensemble(rho);
    EntanglementReport report;
    report.value_nats = eof_objective(witness);
    report.witness = std::move(witness);
    report.restarts_used = 0;
    report.converged = true;
    return report;
  }

  auto factory = [&split]() -> std::function<double(const ComplexMatrix&)> {
    return MeanEntropyObjective(split);
  };
  auto result = detail::minimize_over_decompositions(
      rho, member_count, factory, options.restarts, options.seed,
      options.max_sweeps, options.tol, options.extra_starts);

  EntanglementReport report;
  report.value_nats = result.value;
  report.witness = detail::ensemble_from_member_matrix(result.members, split);
  report.restarts_used = result.restarts_used;
  report.converged = result.converged;
  return report;
}

EntanglementReport eof_minimize(const DensityMatrix& rho, int member_count,
                                int restarts, std::uint64_t seed) {
  MinimizeOptions options;
  options.member_count = member_count;
  options.restarts = restarts;
  options.seed = seed;
  return eof_minimize(rho, options);
}

std::vector<std::pair<int, double>> eof_regularized_estimate(
    const DensityMatrix& rho, int n_max, const MinimizeOptions& options) {
  const BipartiteSplit base = rho.split_or_throw();
  require(n_max >= 1, "args", "eof_regularized_estimate needs n_max >= 1");
  {
    double dim = 1.0;
    for (int i = 0; i < n_max; ++i) dim *= base.dim();
    require(dim <= 256.0, "cap",
            "eof_regularized_estimate exceeds the 256 ambient-dimension cap");
  }

  std::vector<std::pair<int, double>> out;
  Ensemble previous_witness;  // best witness at level n-1
  Ensemble level1_witness;
  for (int n = 1; n <= n_max; ++n) {
    BipartiteSplit split{1, 1};
    for (int i = 0; i < n; ++i) {
      split.dim_a *= base.dim_a;
      split.dim_b *= base.dim_b;
    }
    DensityMatrix level(n == 1 ? rho.matrix() : tensor_power_regrouped(rho.matrix(), base, n),
                        split);
    int rank = 0;
    (void)support_columns(level, &rank);

    MinimizeOptions level_options = options;
    std::vector<ComplexMatrix> starts = options.extra_starts;
    if (n > 1) {
      // Product of the level-(n-1) and level-1 witnesses: guarantees the
      // per-copy value cannot rise above the n = 1 value.
      Ensemble product;
      const BipartiteSplit prev_split = previous_witness.split();
      for (int i = 0; i < previous_witness.size(); ++i) {
        for (int j = 0; j < level1_witness.size(); ++j) {
          const ComplexVector& u = previous_witness.members[static_cast<std::size_t>(i)].amplitudes();
          const ComplexVector& v = level1_witness.members[static_cast<std::size_t>(j)].amplitudes();
          ComplexVector w(split.dim());
          // legs (A^{n-1} A) x (B^{n-1} B)
          for (int a1 = 0; a1 < prev_split.dim_a; ++a1) {
            for (int a2 = 0; a2 < base.dim_a; ++a2) {
              for (int b1 = 0; b1 < prev_split.dim_b; ++b1) {
                for (int b2 = 0; b2 < base.dim_b; ++b2) {
                  const int row = (a1 * base.dim_a + a2) * split.dim_b +
                                  (b1 * base.dim_b + b2);
                  w(row) = u(a1 * prev_split.dim_b + b1) * v(a2 * base.dim_b + b2);
                }
              }
            }
          }
          product.probabilities.push_back(
              previous_witness.probabilities[static_cast<std::size_t>(i)] *
              level1_witness.probabilities[static_cast<std::size_t>(j)]);
          product.members.emplace_back(std::move(w), split);
        }
      }
      const int needed = std::max(rank, product.size());
      level_options.member_count = std::max(
          options.member_count > 0 ? options.member_count : 0, needed);
      starts.push_back(reference_unitary_of_ensemble(level, product,
                                                     level_options.member_count));
    }
    level_options.extra_starts = std::move(starts);
    EntanglementReport report = eof_minimize(level, level_options);
    out.emplace_back(n, report.value_nats / n);
    if (n == 1) level1_witness = report.witness;
    previous_witness = std::move(report.witness);
  }
  return out;
}

namespace {

// Conditional-axis midpoint of the finite-n sweep for symbol pairs
// (p_i * lambda, p_i) built from the member columns.
double conditional_midpoint_objective(const ComplexMatrix& members,
                                      const BipartiteSplit& split, int n,
                                      int table_power,
                                      const std::vector<double>& grid,
                                      double epsilon) {
  std::vector<std::pair<double, double>> symbols;
  for (int i = 0; i < members.cols(); ++i) {
    const double p = members.col(i).squaredNorm();
    if (p < 1e-14) continue;
    const ComplexVector w = members.col(i) / std::sqrt(p);
    ComplexMatrix red = ComplexMatrix::Zero(split.dim_a, split.dim_a);
    for (int a = 0; a < split.dim_a; ++a) {
      for (int a2 = 0; a2 < split.dim_a; ++a2) {
        Complex sum = 0.0;
        for (int b = 0; b < split.dim_b; ++b) {
          sum += w(a * split.dim_b + b) * std::conj(w(a2 * split.dim_b + b));
        }
        red(a, a2) = sum;
      }
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((red + red.adjoint()) * 0.5,
                                                        Eigen::EigenvaluesOnly);
    for (int k = 0; k < solver.eigenvalues().size(); ++k) {
      symbols.emplace_back(p * std::max(solver.eigenvalues()(k), 0.0), p);
    }
  }
  spectra::detail::PairSweepTable table(std::move(symbols), table_power);
  spectra::GammaSweep sweep;
  sweep.mode = spectra::SweepMode::ConditionalEntropy;
  sweep.gamma_grid = grid;
  sweep.n_values = {n};
  sweep.f_values = {std::vector<double>(grid.size(), 0.0)};
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    sweep.f_values[0][gi] = table.evaluate(-static_cast<double>(n) * grid[gi]);
  }
  return spectra::rate_estimate(sweep, epsilon)[0].midpoint;
}

EntanglementReport cost_proxy_common(const DensityMatrix& rho, int n,
                                     const CostProxyOptions& options,
                                     bool iid_power) {
  const BipartiteSplit split = rho.split_or_throw();
  const std::vector<double> grid =
      options.gamma_grid.empty() ? spectra::default_gamma_grid() : options.gamma_grid;
  int rank = 0;
  (void)support_columns(rho, &rank);
  const int member_count =
      options.member_count > 0 ? options.member_count : rank * rank;
  const int table_power = iid_power ? n : 1;

  if (rank == 1) {
    Ensemble witness = eigendecomposition_ensemble(rho);
    const ComplexVector w = witness.members[0].amplitudes();
    ComplexMatrix members(split.dim(), 1);
    members.col(0) = w;
    EntanglementReport report;
    report.value_nats = conditional_midpoint_objective(members, split, n,
                                                       table_power, grid,
                                                       options.epsilon);
    report.witness = std::move(witness);
    report.restarts_used = 0;
    report.converged = true;
    return report;
  }

  const double epsilon = options.epsilon;
  auto factory = [&split, n, table_power, &grid,
                  epsilon]() -> std::function<double(const ComplexMatrix&)> {
    return [&split, n, table_power, &grid, epsilon](const ComplexMatrix& members) {
      return conditional_midpoint_objective(members, split, n, table_power, grid,
                                            epsilon);
    };
  };
  auto result = detail::minimize_over_decompositions(
      rho, member_count, factory, options.restarts, options.seed,
      options.max_sweeps, options.tol, {});

  EntanglementReport report;
  report.value_nats = result.value;
  report.witness = detail::ensemble_from_member_matrix(result.members, split);
  report.restarts_used = result.restarts_used;
  report.converged = result.converged;
  return report;
}

}  // namespace

EntanglementReport cost_proxy_minimize_explicit(const DensityMatrix& rho, int n,
                                                const CostProxyOptions& options) {
  require(n >= 1, "args", "cost proxy needs n >= 1");
  return cost_proxy_common(rho, n, options, /*iid_power=*/false);
}

EntanglementReport cost_proxy_minimize_iid(const DensityMatrix& rho_base, int n,
                                           const CostProxyOptions& options) {
  require(n >= 1, "args", "cost proxy needs n >= 1");
  return cost_proxy_common(rho_base, n, options, /*iid_power=*/true);
}

}  // namespace entspec::ent
