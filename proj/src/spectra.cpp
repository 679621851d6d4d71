#include "entspec/spectra.hpp"

#include "entspec/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>

namespace entspec::spectra {

using detail::PairSweepTable;
using entspec::detail::require;

namespace {

constexpr double kZeroEigRel = 1e-12;        // {A >= 0} membership
constexpr std::size_t kClassCap = 4000000;   // composition enumeration cap
constexpr double kCountCap = 1.8e19;         // must stay below uint64 range

double max_abs_eig(const RealVector& values) {
  double m = 0.0;
  for (int i = 0; i < values.size(); ++i) m = std::max(m, std::abs(values(i)));
  return m;
}

// Sum of eigenvalues counted nonnegative under the {A >= 0} convention.
double nonnegative_eig_sum(const ComplexMatrix& herm) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (herm + herm.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  const RealVector& v = solver.eigenvalues();
  const double cut = -kZeroEigRel * max_abs_eig(v);
  double total = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    if (v(i) >= cut) total += v(i);
  }
  return total;
}

struct Composition {
  double log_mult;  // log multinomial + sum_i k_i log(base multiplicity)
  double log_p;
  double log_q;
  bool p_zero;
  bool q_zero;
};

struct Symbol {
  double p;
  double q;
  int mult;
};

std::vector<Symbol> dedup_pairs(const std::vector<std::pair<double, double>>& raw) {
  std::vector<Symbol> out;
  for (const auto& [p, q] : raw) {
    bool merged = false;
    for (auto& s : out) {
      const double scale_p = std::max({std::abs(s.p), std::abs(p), 1e-300});
      const double scale_q = std::max({std::abs(s.q), std::abs(q), 1e-300});
      if (std::abs(s.p - p) <= 1e-12 * scale_p &&
          std::abs(s.q - q) <= 1e-12 * scale_q) {
        ++s.mult;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({p, q, 1});
  }
  return out;
}

// All compositions of n over the symbols, with running log weights.
void enumerate_compositions(const std::vector<Symbol>& symbols, int n,
                            const std::function<void(const Composition&)>& emit) {
  const int s = static_cast<int>(symbols.size());
  require(s >= 1, "args", "composition enumeration over empty symbol set");
  std::vector<double> lgamma_table(static_cast<std::size_t>(n) + 2);
  for (int k = 0; k <= n + 1; ++k) lgamma_table[k] = std::lgamma(k + 1.0);
  std::size_t produced = 0;
  std::function<void(int, int, Composition)> rec = [&](int idx, int rem,
                                                       Composition acc) {
    if (idx == s - 1) {
      const Symbol& sym = symbols[static_cast<std::size_t>(idx)];
      const int k = rem;
      acc.log_mult += -lgamma_table[k] + k * std::log(static_cast<double>(sym.mult));
      if (k > 0) {
        if (sym.p <= 0.0) acc.p_zero = true;
        else acc.log_p += k * std::log(sym.p);
        if (sym.q <= 0.0) acc.q_zero = true;
        else acc.log_q += k * std::log(sym.q);
      }
      require(++produced <= kClassCap, "cap", "type-class enumeration too large");
      emit(acc);
      return;
    }
    const Symbol& sym = symbols[static_cast<std::size_t>(idx)];
    for (int k = 0; k <= rem; ++k) {
      Composition next = acc;
      next.log_mult += -lgamma_table[k] + k * std::log(static_cast<double>(sym.mult));
      if (k > 0) {
        if (sym.p <= 0.0) next.p_zero = true;
        else next.log_p += k * std::log(sym.p);
        if (sym.q <= 0.0) next.q_zero = true;
        else next.log_q += k * std::log(sym.q);
      }
      rec(idx + 1, rem - k, next);
    }
  };
  Composition seed{std::lgamma(n + 1.0), 0.0, 0.0, false, false};
  rec(0, n, seed);
}

// (p_i, rho_A^i) blocks turned into conditional-sweep symbol pairs
// (p_i * lambda, p_i). Zero-probability blocks vanish identically.
std::vector<std::pair<double, double>> conditional_symbols(
    const std::vector<std::pair<double, ComplexMatrix>>& blocks) {
  std::vector<std::pair<double, double>> symbols;
  for (const auto& [p, block] : blocks) {
    if (p <= 1e-15) continue;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
        (block + block.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
    for (int k = 0; k < solver.eigenvalues().size(); ++k) {
      symbols.emplace_back(p * std::max(solver.eigenvalues()(k), 0.0), p);
    }
  }
  return symbols;
}

GammaSweep make_sweep(SweepMode mode, std::vector<double> grid,
                      std::vector<int> n_values) {
  require(!grid.empty(), "args", "gamma grid is empty");
  require(std::is_sorted(grid.begin(), grid.end()), "args",
          "gamma grid must be ascending");
  require(!n_values.empty(), "args", "n grid is empty");
  for (int n : n_values) require(n >= 1, "args", "n values must be >= 1");
  GammaSweep sweep;
  sweep.mode = mode;
  sweep.gamma_grid = std::move(grid);
  sweep.n_values = std::move(n_values);
  sweep.f_values.assign(sweep.n_values.size(),
                        std::vector<double>(sweep.gamma_grid.size(), 0.0));
  return sweep;
}

}  // namespace

const char* to_string(SweepMode mode) {
  return mode == SweepMode::Divergence ? "divergence" : "conditional-entropy";
}

SpectralProjector positive_part_projector(const ComplexMatrix& a) {
  require(entspec::detail::hermiticity_defect(a) <= kHermTol, "invariant",
          "positive_part_projector input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((a + a.adjoint()) * 0.5);
  const RealVector& v = solver.eigenvalues();
  const double cut = -kZeroEigRel * max_abs_eig(v);
  SpectralProjector proj;
  proj.source_dimension = static_cast<int>(a.rows());
  proj.matrix = ComplexMatrix::Zero(a.rows(), a.cols());
  for (int i = 0; i < v.size(); ++i) {
    if (v(i) >= cut) {
      proj.matrix += solver.eigenvectors().col(i) * solver.eigenvectors().col(i).adjoint();
      ++proj.rank;
    }
  }
  return proj;
}

SpectralProjector spectral_compare(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "dimension",
          "spectral_compare dimension mismatch");
  return positive_part_projector(a - b);
}

double lemma1_gap(const ComplexMatrix& a, const ComplexMatrix& b,
                  const ComplexMatrix& p) {
  require(a.rows() == b.rows() && a.rows() == p.rows(), "dimension",
          "lemma1_gap dimension mismatch");
  require(entspec::detail::hermiticity_defect(p) <= kHermTol, "invariant",
          "lemma1_gap P is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> pe((p + p.adjoint()) * 0.5,
                                                  Eigen::EigenvaluesOnly);
  require(pe.eigenvalues().minCoeff() >= -kHermTol &&
              pe.eigenvalues().maxCoeff() <= 1.0 + kHermTol,
          "invariant", "lemma1_gap P is outside [0, I]");
  const ComplexMatrix diff = a - b;
  const double best = nonnegative_eig_sum(diff);
  const double tried = (p * diff).trace().real();
  return best - tried;
}

Lemma2Result lemma2_check(const DensityMatrix& rho, const ComplexMatrix& omega,
                          int n, double gamma) {
  require(rho.dim() == omega.rows(), "dimension", "lemma2_check dimension mismatch");
  require(n >= 1, "args", "lemma2_check needs n >= 1");
  const ComplexMatrix diff = rho.matrix() - std::exp(n * gamma) * omega;
  SpectralProjector proj = positive_part_projector(diff);
  Lemma2Result out;
  out.value = (proj.matrix * omega).trace().real();
  out.bound = std::exp(-n * gamma);
  return out;
}

double pi_trace(const ComplexMatrix& rho, const ComplexMatrix& omega, int n,
                double gamma) {
  require(rho.rows() == omega.rows(), "dimension", "pi_trace dimension mismatch");
  require(n >= 1, "args", "pi_trace needs n >= 1");
  return nonnegative_eig_sum(rho - std::exp(n * gamma) * omega);
}

double cq_conditional_pi_trace(const ent::CqExtension& cq, double gamma, int n) {
  require(n >= 1, "args", "cq_conditional_pi_trace needs n >= 1");
  PairSweepTable table(conditional_symbols(cq.a_blocks()), 1);
  return table.evaluate(-static_cast<double>(n) * gamma);
}

double cq_conditional_pi_trace_iid(const ent::CqExtension& base, double gamma,
                                   int n) {
  require(n >= 1, "args", "cq_conditional_pi_trace_iid needs n >= 1");
  PairSweepTable table(conditional_symbols(base.a_blocks()), n);
  return table.evaluate(-static_cast<double>(n) * gamma);
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  grid.reserve(401);
  for (int i = 0; i <= 400; ++i) grid.push_back(-2.0 + 0.01 * i);
  return grid;
}

namespace detail {

PairSweepTable::PairSweepTable(std::vector<std::pair<double, double>> symbols,
                               int n) {
  std::vector<Symbol> dedup = dedup_pairs(symbols);
  struct Entry {
    double ratio;
    double p_mass;
    double q_mass;
  };
  std::vector<Entry> entries;
  enumerate_compositions(dedup, n, [&](const Composition& c) {
    if (c.p_zero) return;  // never kept, contributes nothing
    const double p_mass = std::exp(c.log_mult + c.log_p);
    if (c.q_zero) {
      p_q_zero_mass_ += p_mass;  // always kept, no q term
      return;
    }
    entries.push_back(
        {c.log_p - c.log_q, p_mass, std::exp(c.log_mult + c.log_q)});
  });
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.ratio > b.ratio; });
  ratio_.resize(entries.size());
  p_prefix_.resize(entries.size() + 1, 0.0);
  q_prefix_.resize(entries.size() + 1, 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ratio_[i] = entries[i].ratio;
    p_prefix_[i + 1] = p_prefix_[i] + entries[i].p_mass;
    q_prefix_[i + 1] = q_prefix_[i] + entries[i].q_mass;
  }
}

double PairSweepTable::evaluate(double threshold_log) const {
  // kept classes: ratio >= threshold_log (zero difference included)
  const auto it = std::partition_point(
      ratio_.begin(), ratio_.end(),
      [threshold_log](double r) { return r >= threshold_log; });
  const std::size_t kept = static_cast<std::size_t>(it - ratio_.begin());
  const double t = std::exp(threshold_log);
  return p_q_zero_mass_ + p_prefix_[kept] - t * q_prefix_[kept];
}

}  // namespace detail

std::optional<std::vector<std::pair<double, double>>> try_codiagonalize(
    const ComplexMatrix& rho, const ComplexMatrix& omega, double tol) {
  if (rho.rows() != omega.rows()) return std::nullopt;
  const ComplexMatrix commutator = rho * omega - omega * rho;
  if (commutator.cwiseAbs().maxCoeff() > tol) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((rho + rho.adjoint()) * 0.5);
  const RealVector& rv = solver.eigenvalues();
  const ComplexMatrix& vecs = solver.eigenvectors();
  ComplexMatrix b = vecs.adjoint() * omega * vecs;
  const int d = static_cast<int>(rho.rows());
  const double group_gap = 1e-8 * std::max(1.0, max_abs_eig(rv));
  ComplexMatrix basis = vecs;
  std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(d));
  int start = 0;
  while (start < d) {
    int stop = start + 1;
    while (stop < d && std::abs(rv(stop) - rv(stop - 1)) <= group_gap) ++stop;
    const int g = stop - start;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> sub(
        (b.block(start, start, g, g) + b.block(start, start, g, g).adjoint()) * 0.5);
    basis.middleCols(start, g) = basis.middleCols(start, g) * sub.eigenvectors();
    for (int k = 0; k < g; ++k) {
      pairs[static_cast<std::size_t>(start + k)] = {rv(start + k),
                                                    sub.eigenvalues()(k)};
    }
    start = stop;
  }
  // Self-check: the joint basis must reproduce omega.
  ComplexMatrix rebuilt = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    rebuilt += pairs[static_cast<std::size_t>(i)].second * basis.col(i) *
               basis.col(i).adjoint();
  }
  if ((rebuilt - omega).cwiseAbs().maxCoeff() > 1e-8) return std::nullopt;
  return pairs;
}

GammaSweep gamma_sweep_iid(const DensityMatrix& rho, const ComplexMatrix& omega,
                           const std::vector<int>& n_values,
                           const std::vector<double>& gamma_grid) {
  require(rho.dim() == omega.rows(), "dimension", "gamma_sweep dimension mismatch");
  GammaSweep sweep = make_sweep(SweepMode::Divergence, gamma_grid, n_values);
  auto pairs = try_codiagonalize(rho.matrix(), omega);
  if (pairs) {
    for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
      const int n = sweep.n_values[ni];
      PairSweepTable table(*pairs, n);
      for (std::size_t gi = 0; gi < sweep.gamma_grid.size(); ++gi) {
        sweep.f_values[ni][gi] = table.evaluate(n * sweep.gamma_grid[gi]);
      }
    }
    return sweep;
  }
  for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
    const int n = sweep.n_values[ni];
    double dim = 1.0;
    for (int i = 0; i < n; ++i) dim *= rho.dim();
    require(dim <= kDimensionCap, "cap",
            "non-commuting i.i.d. sweep exceeds the 4096 ambient-dimension cap");
    const ComplexMatrix rho_n = kronecker_power(rho.matrix(), n);
    const ComplexMatrix omega_n = kronecker_power(omega, n);
    auto& row = sweep.f_values[ni];
    parallel_for_index(sweep.gamma_grid.size(), [&](std::size_t gi) {
      row[gi] = pi_trace(rho_n, omega_n, n, sweep.gamma_grid[gi]);
    });
  }
  return sweep;
}

GammaSweep gamma_sweep_explicit(
    const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& sequence,
    const std::vector<int>& n_values, const std::vector<double>& gamma_grid) {
  require(sequence.size() == n_values.size(), "args",
          "explicit sweep needs one state pair per n");
  GammaSweep sweep = make_sweep(SweepMode::Divergence, gamma_grid, n_values);
  for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
    const int n = sweep.n_values[ni];
    const auto& [rho_n, omega_n] = sequence[ni];
    auto pairs = try_codiagonalize(rho_n, omega_n);
    auto& row = sweep.f_values[ni];
    if (pairs) {
      PairSweepTable table(*pairs, 1);
      for (std::size_t gi = 0; gi < sweep.gamma_grid.size(); ++gi) {
        row[gi] = table.evaluate(n * sweep.gamma_grid[gi]);
      }
    } else {
      parallel_for_index(sweep.gamma_grid.size(), [&](std::size_t gi) {
        row[gi] = pi_trace(rho_n, omega_n, n, sweep.gamma_grid[gi]);
      });
    }
  }
  return sweep;
}

GammaSweep gamma_sweep_cq_iid(const ent::CqExtension& base,
                              const std::vector<int>& n_values,
                              const std::vector<double>& gamma_grid) {
  GammaSweep sweep = make_sweep(SweepMode::ConditionalEntropy, gamma_grid, n_values);
  const auto symbols = conditional_symbols(base.a_blocks());
  for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
    const int n = sweep.n_values[ni];
    PairSweepTable table(symbols, n);
    for (std::size_t gi = 0; gi < sweep.gamma_grid.size(); ++gi) {
      sweep.f_values[ni][gi] = table.evaluate(-n * sweep.gamma_grid[gi]);
    }
  }
  return sweep;
}

GammaSweep gamma_sweep_cq_explicit(const ent::CqExtension& cq, int n,
                                   const std::vector<double>& gamma_grid) {
  GammaSweep sweep = make_sweep(SweepMode::ConditionalEntropy, gamma_grid, {n});
  PairSweepTable table(conditional_symbols(cq.a_blocks()), 1);
  for (std::size_t gi = 0; gi < sweep.gamma_grid.size(); ++gi) {
    sweep.f_values[0][gi] = table.evaluate(-n * sweep.gamma_grid[gi]);
  }
  return sweep;
}

namespace {

// Core estimator for a non-increasing f over an ascending grid.
RateEstimate estimate_decreasing(const std::vector<double>& grid,
                                 const std::vector<double>& f, double epsilon) {
  RateEstimate est;
  est.epsilon = epsilon;
  const double hi = 1.0 - epsilon;
  const double lo = epsilon;
  const std::size_t g = grid.size();

  est.low_open = true;
  est.gamma_low = grid.front();
  for (std::size_t i = g; i-- > 0;) {
    if (f[i] >= hi) {
      est.gamma_low = grid[i];
      est.low_open = false;
      break;
    }
  }
  est.high_open = true;
  est.gamma_high = grid.back();
  for (std::size_t i = 0; i < g; ++i) {
    if (f[i] <= lo) {
      est.gamma_high = grid[i];
      est.high_open = false;
      break;
    }
  }
  est.midpoint_open = true;
  if (f.front() < 0.5) {
    est.midpoint = grid.front();
  } else {
    est.midpoint = grid.back();
    for (std::size_t i = 0; i + 1 < g; ++i) {
      if (f[i] >= 0.5 && f[i + 1] < 0.5) {
        const double run = f[i] - f[i + 1];
        const double frac = run > 0.0 ? (f[i] - 0.5) / run : 0.0;
        est.midpoint = grid[i] + frac * (grid[i + 1] - grid[i]);
        est.midpoint_open = false;
        break;
      }
    }
    if (est.midpoint_open && std::abs(f.back() - 0.5) <= 1e-12) {
      est.midpoint = grid.back();
      est.midpoint_open = false;
    }
  }
  return est;
}

}  // namespace

std::vector<RateEstimate> rate_estimate(const GammaSweep& sweep, double epsilon) {
  require(epsilon > 0.0 && epsilon < 0.5, "args", "epsilon must lie in (0, 1/2)");
  std::vector<RateEstimate> out;
  out.reserve(sweep.n_values.size());
  for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
    RateEstimate est;
    if (sweep.mode == SweepMode::Divergence) {
      est = estimate_decreasing(sweep.gamma_grid, sweep.f_values[ni], epsilon);
    } else {
      // Conditional axis: mirror to the decreasing orientation and map back.
      std::vector<double> grid(sweep.gamma_grid.rbegin(), sweep.gamma_grid.rend());
      for (auto& x : grid) x = -x;
      std::vector<double> f(sweep.f_values[ni].rbegin(), sweep.f_values[ni].rend());
      RateEstimate mirrored = estimate_decreasing(grid, f, epsilon);
      est.epsilon = epsilon;
      est.gamma_low = -mirrored.gamma_high;
      est.low_open = mirrored.high_open;
      est.gamma_high = -mirrored.gamma_low;
      est.high_open = mirrored.low_open;
      est.midpoint = -mirrored.midpoint;
      est.midpoint_open = mirrored.midpoint_open;
    }
    est.n = sweep.n_values[ni];
    out.push_back(est);
  }
  return out;
}

namespace {

std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // exact at each step: result * (n - k + i) is divisible by i
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    require(result <= UINT64_MAX / num, "cap", "multinomial count overflow");
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    require(base == 0 || r <= UINT64_MAX / std::max<std::uint64_t>(base, 1), "cap",
            "multiplicity overflow");
    r *= base;
  }
  return r;
}

struct RawClass {
  double log_value;
  std::uint64_t mult;
};

void sort_and_merge(std::vector<RawClass>& classes, TypeClassSpectrum& out) {
  std::sort(classes.begin(), classes.end(),
            [](const RawClass& a, const RawClass& b) {
              return a.log_value > b.log_value;
            });
  for (const RawClass& c : classes) {
    const bool both_zero = !out.log_values.empty() &&
                           std::isinf(out.log_values.back()) &&
                           std::isinf(c.log_value);
    if (!out.log_values.empty() &&
        (both_zero || std::abs(out.log_values.back() - c.log_value) <= 1e-12)) {
      out.multiplicities.back() += c.mult;
    } else {
      out.log_values.push_back(c.log_value);
      out.multiplicities.push_back(c.mult);
    }
  }
  out.values.reserve(out.log_values.size());
  for (double lv : out.log_values) out.values.push_back(std::exp(lv));
}

}  // namespace

double TypeClassSpectrum::total_mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    m += values[i] * static_cast<double>(multiplicities[i]);
  }
  return m;
}

double TypeClassSpectrum::total_count() const {
  double c = 0.0;
  for (std::uint64_t m : multiplicities) c += static_cast<double>(m);
  return c;
}

double TypeClassSpectrum::top_mass(double count) const {
  double mass = 0.0;
  double remaining = count;
  for (std::size_t i = 0; i < values.size() && remaining > 0.0; ++i) {
    const double take = std::min(remaining, static_cast<double>(multiplicities[i]));
    mass += take * values[i];
    remaining -= take;
  }
  return mass;
}

TypeClassSpectrum iid_spectrum(const RealVector& eigenvalues, int n) {
  require(n >= 1, "args", "iid_spectrum needs n >= 1");
  double total = 0.0;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    require(eigenvalues(i) >= -1e-12, "invariant",
            "iid_spectrum needs a nonnegative spectrum");
    total += eigenvalues(i);
  }
  require(std::abs(total - 1.0) <= 1e-9, "invariant",
          "iid_spectrum needs a probability vector");
  // Deduplicate base values at relative tolerance 1e-12.
  std::vector<double> values;
  std::vector<int> base_mult;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    const double v = std::max(eigenvalues(i), 0.0);
    bool merged = false;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (std::abs(values[k] - v) <= 1e-12 * std::max({values[k], v, 1e-300})) {
        ++base_mult[k];
        merged = true;
        break;
      }
    }
    if (!merged) {
      values.push_back(v);
      base_mult.push_back(1);
    }
  }
  require(std::pow(static_cast<double>(eigenvalues.size()), n) <= kCountCap, "cap",
          "iid_spectrum total count exceeds the 64-bit range");

  const int s = static_cast<int>(values.size());
  std::vector<RawClass> classes;
  std::vector<int> counts(static_cast<std::size_t>(s), 0);
  std::function<void(int, int)> rec = [&](int idx, int rem) {
    if (idx == s - 1) {
      counts[static_cast<std::size_t>(idx)] = rem;
      std::uint64_t mult = 1;
      int used = 0;
      double log_value = 0.0;
      bool zero = false;
      for (int i = 0; i < s; ++i) {
        const int k = counts[static_cast<std::size_t>(i)];
        used += k;
        const std::uint64_t binom = binomial_u64(used, k);
        require(mult <= UINT64_MAX / std::max<std::uint64_t>(binom, 1), "cap",
                "multiplicity overflow");
        mult *= binom;
        const std::uint64_t bm =
            pow_u64(static_cast<std::uint64_t>(base_mult[static_cast<std::size_t>(i)]), k);
        require(mult <= UINT64_MAX / std::max<std::uint64_t>(bm, 1), "cap",
                "multiplicity overflow");
        mult *= bm;
        if (k > 0) {
          if (values[static_cast<std::size_t>(i)] <= 0.0) zero = true;
          else log_value += k * std::log(values[static_cast<std::size_t>(i)]);
        }
      }
      require(classes.size() < kClassCap, "cap", "type-class enumeration too large");
      classes.push_back({zero ? -std::numeric_limits<double>::infinity() : log_value,
                         mult});
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      counts[static_cast<std::size_t>(idx)] = k;
      rec(idx + 1, rem - k);
    }
  };
  rec(0, n);

  TypeClassSpectrum out;
  sort_and_merge(classes, out);
  return out;
}

TypeClassSpectrum combine_spectra(const TypeClassSpectrum& a,
                                  const TypeClassSpectrum& b) {
  std::vector<RawClass> classes;
  classes.reserve(a.values.size() * b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    for (std::size_t j = 0; j < b.values.size(); ++j) {
      require(a.multiplicities[i] <=
                  UINT64_MAX / std::max<std::uint64_t>(b.multiplicities[j], 1),
              "cap", "multiplicity overflow");
      classes.push_back({a.log_values[i] + b.log_values[j],
                         a.multiplicities[i] * b.multiplicities[j]});
    }
  }
  TypeClassSpectrum out;
  sort_and_merge(classes, out);
  return out;
}

}  // namespace entspec::spectra
