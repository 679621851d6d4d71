#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "entspec/ensemble.hpp"
#include "entspec/qcore.hpp"
#include "entspec/rng.hpp"
#include "entspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace entspec;
using namespace entspec::spectra;

namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) m(i, i) = v, ++i;
  return m;
}

ent::CqExtension cq_of_members(const std::vector<double>& probs,
                               const std::vector<PureState>& members) {
  ent::CqExtension cq;
  cq.ensemble.probabilities = probs;
  cq.ensemble.members = members;
  return cq;
}

// Assembled-matrix oracle for the conditional pi trace.
double assembled_conditional_pi_trace(const ent::CqExtension& cq, double gamma,
                                      int n) {
  const ComplexMatrix ra = cq.ra_marginal();
  const int da = cq.ensemble.split().dim_a;
  const ComplexMatrix omega =
      tensor_product(cq.r_marginal(), ComplexMatrix::Identity(da, da));
  return pi_trace(ra, omega, n, -gamma);
}

}  // namespace

TEST_CASE("positive part projector on known inputs") {
  SpectralProjector p = positive_part_projector(diag({1, -1}));
  CHECK((p.matrix - diag({1, 0})).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(p.rank == 1);

  SpectralProjector all = positive_part_projector(ComplexMatrix::Zero(3, 3));
  CHECK((all.matrix - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(all.rank == 3);
}

TEST_CASE("positive part projector maximizes the trace among equal-rank projectors") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = rng.uniform_int(2, 4);
    ComplexMatrix a = random_hermitian(rng, d);
    SpectralProjector p = positive_part_projector(a);
    const double best = (p.matrix * a).trace().real();
    if (p.rank == 0 || p.rank == d) continue;
    for (int sample = 0; sample < 100; ++sample) {
      ComplexMatrix u = haar_unitary(rng, d);
      ComplexMatrix q = u.leftCols(p.rank) * u.leftCols(p.rank).adjoint();
      CHECK((q * a).trace().real() <= best + 1e-9);
    }
  }
}

TEST_CASE("spectral compare") {
  SpectralProjector same = spectral_compare(diag({0.3, 0.7}), diag({0.3, 0.7}));
  CHECK((same.matrix - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  SpectralProjector p = spectral_compare(diag({1, 0}), diag({0.5, 0.5}));
  CHECK((p.matrix - diag({1, 0})).cwiseAbs().maxCoeff() <= 1e-12);

  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = rng.uniform_int(2, 5);
    RealVector a = random_probability_vector(rng, d);
    RealVector b = random_probability_vector(rng, d);
    ComplexMatrix da = ComplexMatrix::Zero(d, d);
    ComplexMatrix db = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) da(i, i) = a(i), db(i, i) = b(i);
    SpectralProjector proj = spectral_compare(da, db);
    for (int i = 0; i < d; ++i) {
      const double want = a(i) >= b(i) ? 1.0 : 0.0;
      CHECK(std::abs(proj.matrix(i, i).real() - want) <= 1e-9);
    }
  }
}

TEST_CASE("lemma 1 gap") {
  Rng rng(33);
  ComplexMatrix a = random_hermitian(rng, 4);
  ComplexMatrix b = random_hermitian(rng, 4);
  SpectralProjector p = spectral_compare(a, b);
  CHECK(std::abs(lemma1_gap(a, b, p.matrix)) <= 1e-9);

  // P = 0 with a PSD difference: the gap is the full trace.
  ComplexMatrix psd = random_psd(rng, 4);
  CHECK(lemma1_gap(psd, ComplexMatrix::Zero(4, 4), ComplexMatrix::Zero(4, 4)) ==
        doctest::Approx(psd.trace().real()).epsilon(1e-10));

  // quantified random sweep
  for (int trial = 0; trial < 300; ++trial) {
    const int d = rng.uniform_int(2, 16);
    ComplexMatrix aa = random_hermitian(rng, d);
    ComplexMatrix bb = random_hermitian(rng, d);
    ComplexMatrix pp = random_contraction(rng, d);
    CHECK(lemma1_gap(aa, bb, pp) >= -1e-9);
  }

  ComplexMatrix outside = 2.0 * ComplexMatrix::Identity(4, 4);
  CHECK_THROWS_AS(lemma1_gap(a, b, outside), Error);
}

TEST_CASE("lemma 2 bound") {
  DensityMatrix rho(diag({1, 0}));
  Lemma2Result r = lemma2_check(rho, ComplexMatrix::Identity(2, 2) / 2.0, 1, 0.0);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.bound == doctest::Approx(1.0));

  // gamma large enough that the projector vanishes
  Lemma2Result r2 = lemma2_check(rho, ComplexMatrix::Identity(2, 2) / 2.0, 1, 2.0);
  CHECK(r2.value <= 1e-12);

  Rng rng(34);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = rng.uniform_int(2, 6);
    DensityMatrix r3 = random_density(rng, d);
    ComplexMatrix omega = random_psd(rng, d);
    const int n = rng.uniform_int(1, 3);
    const double gamma = -1.0 + 2.0 * rng.uniform();
    Lemma2Result got = lemma2_check(r3, omega, n, gamma);
    CHECK(got.value <= got.bound + 1e-9);
  }
}

TEST_CASE("pi trace basics") {
  DensityMatrix rho(diag({0.5, 0.5}));
  CHECK(std::abs(pi_trace(rho.matrix(), rho.matrix(), 1, 0.0)) <= 1e-12);

  CHECK(pi_trace(diag({1, 0}), ComplexMatrix::Identity(2, 2) / 2.0, 1, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(35);
  DensityMatrix a = random_density(rng, 3);
  DensityMatrix b = random_density(rng, 3);
  CHECK(pi_trace(a.matrix(), b.matrix(), 1, -50.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("iid spectrum examples") {
  RealVector two(2);
  two << 0.8, 0.2;
  TypeClassSpectrum s = iid_spectrum(two, 2);
  REQUIRE(s.values.size() == 3);
  CHECK(s.values[0] == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(s.values[1] == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(s.values[2] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(s.multiplicities[0] == 1);
  CHECK(s.multiplicities[1] == 2);
  CHECK(s.multiplicities[2] == 1);

  RealVector one(1);
  one << 1.0;
  TypeClassSpectrum s1 = iid_spectrum(one, 7);
  REQUIRE(s1.values.size() == 1);
  CHECK(s1.values[0] == doctest::Approx(1.0));
  CHECK(s1.multiplicities[0] == 1);

  RealVector three(3);
  three << 0.5, 0.3, 0.2;
  TypeClassSpectrum s3 = iid_spectrum(three, 10);
  CHECK(s3.values.size() == 66);  // C(12, 2)
  CHECK(s3.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s3.total_count() == doctest::Approx(std::pow(3.0, 10)));
}

TEST_CASE("iid spectrum matches brute-force Kronecker powers") {
  Rng rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    RealVector base = random_probability_vector(rng, 2);
    for (int n = 1; n <= 6; ++n) {
      TypeClassSpectrum s = iid_spectrum(base, n);
      // oracle: explicit eigenvalues of the Kronecker power
      ComplexMatrix d = ComplexMatrix::Zero(2, 2);
      d(0, 0) = base(0);
      d(1, 1) = base(1);
      EigResult eig = hermitian_eig(kronecker_power(d, n));
      std::vector<double> brute(eig.values.data(), eig.values.data() + eig.values.size());
      std::vector<double> expanded;
      for (std::size_t c = 0; c < s.values.size(); ++c) {
        for (std::uint64_t k = 0; k < s.multiplicities[c]; ++k) {
          expanded.push_back(s.values[c]);
        }
      }
      REQUIRE(expanded.size() == brute.size());
      for (std::size_t i = 0; i < brute.size(); ++i) {
        CHECK(std::abs(expanded[i] - brute[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("combine spectra matches iid additivity") {
  RealVector base(2);
  base << 0.7, 0.3;
  TypeClassSpectrum s2 = iid_spectrum(base, 2);
  TypeClassSpectrum s3 = iid_spectrum(base, 3);
  TypeClassSpectrum joined = combine_spectra(s2, s3);
  TypeClassSpectrum s5 = iid_spectrum(base, 5);
  REQUIRE(joined.values.size() == s5.values.size());
  for (std::size_t i = 0; i < s5.values.size(); ++i) {
    CHECK(std::abs(joined.values[i] - s5.values[i]) <= 1e-12);
    CHECK(joined.multiplicities[i] == s5.multiplicities[i]);
  }
}

TEST_CASE("commuting iid sweep agrees with explicit assembly") {
  Rng rng(37);
  RealVector p = random_probability_vector(rng, 2);
  RealVector q = random_probability_vector(rng, 2);
  ComplexMatrix u = haar_unitary(rng, 2);
  ComplexMatrix dp = ComplexMatrix::Zero(2, 2);
  ComplexMatrix dq = ComplexMatrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i) dp(i, i) = p(i), dq(i, i) = q(i);
  DensityMatrix rho(u * dp * u.adjoint());
  ComplexMatrix omega = u * dq * u.adjoint();

  std::vector<double> grid;
  for (int i = -12; i <= 12; ++i) grid.push_back(0.1 * i);
  GammaSweep sweep = gamma_sweep_iid(rho, omega, {1, 2, 4}, grid);
  for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
    const int n = sweep.n_values[ni];
    const ComplexMatrix rho_n = kronecker_power(rho.matrix(), n);
    const ComplexMatrix omega_n = kronecker_power(omega, n);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const double direct = pi_trace(rho_n, omega_n, n, grid[gi]);
      CHECK(std::abs(sweep.f_values[ni][gi] - direct) <= 1e-9);
    }
  }
}

TEST_CASE("explicit sequences agree with assembled iid powers") {
  Rng rng(47);
  DensityMatrix rho = random_density(rng, 2);
  ComplexMatrix omega = random_psd(rng, 2);
  std::vector<double> grid = {-0.6, -0.2, 0.0, 0.3, 0.8};
  std::vector<std::pair<ComplexMatrix, ComplexMatrix>> sequence;
  std::vector<int> n_values = {1, 2, 3};
  for (int n : n_values) {
    sequence.emplace_back(kronecker_power(rho.matrix(), n),
                          kronecker_power(omega, n));
  }
  GammaSweep explicit_sweep = gamma_sweep_explicit(sequence, n_values, grid);
  GammaSweep iid_sweep = gamma_sweep_iid(rho, omega, n_values, grid);
  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      CHECK(std::abs(explicit_sweep.f_values[ni][gi] - iid_sweep.f_values[ni][gi]) <=
            1e-9);
    }
  }
  CHECK_THROWS_AS(gamma_sweep_explicit(sequence, {1, 2}, grid), Error);
}

TEST_CASE("non-commuting iid sweep falls back to explicit assembly") {
  Rng rng(38);
  DensityMatrix rho = random_density(rng, 2);
  ComplexMatrix omega = random_psd(rng, 2);
  // almost surely non-commuting
  REQUIRE(!try_codiagonalize(rho.matrix(), omega).has_value());
  std::vector<double> grid = {-0.5, 0.0, 0.5};
  GammaSweep sweep = gamma_sweep_iid(rho, omega, {3}, grid);
  const ComplexMatrix rho_3 = kronecker_power(rho.matrix(), 3);
  const ComplexMatrix omega_3 = kronecker_power(omega, 3);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    CHECK(std::abs(sweep.f_values[0][gi] - pi_trace(rho_3, omega_3, 3, grid[gi])) <=
          1e-10);
  }
}

TEST_CASE("sweep f values stay in range and monotone") {
  Rng rng(39);
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(0.05 * i);
  for (int trial = 0; trial < 5; ++trial) {
    DensityMatrix rho = random_density(rng, 2);
    DensityMatrix omega = random_density(rng, 2);
    GammaSweep sweep = gamma_sweep_iid(rho, omega.matrix(), {1, 2, 3}, grid);
    for (const auto& row : sweep.f_values) {
      for (std::size_t gi = 0; gi < row.size(); ++gi) {
        CHECK(row[gi] >= -1e-9);
        CHECK(row[gi] <= 1.0 + 1e-9);
        if (gi > 0) CHECK(row[gi] <= row[gi - 1] + 1e-9);
      }
    }
  }
}

TEST_CASE("divergence midpoint approaches the relative entropy") {
  DensityMatrix rho(diag({0.9, 0.1}));
  ComplexMatrix omega = ComplexMatrix::Identity(2, 2) / 2.0;
  GammaSweep sweep = gamma_sweep_iid(rho, omega, {4, 20, 24}, default_gamma_grid());
  std::vector<RateEstimate> est = rate_estimate(sweep, 0.05);
  const double target = 0.36806420716849707;  // ln 2 - H(0.9), nats
  CHECK(std::abs(est[1].midpoint - target) <= 0.05);  // n = 20
  CHECK(std::abs(est[2].midpoint - target) <= 0.05);  // n = 24
  CHECK(std::abs(est[2].midpoint - target) <=
        std::abs(est[0].midpoint - target) + 0.02);
  for (const auto& e : est) {
    CHECK(e.gamma_low <= e.midpoint + 1e-9);
    CHECK(e.midpoint <= e.gamma_high + 1e-9);
  }
}

TEST_CASE("identical states give a vanishing midpoint") {
  // For rho = omega the curve is f(gamma) = max(0, 1 - e^{n gamma})
  // regardless of the state, so the midpoint sits at -ln(2)/n exactly and
  // decays to the S(rho||rho) = 0 limit.
  DensityMatrix rho(diag({0.7, 0.3}));
  GammaSweep sweep =
      gamma_sweep_iid(rho, rho.matrix(), {1, 4, 8, 24}, default_gamma_grid());
  std::vector<RateEstimate> est = rate_estimate(sweep, 0.05);
  for (std::size_t i = 0; i < est.size(); ++i) {
    CHECK(std::abs(est[i].midpoint + std::log(2.0) / est[i].n) <= 1e-3);
  }
  CHECK(std::abs(est.back().midpoint) <= 0.03);
}

TEST_CASE("conditional sweep of a trivial-flag pure ensemble approaches the entropy") {
  ComplexVector amp = ComplexVector::Zero(4);
  amp(0) = std::sqrt(0.8);
  amp(3) = std::sqrt(0.2);
  ent::CqExtension cq =
      cq_of_members({1.0}, {PureState(amp, BipartiteSplit{2, 2})});
  GammaSweep sweep = gamma_sweep_cq_iid(cq, {4, 8, 16, 24}, default_gamma_grid());
  std::vector<RateEstimate> est = rate_estimate(sweep, 0.05);
  const double s = 0.5004024235381879;  // H(0.8) nats
  CHECK(std::abs(est[3].midpoint - s) < std::abs(est[0].midpoint - s));
  CHECK(std::abs(est[3].midpoint - s) <= 0.05);
  // conditional f is non-decreasing on the reported axis
  for (const auto& row : sweep.f_values) {
    for (std::size_t gi = 1; gi < row.size(); ++gi) {
      CHECK(row[gi] + 1e-9 >= row[gi - 1]);
    }
  }
}

TEST_CASE("cq conditional pi trace matches the assembled computation") {
  Rng rng(40);
  // single member: equals the pi trace of rho_A against I_A
  PureState psi = random_pure(rng, 8, BipartiteSplit{2, 4});
  ent::CqExtension single = cq_of_members({1.0}, {psi});
  const ComplexMatrix rho_a =
      partial_trace_raw(psi.amplitudes() * psi.amplitudes().adjoint(),
                        BipartiteSplit{2, 4}, Subsystem::A);
  for (double gamma : {-0.4, 0.0, 0.3, 1.0}) {
    CHECK(std::abs(cq_conditional_pi_trace(single, gamma, 2) -
                   pi_trace(rho_a, ComplexMatrix::Identity(2, 2), 2, -gamma)) <= 1e-9);
  }

  // two equal members behave like one
  ent::CqExtension doubled = cq_of_members({0.5, 0.5}, {psi, psi});
  for (double gamma : {-0.2, 0.1, 0.6}) {
    CHECK(std::abs(cq_conditional_pi_trace(doubled, gamma, 1) -
                   cq_conditional_pi_trace(single, gamma, 1)) <= 1e-9);
  }

  // random 3-member extensions vs the assembled oracle
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> probs(3);
    RealVector p = random_probability_vector(rng, 3);
    for (int i = 0; i < 3; ++i) probs[static_cast<std::size_t>(i)] = p(i);
    std::vector<PureState> members;
    for (int i = 0; i < 3; ++i) {
      members.push_back(random_pure(rng, 8, BipartiteSplit{4, 2}));
    }
    ent::CqExtension cq = cq_of_members(probs, members);
    for (double gamma : {-0.5, 0.0, 0.4, 1.2}) {
      CHECK(std::abs(cq_conditional_pi_trace(cq, gamma, 1) -
                     assembled_conditional_pi_trace(cq, gamma, 1)) <= 1e-9);
    }
  }
}

TEST_CASE("iid cq conditional pi trace matches small explicit powers") {
  Rng rng(41);
  PureState psi = random_pure(rng, 4, BipartiteSplit{2, 2});
  ComplexVector prod = ComplexVector::Zero(4);
  prod(0) = 1.0;
  std::vector<double> probs = {0.6, 0.4};
  std::vector<PureState> members = {psi, PureState(prod, BipartiteSplit{2, 2})};
  ent::CqExtension base = cq_of_members(probs, members);

  // explicit 2-copy extension: members are ordered pairs with product weights
  ent::CqExtension power;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const ComplexVector& u = members[static_cast<std::size_t>(i)].amplitudes();
      const ComplexVector& v = members[static_cast<std::size_t>(j)].amplitudes();
      ComplexVector w(16);
      // regroup (A1 B1)(A2 B2) -> (A1 A2)(B1 B2)
      for (int a1 = 0; a1 < 2; ++a1) {
        for (int a2 = 0; a2 < 2; ++a2) {
          for (int b1 = 0; b1 < 2; ++b1) {
            for (int b2 = 0; b2 < 2; ++b2) {
              w((a1 * 2 + a2) * 4 + (b1 * 2 + b2)) =
                  u(a1 * 2 + b1) * v(a2 * 2 + b2);
            }
          }
        }
      }
      power.ensemble.probabilities.push_back(
          probs[static_cast<std::size_t>(i)] * probs[static_cast<std::size_t>(j)]);
      power.ensemble.members.emplace_back(w, BipartiteSplit{4, 4});
    }
  }
  for (double gamma : {-0.3, 0.0, 0.2, 0.8}) {
    CHECK(std::abs(cq_conditional_pi_trace_iid(base, gamma, 2) -
                   cq_conditional_pi_trace(power, gamma, 2)) <= 1e-9);
  }
}

TEST_CASE("rate estimate on a step-like curve") {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(-1.0 + 0.02 * i);
  GammaSweep sweep;
  sweep.mode = SweepMode::Divergence;
  sweep.gamma_grid = grid;
  sweep.n_values = {1};
  std::vector<double> f(grid.size());
  const double step_at = 0.1;
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = grid[i] < step_at ? 1.0 : 0.0;
  sweep.f_values = {f};
  RateEstimate est = rate_estimate(sweep, 0.05)[0];
  CHECK(std::abs(est.gamma_low - est.gamma_high) <= 0.02 + 1e-12);
  CHECK(std::abs(est.midpoint - step_at) <= 0.02 + 1e-12);
  CHECK(!est.low_open);
  CHECK(!est.high_open);

  // epsilon near 1/2 still brackets the midpoint
  RateEstimate tight = rate_estimate(sweep, 0.49)[0];
  CHECK(tight.gamma_low <= est.midpoint + 1e-12);
  CHECK(tight.gamma_high >= est.midpoint - 1e-12);

  // constant f = 1: the low threshold is never crossed on the grid
  sweep.f_values = {std::vector<double>(grid.size(), 1.0)};
  RateEstimate flat = rate_estimate(sweep, 0.05)[0];
  CHECK(flat.gamma_high == grid.back());
  CHECK(flat.high_open);
  CHECK(flat.midpoint_open);

  CHECK_THROWS_AS(rate_estimate(sweep, 0.7), Error);
}

TEST_CASE("conditional-mode rate estimate keeps the interval ordered") {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.02 * i);
  GammaSweep sweep;
  sweep.mode = SweepMode::ConditionalEntropy;
  sweep.gamma_grid = grid;
  sweep.n_values = {1};
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f[i] = std::clamp((grid[i] - 0.6) / 0.4 + 0.5, 0.0, 1.0);  // rises around 0.6
  }
  sweep.f_values = {f};
  RateEstimate est = rate_estimate(sweep, 0.1)[0];
  CHECK(est.gamma_low <= est.midpoint);
  CHECK(est.midpoint <= est.gamma_high);
  CHECK(est.midpoint == doctest::Approx(0.6).epsilon(0.03));
}

TEST_CASE("gamma sweep argument validation") {
  DensityMatrix rho(diag({0.5, 0.5}));
  CHECK_THROWS_AS(gamma_sweep_iid(rho, rho.matrix(), {1}, {}), Error);
  CHECK_THROWS_AS(gamma_sweep_iid(rho, rho.matrix(), {0}, {0.0}), Error);
  CHECK_THROWS_AS(gamma_sweep_iid(rho, ComplexMatrix::Identity(3, 3), {1}, {0.0}),
                  Error);

  // non-commuting pairs cannot go beyond the explicit-assembly cap
  Rng rng(48);
  DensityMatrix r2 = random_density(rng, 2);
  ComplexMatrix w2 = random_psd(rng, 2);
  REQUIRE(!try_codiagonalize(r2.matrix(), w2).has_value());
  CHECK_THROWS_AS(gamma_sweep_iid(r2, w2, {13}, {0.0}), Error);  // 2^13 > 4096
}
