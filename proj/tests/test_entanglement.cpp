#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "entspec/ensemble.hpp"
#include "entspec/eof.hpp"
#include "entspec/qcore.hpp"
#include "entspec/rng.hpp"

#include <cmath>
#include <vector>

using namespace entspec;
using namespace entspec::ent;

namespace {

const double kLn2 = std::log(2.0);

DensityMatrix two_qubit_from_purification(Rng& rng) {
  // partial trace of a random 3-qubit pure state (rank <= 2 mixed state)
  PureState psi = random_pure(rng, 8, BipartiteSplit{4, 2});
  return partial_trace(psi.to_density(), Subsystem::A)
             .matrix()
             .rows() == 4
             ? DensityMatrix(partial_trace(psi.to_density(), Subsystem::A).matrix(),
                             BipartiteSplit{2, 2})
             : throw Error("invariant", "unexpected dimension");
}

DensityMatrix werner(double p) {
  // p |Psi-><Psi-| + (1-p) I/4
  ComplexVector singlet = ComplexVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  ComplexMatrix m = p * (singlet * singlet.adjoint()) +
                    (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
  return DensityMatrix(m, BipartiteSplit{2, 2});
}

PureState bell() { return maximally_entangled(2, {2, 2}); }

double binary_entropy_nats(double x) {
  double s = 0.0;
  if (x > 0) s -= x * std::log(x);
  if (x < 1) s -= (1 - x) * std::log(1 - x);
  return s;
}

}  // namespace

TEST_CASE("ensemble_from_isometry reproduces the state") {
  Rng rng(51);
  DensityMatrix rho = random_density(rng, 4, BipartiteSplit{2, 2});

  // identity: eigendecomposition ensemble
  Ensemble eig_ens = ensemble_from_isometry(
      rho, ComplexMatrix::Identity(4, 4), 4);
  Ensemble direct = eigendecomposition_ensemble(rho);
  REQUIRE(eig_ens.size() == direct.size());
  CHECK((eig_ens.mixture_matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-9);

  // random unitary with more members
  ComplexMatrix u = haar_unitary(rng, 8);
  Ensemble big = ensemble_from_isometry(rho, u, 8);
  CHECK((big.mixture_matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  big.validate();

  // pure state: every member equals the state's own vector (up to phase)
  DensityMatrix pure = bell().to_density();
  Ensemble single = ensemble_from_isometry(pure, haar_unitary(rng, 3), 3);
  for (const PureState& m : single.members) {
    const Complex overlap = (m.amplitudes().adjoint() * bell().amplitudes())(0, 0);
    CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-9);
  }

  CHECK_THROWS_AS(ensemble_from_isometry(rho, ComplexMatrix::Identity(2, 2), 2),
                  Error);
}

TEST_CASE("ensemble round trip through the reference unitary") {
  Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    DensityMatrix rho = random_density(rng, 4, BipartiteSplit{2, 2});
    Ensemble original = ensemble_from_isometry(rho, haar_unitary(rng, 6), 6);
    ComplexMatrix u = reference_unitary_of_ensemble(rho, original, 6);
    Ensemble rebuilt = ensemble_from_isometry(rho, u, 6);
    CHECK(std::abs(eof_objective(rebuilt) - eof_objective(original)) <= 1e-8);
    CHECK((rebuilt.mixture_matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("eof objective on named ensembles") {
  // all-product members
  Ensemble products;
  for (int i = 0; i < 2; ++i) {
    ComplexVector v = ComplexVector::Zero(4);
    v(i == 0 ? 0 : 3) = 1.0;
    products.probabilities.push_back(0.5);
    products.members.emplace_back(v, BipartiteSplit{2, 2});
  }
  CHECK(eof_objective(products) <= 1e-12);

  Ensemble single_bell;
  single_bell.probabilities = {1.0};
  single_bell.members = {bell()};
  CHECK(eof_objective(single_bell) == doctest::Approx(kLn2).epsilon(1e-12));

  Ensemble half;
  ComplexVector prod = ComplexVector::Zero(4);
  prod(0) = 1.0;
  half.probabilities = {0.5, 0.5};
  half.members = {bell(), PureState(prod, BipartiteSplit{2, 2})};
  CHECK(eof_objective(half) == doctest::Approx(0.5 * kLn2).epsilon(1e-12));
}

TEST_CASE("conditional entropy of cq extensions equals the mean member entropy") {
  CqExtension single;
  single.ensemble.probabilities = {1.0};
  single.ensemble.members = {bell()};
  CHECK(conditional_entropy_cq(single) == doctest::Approx(kLn2).epsilon(1e-9));

  // uniform flags over identical members change nothing
  CqExtension repeated;
  repeated.ensemble.probabilities = {0.25, 0.25, 0.25, 0.25};
  repeated.ensemble.members = {bell(), bell(), bell(), bell()};
  CHECK(conditional_entropy_cq(repeated) == doctest::Approx(kLn2).epsilon(1e-9));

  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    CqExtension cq;
    RealVector p = random_probability_vector(rng, 3);
    for (int i = 0; i < 3; ++i) {
      cq.ensemble.probabilities.push_back(p(i));
      cq.ensemble.members.push_back(random_pure(rng, 6, BipartiteSplit{2, 3}));
    }
    CHECK(std::abs(conditional_entropy_cq(cq) - eof_objective(cq.ensemble)) <= 1e-9);
  }
}

TEST_CASE("two-qubit concurrence closed forms") {
  CHECK(concurrence_two_qubit(bell().to_density()) == doctest::Approx(1.0).epsilon(1e-9));

  ComplexVector prod = ComplexVector::Zero(4);
  prod(1) = 1.0;
  CHECK(concurrence_two_qubit(PureState(prod, BipartiteSplit{2, 2}).to_density()) <=
        1e-9);

  CHECK(concurrence_two_qubit(werner(0.9)) == doctest::Approx(0.85).epsilon(1e-10));

  CHECK_THROWS_AS(concurrence_two_qubit(DensityMatrix(
                      ComplexMatrix::Identity(2, 2) / 2.0)),
                  Error);
}

TEST_CASE("two-qubit eof closed forms") {
  CHECK(eof_two_qubit(bell().to_density()) == doctest::Approx(kLn2).epsilon(1e-10));

  ComplexVector prod = ComplexVector::Zero(4);
  prod(0) = 1.0;
  CHECK(eof_two_qubit(PureState(prod, BipartiteSplit{2, 2}).to_density()) <= 1e-9);

  const double c = 0.85;
  const double expected = binary_entropy_nats((1.0 + std::sqrt(1.0 - c * c)) / 2.0);
  CHECK(eof_two_qubit(werner(0.9)) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("eof_minimize handles pure and separable states exactly") {
  // pure state: unique decomposition, no search
  EntanglementReport pure_report = eof_minimize(bell().to_density(), 4, 3, 7);
  CHECK(pure_report.value_nats == doctest::Approx(kLn2).epsilon(1e-10));
  CHECK(pure_report.converged);

  // diagonal separable mixture of |00> and |11>
  ComplexMatrix sep = ComplexMatrix::Zero(4, 4);
  sep(0, 0) = 0.5;
  sep(3, 3) = 0.5;
  EntanglementReport sep_report =
      eof_minimize(DensityMatrix(sep, BipartiteSplit{2, 2}), 4, 5, 3);
  CHECK(sep_report.value_nats <= 1e-6);
}

TEST_CASE("eof_minimize matches the Wootters oracle on random states") {
  Rng rng(54);
  double max_err = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    DensityMatrix rho = two_qubit_from_purification(rng);
    EntanglementReport report = eof_minimize(rho, 4, 20, 1000 + trial);
    max_err = std::max(max_err, std::abs(report.value_nats - eof_two_qubit(rho)));
    // the minimizer never loses to the eigendecomposition ensemble
    CHECK(report.value_nats <=
          eof_objective(eigendecomposition_ensemble(rho)) + 1e-9);
    // witness reproduces both the state and the reported value
    CHECK((report.witness.mixture_matrix() - rho.matrix()).cwiseAbs().maxCoeff() <=
          1e-8);
    CHECK(std::abs(eof_objective(report.witness) - report.value_nats) <= 1e-9);
  }
  CHECK(max_err <= 1e-3);
}

TEST_CASE("eof_minimize lower-bounds every sampled decomposition") {
  Rng rng(58);
  DensityMatrix rho = two_qubit_from_purification(rng);
  EntanglementReport best = eof_minimize(rho, 4, 12, 77);
  for (int trial = 0; trial < 40; ++trial) {
    Ensemble sampled = ensemble_from_isometry(rho, haar_unitary(rng, 4), 4);
    CHECK(eof_objective(sampled) >= best.value_nats - 1e-9);
  }
}

TEST_CASE("eof_minimize is deterministic for a fixed seed") {
  Rng rng(55);
  DensityMatrix rho = two_qubit_from_purification(rng);
  EntanglementReport a = eof_minimize(rho, 4, 6, 42);
  EntanglementReport b = eof_minimize(rho, 4, 6, 42);
  CHECK(a.value_nats == b.value_nats);
  CHECK(a.restarts_used == b.restarts_used);
}

TEST_CASE("eof_minimize is invariant under local unitaries") {
  Rng rng(56);
  double max_gap = 0.0;
  for (int trial = 0; trial < 15; ++trial) {
    DensityMatrix rho = two_qubit_from_purification(rng);
    ComplexMatrix local =
        tensor_product(haar_unitary(rng, 2), haar_unitary(rng, 2));
    DensityMatrix rotated(local * rho.matrix() * local.adjoint(),
                          BipartiteSplit{2, 2});
    EntanglementReport a = eof_minimize(rho, 4, 12, 900 + trial);
    EntanglementReport b = eof_minimize(rotated, 4, 12, 900 + trial);
    max_gap = std::max(max_gap, std::abs(a.value_nats - b.value_nats));
  }
  CHECK(max_gap <= 2e-3);
}

TEST_CASE("regularized eof per copy") {
  // pure states: additive, so the per-copy value is flat
  MinimizeOptions options;
  options.restarts = 2;
  options.max_sweeps = 40;
  auto pure_curve = eof_regularized_estimate(bell().to_density(), 2, options);
  REQUIRE(pure_curve.size() == 2);
  CHECK(pure_curve[0].second == doctest::Approx(kLn2).epsilon(1e-9));
  CHECK(std::abs(pure_curve[1].second - pure_curve[0].second) <= 1e-6);

  // separable states stay at zero
  ComplexMatrix sep = ComplexMatrix::Zero(4, 4);
  sep(0, 0) = 0.6;
  sep(3, 3) = 0.4;
  auto sep_curve = eof_regularized_estimate(DensityMatrix(sep, BipartiteSplit{2, 2}),
                                            2, options);
  CHECK(sep_curve[0].second <= 1e-5);
  CHECK(sep_curve[1].second <= 1e-5);

  DensityMatrix big(ComplexMatrix::Identity(16, 16) / 16.0, BipartiteSplit{4, 4});
  CHECK_THROWS_AS(eof_regularized_estimate(big, 3, options), Error);
}

TEST_CASE("cost proxy on flat and product targets") {
  // maximally entangled target: flat spectrum, midpoint (n+1)/n * ln 2
  CostProxyOptions options;
  options.restarts = 2;
  EntanglementReport at1 = cost_proxy_minimize_iid(bell().to_density(), 1, options);
  CHECK(at1.value_nats == doctest::Approx(2.0 * kLn2).epsilon(1e-3));
  EntanglementReport at16 = cost_proxy_minimize_iid(bell().to_density(), 16, options);
  CHECK(std::abs(at16.value_nats - kLn2) <= 0.05);

  // separable pure product target: the proxy decays like ln(2)/n
  ComplexVector prod = ComplexVector::Zero(4);
  prod(2) = 1.0;
  DensityMatrix product_state =
      PureState(prod, BipartiteSplit{2, 2}).to_density();
  EntanglementReport sep16 = cost_proxy_minimize_iid(product_state, 16, options);
  CHECK(std::abs(sep16.value_nats) <= 0.05);
}

TEST_CASE("cost proxy explicit search does not exceed the trivial extension") {
  Rng rng(57);
  CostProxyOptions options;
  options.restarts = 3;
  options.member_count = 4;
  options.max_sweeps = 60;
  DensityMatrix rho = two_qubit_from_purification(rng);
  EntanglementReport searched = cost_proxy_minimize_explicit(rho, 4, options);

  // trivial upper bound: the eigendecomposition extension evaluated directly
  CqExtension eig_cq;
  eig_cq.ensemble = eigendecomposition_ensemble(rho);
  spectra::GammaSweep sweep =
      spectra::gamma_sweep_cq_explicit(eig_cq, 4, spectra::default_gamma_grid());
  const double trivial = spectra::rate_estimate(sweep, options.epsilon)[0].midpoint;
  CHECK(searched.value_nats <= trivial + 1e-9);
  CHECK(searched.witness.size() >= 1);
}
