// Python bindings for the main operations; numpy arrays in, plain
// dicts/tuples out.
#include "entspec/dilution.hpp"
#include "entspec/ensemble.hpp"
#include "entspec/eof.hpp"
#include "entspec/qcore.hpp"
#include "entspec/rng.hpp"
#include "entspec/spectra.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace entspec;

namespace {

BipartiteSplit split_of(const std::pair<int, int>& dims) {
  return BipartiteSplit{dims.first, dims.second};
}

ent::Ensemble make_ensemble(const std::vector<double>& probs,
                            const std::vector<ComplexVector>& members,
                            const std::pair<int, int>& dims) {
  ent::Ensemble e;
  e.probabilities = probs;
  for (const ComplexVector& m : members) {
    e.members.emplace_back(m, split_of(dims));
  }
  e.validate();
  return e;
}

py::dict report_dict(const ent::EntanglementReport& report) {
  py::dict out;
  out["value_nats"] = report.value_nats;
  out["value_bits"] = report.value_nats / std::log(2.0);
  out["restarts_used"] = report.restarts_used;
  out["converged"] = report.converged;
  py::list probs;
  py::list members;
  for (int i = 0; i < report.witness.size(); ++i) {
    probs.append(report.witness.probabilities[static_cast<std::size_t>(i)]);
    members.append(ComplexVector(
        report.witness.members[static_cast<std::size_t>(i)].amplitudes()));
  }
  out["witness_probs"] = std::move(probs);
  out["witness_members"] = std::move(members);
  return out;
}

py::dict estimate_dict(const spectra::RateEstimate& est) {
  py::dict out;
  out["n"] = est.n;
  out["gamma_low"] = est.gamma_low;
  out["gamma_high"] = est.gamma_high;
  out["midpoint"] = est.midpoint;
  out["epsilon"] = est.epsilon;
  out["low_open"] = est.low_open;
  out["high_open"] = est.high_open;
  out["midpoint_open"] = est.midpoint_open;
  return out;
}

}  // namespace

PYBIND11_MODULE(_entspec, m) {
  m.doc() =
      "information-spectrum entanglement-cost toolkit: spectral projections, "
      "finite-n rate estimators, entanglement of formation, dilution protocol";

  py::register_exception<Error>(m, "EntspecError");

  // linear-algebra and state primitives
  m.def("tensor_product",
        py::overload_cast<const ComplexMatrix&, const ComplexMatrix&>(
            &tensor_product),
        py::arg("a"), py::arg("b"));
  m.def(
      "partial_trace",
      [](const ComplexMatrix& rho, std::pair<int, int> dims, const std::string& keep) {
        return partial_trace_raw(rho, split_of(dims),
                                 keep == "A" ? Subsystem::A : Subsystem::B);
      },
      py::arg("rho"), py::arg("dims"), py::arg("keep") = "A");
  m.def(
      "hermitian_eig",
      [](const ComplexMatrix& a) {
        EigResult r = hermitian_eig(a);
        return py::make_tuple(RealVector(r.values), ComplexMatrix(r.vectors));
      },
      py::arg("a"), "eigenvalues (non-increasing) and orthonormal eigenvectors");
  m.def(
      "schmidt_decompose",
      [](const ComplexVector& psi, std::pair<int, int> dims) {
        SchmidtForm f = schmidt_decompose(PureState(psi, split_of(dims)));
        return py::make_tuple(RealVector(f.coefficients), ComplexMatrix(f.basis_a),
                              ComplexMatrix(f.basis_b));
      },
      py::arg("psi"), py::arg("dims"));
  m.def(
      "maximally_entangled",
      [](int m_rank, std::pair<int, int> dims) {
        return ComplexVector(maximally_entangled(m_rank, split_of(dims)).amplitudes());
      },
      py::arg("m"), py::arg("dims"));
  m.def(
      "fidelity",
      [](const ComplexMatrix& rho, const ComplexMatrix& sigma) {
        return fidelity(DensityMatrix(rho), DensityMatrix(sigma));
      },
      py::arg("rho"), py::arg("sigma"));
  m.def(
      "von_neumann_entropy",
      [](const ComplexMatrix& rho) { return von_neumann_entropy(DensityMatrix(rho)); },
      py::arg("rho"), "entropy in nats");
  m.def(
      "relative_entropy",
      [](const ComplexMatrix& rho, const ComplexMatrix& omega) {
        return relative_entropy(DensityMatrix(rho), DensityMatrix(omega));
      },
      py::arg("rho"), py::arg("omega"));
  m.def(
      "purify",
      [](const ComplexMatrix& rho) {
        PureState psi = purify(DensityMatrix(rho));
        const BipartiteSplit s = psi.split_or_throw();
        return py::make_tuple(ComplexVector(psi.amplitudes()),
                              std::make_pair(s.dim_a, s.dim_b));
      },
      py::arg("rho"));

  // spectral projections and trace inequalities
  m.def(
      "positive_part_projector",
      [](const ComplexMatrix& a) {
        return ComplexMatrix(spectra::positive_part_projector(a).matrix);
      },
      py::arg("a"));
  m.def("lemma1_gap", &spectra::lemma1_gap, py::arg("a"), py::arg("b"), py::arg("p"));
  m.def(
      "lemma2_check",
      [](const ComplexMatrix& rho, const ComplexMatrix& omega, int n, double gamma) {
        spectra::Lemma2Result r = spectra::lemma2_check(DensityMatrix(rho), omega,
                                                        n, gamma);
        return py::make_tuple(r.value, r.bound);
      },
      py::arg("rho"), py::arg("omega"), py::arg("n"), py::arg("gamma"));
  m.def("pi_trace", &spectra::pi_trace, py::arg("rho"), py::arg("omega"),
        py::arg("n"), py::arg("gamma"));
  m.def(
      "iid_spectrum",
      [](const RealVector& eigenvalues, int n) {
        spectra::TypeClassSpectrum s = spectra::iid_spectrum(eigenvalues, n);
        return py::make_tuple(s.values, s.multiplicities);
      },
      py::arg("eigenvalues"), py::arg("n"));
  m.def("default_gamma_grid", &spectra::default_gamma_grid);

  m.def(
      "gamma_sweep_iid",
      [](const ComplexMatrix& rho, const ComplexMatrix& omega,
         const std::vector<int>& n_values, const std::vector<double>& grid,
         double epsilon) {
        spectra::GammaSweep sweep =
            spectra::gamma_sweep_iid(DensityMatrix(rho), omega, n_values, grid);
        py::dict out;
        out["mode"] = spectra::to_string(sweep.mode);
        out["gamma_grid"] = sweep.gamma_grid;
        out["n_values"] = sweep.n_values;
        out["f_values"] = sweep.f_values;
        py::list estimates;
        for (const auto& est : spectra::rate_estimate(sweep, epsilon)) {
          estimates.append(estimate_dict(est));
        }
        out["estimates"] = std::move(estimates);
        return out;
      },
      py::arg("rho"), py::arg("omega"), py::arg("n_values"), py::arg("grid"),
      py::arg("epsilon") = 0.05);
  m.def(
      "gamma_sweep_conditional",
      [](const std::vector<double>& probs, const std::vector<ComplexVector>& members,
         std::pair<int, int> dims, const std::vector<int>& n_values,
         const std::vector<double>& grid, double epsilon) {
        ent::CqExtension cq;
        cq.ensemble = make_ensemble(probs, members, dims);
        spectra::GammaSweep sweep = spectra::gamma_sweep_cq_iid(cq, n_values, grid);
        py::dict out;
        out["mode"] = spectra::to_string(sweep.mode);
        out["gamma_grid"] = sweep.gamma_grid;
        out["n_values"] = sweep.n_values;
        out["f_values"] = sweep.f_values;
        py::list estimates;
        for (const auto& est : spectra::rate_estimate(sweep, epsilon)) {
          estimates.append(estimate_dict(est));
        }
        out["estimates"] = std::move(estimates);
        return out;
      },
      py::arg("probs"), py::arg("members"), py::arg("dims"), py::arg("n_values"),
      py::arg("grid"), py::arg("epsilon") = 0.05);

  // entanglement of formation
  m.def(
      "concurrence_two_qubit",
      [](const ComplexMatrix& rho) {
        return ent::concurrence_two_qubit(DensityMatrix(rho, BipartiteSplit{2, 2}));
      },
      py::arg("rho"));
  m.def(
      "eof_two_qubit",
      [](const ComplexMatrix& rho) {
        return ent::eof_two_qubit(DensityMatrix(rho, BipartiteSplit{2, 2}));
      },
      py::arg("rho"), "exact two-qubit entanglement of formation, nats");
  m.def(
      "eof_minimize",
      [](const ComplexMatrix& rho, std::pair<int, int> dims, int member_count,
         int restarts, std::uint64_t seed) {
        return report_dict(ent::eof_minimize(DensityMatrix(rho, split_of(dims)),
                                             member_count, restarts, seed));
      },
      py::arg("rho"), py::arg("dims"), py::arg("member_count") = 0,
      py::arg("restarts") = 20, py::arg("seed") = 0);
  m.def(
      "eof_regularized_estimate",
      [](const ComplexMatrix& rho, std::pair<int, int> dims, int n_max,
         int member_count, int restarts, std::uint64_t seed) {
        ent::MinimizeOptions options;
        options.member_count = member_count;
        options.restarts = restarts;
        options.seed = seed;
        options.max_sweeps = 80;
        return ent::eof_regularized_estimate(DensityMatrix(rho, split_of(dims)),
                                             n_max, options);
      },
      py::arg("rho"), py::arg("dims"), py::arg("n_max"), py::arg("member_count") = 0,
      py::arg("restarts") = 4, py::arg("seed") = 0);
  m.def(
      "cost_proxy_minimize",
      [](const ComplexMatrix& rho, std::pair<int, int> dims, int n, bool iid,
         int member_count, int restarts, std::uint64_t seed, double epsilon) {
        ent::CostProxyOptions options;
        options.member_count = member_count;
        options.restarts = restarts;
        options.seed = seed;
        options.epsilon = epsilon;
        DensityMatrix state(rho, split_of(dims));
        return report_dict(iid ? ent::cost_proxy_minimize_iid(state, n, options)
                               : ent::cost_proxy_minimize_explicit(state, n, options));
      },
      py::arg("rho"), py::arg("dims"), py::arg("n"), py::arg("iid") = true,
      py::arg("member_count") = 0, py::arg("restarts") = 8, py::arg("seed") = 0,
      py::arg("epsilon") = 0.05);

  // dilution
  m.def(
      "simulate_dilution",
      [](const std::vector<double>& probs, const std::vector<ComplexVector>& members,
         std::pair<int, int> dims, int m_rank, const std::string& variant) {
        dilution::DilutionReport r = dilution::simulate_dilution(
            make_ensemble(probs, members, dims), m_rank,
            dilution::variant_from_string(variant));
        py::dict out;
        out["m_rank"] = r.m_rank;
        out["fidelity_sim"] = r.fidelity_sim;
        out["fidelity_formula"] = r.fidelity_formula;
        out["f2_sim"] = r.fidelity_sim * r.fidelity_sim;
        out["f2_formula"] = r.fidelity_formula * r.fidelity_formula;
        out["f2_lower"] = r.lower_bound;
        out["f2_upper"] = r.upper_bound;
        out["variant"] = dilution::to_string(r.variant);
        return out;
      },
      py::arg("probs"), py::arg("members"), py::arg("dims"), py::arg("m"),
      py::arg("variant") = "orthogonal-flag");
  m.def(
      "dilution_fidelity_formula",
      [](const std::vector<double>& probs, const std::vector<ComplexVector>& members,
         std::pair<int, int> dims, int m_rank) {
        return dilution::dilution_fidelity_formula(
            make_ensemble(probs, members, dims), m_rank);
      },
      py::arg("probs"), py::arg("members"), py::arg("dims"), py::arg("m"));
  m.def(
      "achievability_curve_iid",
      [](const std::vector<double>& probs, const std::vector<ComplexVector>& members,
         std::pair<int, int> dims, const std::vector<double>& rates,
         const std::vector<int>& n_values) {
        py::list out;
        for (const auto& p : dilution::achievability_curve_iid(
                 make_ensemble(probs, members, dims), rates, n_values)) {
          py::dict row;
          row["n"] = p.n;
          row["rate_nats"] = p.rate_nats;
          row["m_rank"] = p.m_rank;
          row["f2"] = p.f2;
          row["f2_lower"] = p.f2_lower;
          row["f2_upper"] = p.f2_upper;
          out.append(std::move(row));
        }
        return out;
      },
      py::arg("probs"), py::arg("members"), py::arg("dims"), py::arg("rates"),
      py::arg("n_values"));
  m.def(
      "converse_bound",
      [](const std::vector<double>& probs, const std::vector<ComplexVector>& members,
         std::pair<int, int> dims, double gamma, double rate, int n, bool iid) {
        ent::CqExtension cq;
        cq.ensemble = make_ensemble(probs, members, dims);
        return iid ? dilution::converse_bound_iid(cq, gamma, rate, n)
                   : dilution::converse_bound(cq, gamma, rate, n);
      },
      py::arg("probs"), py::arg("members"), py::arg("dims"), py::arg("gamma"),
      py::arg("rate"), py::arg("n"), py::arg("iid") = true);

  // deterministic random states (handy for smoke tests)
  m.def(
      "random_density",
      [](int d, std::uint64_t seed) {
        Rng rng(seed);
        return ComplexMatrix(random_density(rng, d).matrix());
      },
      py::arg("d"), py::arg("seed") = 0);
  m.def(
      "random_pure",
      [](int d, std::uint64_t seed) {
        Rng rng(seed);
        return ComplexVector(random_pure(rng, d).amplitudes());
      },
      py::arg("d"), py::arg("seed") = 0);
}
