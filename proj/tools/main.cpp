// entspec — command-line front end: state fixtures, lemma sweeps, spectral
// rate estimation, entanglement-of-formation search, dilution simulation and
// bounds. Deterministic outputs for a fixed (arguments, seed) pair.
#include "entspec/dilution.hpp"
#include "entspec/ensemble.hpp"
#include "entspec/eof.hpp"
#include "entspec/json_io.hpp"
#include "entspec/qcore.hpp"
#include "entspec/rng.hpp"
#include "entspec/spectra.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace entspec;
using nlohmann::json;

constexpr double kLn2 = 0.6931471805599453;

struct GridOptions {
  double gamma_min = -2.0;
  double gamma_max = 2.0;
  double gamma_step = 0.01;

  std::vector<double> grid() const {
    detail::require(gamma_step > 0.0 && gamma_max >= gamma_min, "args",
                    "invalid gamma grid");
    const int count = static_cast<int>(std::floor((gamma_max - gamma_min) /
                                                  gamma_step + 1e-9)) + 1;
    detail::require(count >= 1 && count <= 1000000, "args",
                    "gamma grid too large");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(gamma_min + i * gamma_step);
    return out;
  }
};

DensityMatrix werner_state(double p) {
  detail::require(p >= 0.0 && p <= 1.0, "args", "Werner parameter outside [0, 1]");
  ComplexVector singlet = ComplexVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  ComplexMatrix m = p * (singlet * singlet.adjoint()) +
                    (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
  return DensityMatrix(m, BipartiteSplit{2, 2});
}

int run_fixture(const std::string& kind, const std::string& output,
                std::uint64_t seed, double p, int da, int db) {
  Rng rng(seed);
  json j;
  if (kind == "bell") {
    j = io::to_json(maximally_entangled(2, {2, 2}).to_density());
  } else if (kind == "werner") {
    j = io::to_json(werner_state(p));
  } else if (kind == "random-mixed") {
    j = io::to_json(random_density(rng, da * db, BipartiteSplit{da, db}));
  } else if (kind == "random-pure") {
    j = io::to_json(random_pure(rng, da * db, BipartiteSplit{da, db}));
  } else if (kind == "product") {
    PureState a = random_pure(rng, da);
    PureState b = random_pure(rng, db);
    j = io::to_json(PureState(tensor_product(a.amplitudes(), b.amplitudes()),
                              BipartiteSplit{da, db}));
  } else {
    throw Error("args", "unknown fixture kind: " + kind);
  }
  io::save_json_file(output, j);
  return 0;
}

int run_lemma_check(const std::string& output, std::uint64_t seed, int draws,
                    int dmax) {
  detail::require(draws >= 1, "args", "need at least one draw");
  detail::require(dmax >= 2 && dmax <= 16, "args", "dmax must lie in [2, 16]");
  io::CsvWriter csv(output);
  csv.header({"lemma", "draw", "d", "n", "gamma_nats", "value", "bound", "gap",
              "ok"});
  Rng base(seed);
  bool all_ok = true;
  {
    Rng rng = base.derive(1);
    for (int draw = 0; draw < draws; ++draw) {
      const int d = rng.uniform_int(2, dmax);
      ComplexMatrix a = random_hermitian(rng, d);
      ComplexMatrix b = random_hermitian(rng, d);
      ComplexMatrix p = random_contraction(rng, d);
      const double tried = (p * (a - b)).trace().real();
      const double gap = spectra::lemma1_gap(a, b, p);
      const bool ok = gap >= -1e-9;
      all_ok = all_ok && ok;
      csv.field(1);
      csv.field(draw);
      csv.field(d);
      csv.field(std::string());
      csv.field(std::string());
      csv.field(tried);
      csv.field(tried + gap);
      csv.field(gap);
      csv.field(ok ? 1 : 0);
      csv.end_row();
    }
  }
  {
    Rng rng = base.derive(2);
    for (int draw = 0; draw < draws; ++draw) {
      const int d = rng.uniform_int(2, dmax);
      DensityMatrix rho = random_density(rng, d);
      ComplexMatrix omega = random_psd(rng, d);
      const int n = rng.uniform_int(1, 3);
      const double gamma = -1.0 + 2.0 * rng.uniform();
      spectra::Lemma2Result r = spectra::lemma2_check(rho, omega, n, gamma);
      const bool ok = r.value <= r.bound + 1e-9;
      all_ok = all_ok && ok;
      csv.field(2);
      csv.field(draw);
      csv.field(d);
      csv.field(n);
      csv.field(gamma);
      csv.field(r.value);
      csv.field(r.bound);
      csv.field(r.bound - r.value);
      csv.field(ok ? 1 : 0);
      csv.end_row();
    }
  }
  return all_ok ? 0 : 2;
}

int run_spectral_rate(const std::string& input, const std::string& omega_path,
                      const std::string& mode, const std::vector<int>& n_values,
                      const GridOptions& grid_options, double epsilon, bool bits,
                      const std::string& output) {
  io::LoadedState state = io::load_state_file(input);
  const std::vector<double> grid = grid_options.grid();
  spectra::GammaSweep sweep;
  if (mode == "divergence") {
    DensityMatrix rho = state.as_density();
    ComplexMatrix omega;
    if (omega_path.empty()) {
      omega = ComplexMatrix::Identity(rho.dim(), rho.dim()) / rho.dim();
    } else {
      omega = io::load_state_file(omega_path).as_density().matrix();
    }
    sweep = spectra::gamma_sweep_iid(rho, omega, n_values, grid);
  } else if (mode == "conditional") {
    ent::CqExtension cq;
    cq.ensemble = state.as_ensemble();
    sweep = spectra::gamma_sweep_cq_iid(cq, n_values, grid);
  } else {
    throw Error("args", "unknown sweep mode: " + mode);
  }

  io::CsvWriter csv(output);
  csv.header({"n", "gamma_nats", "f_value"});
  for (std::size_t ni = 0; ni < sweep.n_values.size(); ++ni) {
    for (std::size_t gi = 0; gi < sweep.gamma_grid.size(); ++gi) {
      csv.field(sweep.n_values[ni]);
      csv.field(sweep.gamma_grid[gi]);
      csv.field(sweep.f_values[ni][gi]);
      csv.end_row();
    }
  }

  std::vector<spectra::RateEstimate> estimates =
      spectra::rate_estimate(sweep, epsilon);
  json j = io::rate_estimates_to_json(estimates, sweep.mode);
  if (bits) {
    for (auto& row : j["estimates"]) {
      row["gamma_low_bits"] = row["gamma_low"].get<double>() / kLn2;
      row["gamma_high_bits"] = row["gamma_high"].get<double>() / kLn2;
      row["midpoint_bits"] = row["midpoint"].get<double>() / kLn2;
    }
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_eof(const std::string& input, int members, int restarts,
            std::uint64_t seed, const std::string& output) {
  DensityMatrix rho = io::load_state_file(input).as_density();
  detail::require(rho.split().has_value(), "dimension",
                  "eof needs a bipartite state (dims [d_a, d_b])");
  ent::MinimizeOptions options;
  options.member_count = members;
  options.restarts = restarts;
  options.seed = seed;
  ent::EntanglementReport report = ent::eof_minimize(rho, options);
  io::save_json_file(output, io::report_to_json(report));
  return 0;
}

int run_eof_reg(const std::string& input, int n_max, int members, int restarts,
                std::uint64_t seed, const std::string& output) {
  DensityMatrix rho = io::load_state_file(input).as_density();
  detail::require(rho.split().has_value(), "dimension",
                  "eof-reg needs a bipartite state (dims [d_a, d_b])");
  ent::MinimizeOptions options;
  options.member_count = members;
  options.restarts = restarts;
  options.seed = seed;
  options.max_sweeps = 80;
  auto curve = ent::eof_regularized_estimate(rho, n_max, options);
  io::CsvWriter csv(output);
  csv.header({"n", "eof_per_copy_nats", "eof_per_copy_bits"});
  for (const auto& [n, value] : curve) {
    csv.field(n);
    csv.field(value);
    csv.field(value / kLn2);
    csv.end_row();
  }
  return 0;
}

int run_dilution_sim(const std::string& input, int m, const std::string& variant,
                     const std::string& output) {
  ent::Ensemble ensemble = io::load_state_file(input).as_ensemble();
  dilution::DilutionReport report = dilution::simulate_dilution(
      ensemble, m, dilution::variant_from_string(variant));
  io::save_json_file(output, io::report_to_json(report, 1));
  return 0;
}

int run_dilution_curve(const std::string& input, const std::vector<double>& rates,
                       const std::vector<int>& n_values, bool bits,
                       const std::string& output) {
  ent::Ensemble ensemble = io::load_state_file(input).as_ensemble();
  std::vector<double> rates_nats = rates;
  if (bits) {
    for (double& r : rates_nats) r *= kLn2;
  }
  auto curve = dilution::achievability_curve_iid(ensemble, rates_nats, n_values);
  io::CsvWriter csv(output);
  csv.header({"n", "rate_nats", "rate_bits", "m_rank", "f2_sim", "f2_formula",
              "f2_lower", "f2_upper", "variant"});
  for (const auto& point : curve) {
    csv.field(point.n);
    csv.field(point.rate_nats);
    csv.field(point.rate_nats / kLn2);
    csv.field(point.m_rank);
    csv.field(std::string());  // no protocol simulated on curve rows
    csv.field(point.f2);
    csv.field(point.f2_lower);
    csv.field(point.f2_upper);
    csv.field(std::string());
    csv.end_row();
  }
  return 0;
}

int run_converse(const std::string& input, const std::vector<double>& rates,
                 const std::vector<int>& n_values, const GridOptions& grid_options,
                 bool bits, const std::string& output) {
  ent::CqExtension cq;
  cq.ensemble = io::load_state_file(input).as_ensemble();
  std::vector<double> rates_nats = rates;
  if (bits) {
    for (double& r : rates_nats) r *= kLn2;
  }
  const std::vector<double> grid = grid_options.grid();
  io::CsvWriter csv(output);
  csv.header({"n", "rate_nats", "rate_bits", "gamma_nats", "f_value", "bound"});
  for (int n : n_values) {
    for (double rate : rates_nats) {
      for (double gamma : grid) {
        const double f = spectra::cq_conditional_pi_trace_iid(cq, gamma, n);
        csv.field(n);
        csv.field(rate);
        csv.field(rate / kLn2);
        csv.field(gamma);
        csv.field(f);
        csv.field(f + std::exp(-n * (gamma - rate)));
        csv.end_row();
      }
    }
  }
  return 0;
}

int run_cost_proxy(const std::string& input, int n, int members, int restarts,
                   std::uint64_t seed, double epsilon, bool explicit_level,
                   const GridOptions& grid_options, const std::string& output) {
  DensityMatrix rho = io::load_state_file(input).as_density();
  detail::require(rho.split().has_value(), "dimension",
                  "cost-proxy needs a bipartite state (dims [d_a, d_b])");
  ent::CostProxyOptions options;
  options.member_count = members;
  options.restarts = restarts;
  options.seed = seed;
  options.epsilon = epsilon;
  options.gamma_grid = grid_options.grid();
  ent::EntanglementReport report =
      explicit_level ? ent::cost_proxy_minimize_explicit(rho, n, options)
                     : ent::cost_proxy_minimize_iid(rho, n, options);
  json j = io::report_to_json(report);
  j["n"] = n;
  j["sequence"] = explicit_level ? "explicit" : "iid";
  j["epsilon"] = epsilon;
  io::save_json_file(output, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information-spectrum entanglement-cost toolkit"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string omega_path;
  std::string kind;
  std::string variant = "orthogonal-flag";
  std::string mode = "divergence";
  std::uint64_t seed = 0;
  int draws = 1000;
  int dmax = 16;
  int members = 0;
  int restarts = 20;
  int m_rank = 1;
  int n_single = 1;
  bool bits = false;
  bool explicit_level = false;
  double epsilon = 0.05;
  double werner_p = 0.5;
  int da = 2;
  int db = 2;
  std::vector<int> n_values;
  std::vector<double> rates;
  GridOptions grid;

  auto add_grid = [&](CLI::App* cmd) {
    cmd->add_option("--gamma-min", grid.gamma_min, "grid start, nats");
    cmd->add_option("--gamma-max", grid.gamma_max, "grid end, nats");
    cmd->add_option("--gamma-step", grid.gamma_step, "grid step, nats");
  };

  CLI::App* fixture = app.add_subcommand("fixture", "emit a JSON state file");
  fixture->add_option("--kind", kind,
                      "bell | werner | random-mixed | random-pure | product")
      ->required();
  fixture->add_option("--output", output)->required();
  fixture->add_option("--seed", seed);
  fixture->add_option("--p", werner_p, "Werner mixing parameter");
  fixture->add_option("--da", da);
  fixture->add_option("--db", db);

  CLI::App* lemma = app.add_subcommand(
      "lemma-check", "random-draw suites for the two trace inequalities");
  lemma->add_option("--output", output)->required();
  lemma->add_option("--seed", seed);
  lemma->add_option("--draws", draws);
  lemma->add_option("--dmax", dmax);

  CLI::App* rate = app.add_subcommand(
      "spectral-rate", "finite-n spectral divergence / conditional entropy sweep");
  rate->add_option("--input", input)->required();
  rate->add_option("--omega", omega_path, "second state (divergence mode)");
  rate->add_option("--mode", mode, "divergence | conditional");
  rate->add_option("--n", n_values, "copy counts")->required()->delimiter(',');
  rate->add_option("--epsilon", epsilon);
  rate->add_flag("--bits", bits, "report rate estimates in bits too");
  rate->add_option("--output", output, "sweep CSV path")->required();
  add_grid(rate);

  CLI::App* eof = app.add_subcommand("eof", "entanglement of formation search");
  eof->add_option("--input", input)->required();
  eof->add_option("--output", output)->required();
  eof->add_option("--members", members, "cq flag dimension (0: rank^2)");
  eof->add_option("--restarts", restarts);
  eof->add_option("--seed", seed);

  CLI::App* eof_reg = app.add_subcommand(
      "eof-reg", "per-copy entanglement of formation of tensor powers");
  eof_reg->add_option("--input", input)->required();
  eof_reg->add_option("--output", output)->required();
  eof_reg->add_option("--n", n_single, "largest tensor power")->required();
  eof_reg->add_option("--members", members);
  eof_reg->add_option("--restarts", restarts);
  eof_reg->add_option("--seed", seed);

  CLI::App* sim = app.add_subcommand("dilution-sim",
                                     "exact dilution protocol simulation");
  sim->add_option("--input", input)->required();
  sim->add_option("--output", output)->required();
  sim->add_option("--m", m_rank, "resource Schmidt rank")->required();
  sim->add_option("--variant", variant, "orthogonal-flag | weyl-teleport");

  CLI::App* curve = app.add_subcommand(
      "dilution-curve", "achievable fidelity over (n, rate) for i.i.d. targets");
  curve->add_option("--input", input)->required();
  curve->add_option("--output", output)->required();
  curve->add_option("--rates", rates, "rates (nats unless --bits)")->required()->delimiter(',');
  curve->add_option("--n", n_values, "copy counts")->required()->delimiter(',');
  curve->add_flag("--bits", bits, "rates are given in bits");

  CLI::App* conv = app.add_subcommand("converse",
                                      "weak-converse fidelity bound sweep");
  conv->add_option("--input", input)->required();
  conv->add_option("--output", output)->required();
  conv->add_option("--rates", rates, "rates (nats unless --bits)")->required()->delimiter(',');
  conv->add_option("--n", n_values, "copy counts")->required()->delimiter(',');
  conv->add_flag("--bits", bits, "rates are given in bits");
  add_grid(conv);

  CLI::App* proxy = app.add_subcommand(
      "cost-proxy", "finite-n entanglement-cost proxy minimization");
  proxy->add_option("--input", input)->required();
  proxy->add_option("--output", output)->required();
  proxy->add_option("--n", n_single, "copy count")->required();
  proxy->add_option("--members", members);
  proxy->add_option("--restarts", restarts);
  proxy->add_option("--seed", seed);
  proxy->add_option("--epsilon", epsilon);
  proxy->add_flag("--explicit", explicit_level,
                  "treat the input as the n-th state itself");
  add_grid(proxy);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (fixture->parsed()) return run_fixture(kind, output, seed, werner_p, da, db);
    if (lemma->parsed()) return run_lemma_check(output, seed, draws, dmax);
    if (rate->parsed()) {
      return run_spectral_rate(input, omega_path, mode, n_values, grid, epsilon,
                               bits, output);
    }
    if (eof->parsed()) return run_eof(input, members, restarts, seed, output);
    if (eof_reg->parsed()) {
      return run_eof_reg(input, n_single, members, restarts, seed, output);
    }
    if (sim->parsed()) return run_dilution_sim(input, m_rank, variant, output);
    if (curve->parsed()) {
      return run_dilution_curve(input, rates, n_values, bits, output);
    }
    if (conv->parsed()) {
      return run_converse(input, rates, n_values, grid, bits, output);
    }
    if (proxy->parsed()) {
      return run_cost_proxy(input, n_single, members, restarts, seed, epsilon,
                            explicit_level, grid, output);
    }
    throw Error("args", "no command selected");
  } catch (const Error& e) {
    nlohmann::json record = {{"code", e.code()},
                             {"message", e.what()},
                             {"context", command}};
    std::cerr << record.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json record = {{"code", "internal"},
                             {"message", e.what()},
                             {"context", command}};
    std::cerr << record.dump() << '\n';
    return 1;
  }
}
