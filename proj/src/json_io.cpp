#include "entspec/json_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace entspec::io {

using entspec::detail::require;

namespace {

json complex_entry(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex read_complex(const json& j) {
  require(j.is_array() && j.size() == 2, "parse",
          "matrix entries must be [re, im] pairs");
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  require(std::isfinite(re) && std::isfinite(im), "parse",
          "state file contains NaN/Inf");
  return {re, im};
}

std::optional<BipartiteSplit> split_from_dims(const json& dims, int total) {
  require(dims.is_array() && (dims.size() == 1 || dims.size() == 2), "parse",
          "\"dims\" must be [d] or [d_a, d_b]");
  if (dims.size() == 1) {
    require(dims[0].get<int>() == total, "parse", "\"dims\" does not match data");
    return std::nullopt;
  }
  const BipartiteSplit split{dims[0].get<int>(), dims[1].get<int>()};
  require(split.dim_a >= 1 && split.dim_b >= 1 && split.dim() == total, "parse",
          "\"dims\" does not match data");
  return split;
}

json dims_of(int dim, const std::optional<BipartiteSplit>& split) {
  if (split) return json::array({split->dim_a, split->dim_b});
  return json::array({dim});
}

json matrix_data(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_entry(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_data(const ComplexVector& v) {
  json row = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(complex_entry(v(i)));
  return row;
}

ComplexVector read_vector(const json& data) {
  require(data.is_array() && !data.empty(), "parse", "\"data\" must be an array");
  ComplexVector v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = read_complex(data[i]);
  }
  return v;
}

ComplexMatrix read_matrix(const json& data) {
  require(data.is_array() && !data.empty(), "parse", "\"data\" must be an array");
  const auto rows = data.size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    require(data[i].is_array() && data[i].size() == rows, "parse",
            "\"data\" must be a square nested array");
    for (std::size_t j = 0; j < rows; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          read_complex(data[i][j]);
    }
  }
  return m;
}

}  // namespace

json to_json(const DensityMatrix& rho) {
  return json{{"kind", "density"},
              {"dims", dims_of(rho.dim(), rho.split())},
              {"data", matrix_data(rho.matrix())}};
}

json to_json(const PureState& psi) {
  return json{{"kind", "pure"},
              {"dims", dims_of(psi.dim(), psi.split())},
              {"data", vector_data(psi.amplitudes())}};
}

json to_json(const ent::Ensemble& ensemble) {
  ensemble.validate();
  json members = json::array();
  for (const PureState& m : ensemble.members) {
    members.push_back(vector_data(m.amplitudes()));
  }
  const BipartiteSplit split = ensemble.split();
  return json{{"kind", "ensemble"},
              {"dims", json::array({split.dim_a, split.dim_b})},
              {"probs", ensemble.probabilities},
              {"data", std::move(members)}};
}

DensityMatrix LoadedState::as_density() const {
  switch (kind) {
    case Kind::Density:
      return *density;
    case Kind::Pure:
      return pure->to_density();
    case Kind::Ensemble:
      return ensemble->mixture();
  }
  throw Error("parse", "unknown state kind");
}

ent::Ensemble LoadedState::as_ensemble() const {
  switch (kind) {
    case Kind::Density:
      return ent::eigendecomposition_ensemble(*density);
    case Kind::Pure: {
      ent::Ensemble single;
      single.probabilities = {1.0};
      single.members = {*pure};
      return single;
    }
    case Kind::Ensemble:
      return *ensemble;
  }
  throw Error("parse", "unknown state kind");
}

LoadedState state_from_json(const json& j) {
  require(j.is_object(), "parse", "state file must hold a JSON object");
  require(j.contains("kind") && j.contains("dims") && j.contains("data"), "parse",
          "state object needs \"kind\", \"dims\", \"data\"");
  const std::string kind = j["kind"].get<std::string>();
  LoadedState out;
  if (kind == "density") {
    out.kind = LoadedState::Kind::Density;
    ComplexMatrix m = read_matrix(j["data"]);
    out.density = DensityMatrix(m, split_from_dims(j["dims"], static_cast<int>(m.rows())));
  } else if (kind == "pure") {
    out.kind = LoadedState::Kind::Pure;
    ComplexVector v = read_vector(j["data"]);
    out.pure = PureState(v, split_from_dims(j["dims"], static_cast<int>(v.size())));
  } else if (kind == "ensemble") {
    out.kind = LoadedState::Kind::Ensemble;
    require(j.contains("probs"), "parse", "ensemble state needs \"probs\"");
    ent::Ensemble ensemble;
    for (const auto& p : j["probs"]) {
      const double value = p.get<double>();
      require(std::isfinite(value), "parse", "state file contains NaN/Inf");
      ensemble.probabilities.push_back(value);
    }
    require(j["data"].is_array() && j["data"].size() == ensemble.probabilities.size(),
            "parse", "ensemble \"data\" must list one vector per probability");
    for (const auto& row : j["data"]) {
      ComplexVector v = read_vector(row);
      ensemble.members.emplace_back(
          v, split_from_dims(j["dims"], static_cast<int>(v.size())));
    }
    ensemble.validate();
    out.ensemble = std::move(ensemble);
  } else {
    throw Error("parse", "unknown state kind: " + kind);
  }
  return out;
}

LoadedState load_state_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "parse", "cannot open input file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("parse", std::string("invalid JSON: ") + e.what());
  }
  return state_from_json(j);
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "parse", "cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

json report_to_json(const ent::EntanglementReport& report) {
  return json{{"value_nats", report.value_nats},
              {"value_bits", report.value_nats / std::log(2.0)},
              {"member_count", report.witness.size()},
              {"restarts_used", report.restarts_used},
              {"converged", report.converged},
              {"witness", to_json(report.witness)}};
}

json report_to_json(const dilution::DilutionReport& report, int n) {
  return json{{"n", n},
              {"m_rank", report.m_rank},
              {"rate_nats", report.rate_nats / n},
              {"rate_bits", report.rate_nats / n / std::log(2.0)},
              {"f2_sim", report.fidelity_sim * report.fidelity_sim},
              {"fidelity_sim", report.fidelity_sim},
              {"f2_formula", report.fidelity_formula * report.fidelity_formula},
              {"fidelity_formula", report.fidelity_formula},
              {"f2_lower", report.lower_bound},
              {"f2_upper", report.upper_bound},
              {"variant", dilution::to_string(report.variant)}};
}

json rate_estimates_to_json(const std::vector<spectra::RateEstimate>& estimates,
                            spectra::SweepMode mode) {
  json rows = json::array();
  for (const auto& est : estimates) {
    rows.push_back(json{{"n", est.n},
                        {"gamma_low", est.gamma_low},
                        {"gamma_high", est.gamma_high},
                        {"midpoint", est.midpoint},
                        {"epsilon", est.epsilon},
                        {"low_open", est.low_open},
                        {"high_open", est.high_open},
                        {"midpoint_open", est.midpoint_open}});
  }
  return json{{"mode", spectra::to_string(mode)}, {"estimates", std::move(rows)}};
}

std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

struct CsvWriter::Impl {
  std::ofstream out;
  bool row_started = false;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  require(impl_->out.good(), "parse", "cannot open output file: " + path);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << columns[i];
  }
  impl_->out << '\n';
}

void CsvWriter::field(const std::string& value) {
  if (impl_->row_started) impl_->out << ',';
  impl_->out << value;
  impl_->row_started = true;
}

void CsvWriter::field(double value) { field(format_double(value)); }

void CsvWriter::field(int value) { field(std::to_string(value)); }

void CsvWriter::end_row() {
  impl_->out << '\n';
  impl_->row_started = false;
}

}  // namespace entspec::io
