// json_io.hpp — the JSON state format and report serialization.
//
// State files are objects with fields
//   "kind": "density" | "pure" | "ensemble"
//   "dims": [d_a, d_b] or [d]
//   "data": nested arrays of [re, im] pairs, row-major
// ensembles additionally carry "probs". Readers reject NaN/Inf.
#pragma once

#include "entspec/dilution.hpp"
#include "entspec/ensemble.hpp"
#include "entspec/eof.hpp"
#include "entspec/qcore.hpp"
#include "entspec/spectra.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace entspec::io {

using json = nlohmann::json;

json to_json(const DensityMatrix& rho);
json to_json(const PureState& psi);
json to_json(const ent::Ensemble& ensemble);

struct LoadedState {
  enum class Kind { Density, Pure, Ensemble };
  Kind kind;
  std::optional<DensityMatrix> density;
  std::optional<PureState> pure;
  std::optional<ent::Ensemble> ensemble;

  // Any kind viewed as a density matrix (ensembles mix, pure states project).
  DensityMatrix as_density() const;
  // Density inputs become their eigendecomposition ensembles.
  ent::Ensemble as_ensemble() const;
};

LoadedState state_from_json(const json& j);
LoadedState load_state_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

json report_to_json(const ent::EntanglementReport& report);
json report_to_json(const dilution::DilutionReport& report, int n);
json rate_estimates_to_json(const std::vector<spectra::RateEstimate>& estimates,
                            spectra::SweepMode mode);

// Doubles rendered with 17 significant digits ('.' decimal, no locale).
std::string format_double(double x);

// Minimal deterministic CSV writer.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& columns);
  void field(const std::string& value);
  void field(double value);
  void field(int value);
  void end_row();

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace entspec::io
