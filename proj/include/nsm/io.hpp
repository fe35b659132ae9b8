#pragma once

// File formats.
//
//   samples CSV     header `tau_years,rate`
//   forward CSV     header `tau_years,forward_rate`
//   ensemble CSV    header `path_id,t_years,rate`
//   curve JSON      {"basis":[{"kind":"exp_decay","rate":0.5},...],"coefficients":[...]}
//   model JSON      {"model":"ho_lee"|"hull_white","sigma":..,"a":..,
//                    "initial_curve":{"z1":..,"z2":..,"z3":..,"lambda":..}}
//
// Written CSV files start with a `# format_version: 1` comment line and
// written JSON objects carry "format_version": 1. Readers skip `#` lines and
// ignore unknown JSON keys. Numbers are written in shortest round-trip form.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nsm/consistency.hpp"
#include "nsm/curves.hpp"
#include "nsm/models.hpp"
#include "nsm/simulation.hpp"
#include "json.hpp"

namespace nsm {

inline constexpr int kFormatVersion = 1;

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// Throws InputError with "row R, column C" diagnostics (1-based, header is row 1).
std::vector<Sample> read_samples_csv(std::istream& in);
void write_samples_csv(std::ostream& out, std::span<const Sample> samples);

void write_forward_csv(std::ostream& out, const CurveInBasis& curve, std::span<const double> tau_grid);
void write_ensemble_csv(std::ostream& out, std::span<const ShortRatePath> paths);

nlohmann::json basis_to_json(const FactorBasis& basis);
FactorBasis basis_from_json(const nlohmann::json& j);

nlohmann::json curve_to_json(const CurveInBasis& curve);
CurveInBasis curve_from_json(const nlohmann::json& j);

nlohmann::json ns_params_to_json(const NelsonSiegelParams& params);
NelsonSiegelParams ns_params_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ShortRateModel& model);
// InputError for schema violations; model constructors may throw
// std::invalid_argument or DegenerateParametersError.
ShortRateModel model_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ConsistencyReport& report);
nlohmann::json mc_to_json(const McEstimate& estimate);

}  // namespace nsm
