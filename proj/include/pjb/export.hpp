#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "pjb/metric.hpp"
#include "pjb/model.hpp"
#include "pjb/phase.hpp"
#include "pjb/pseudospectrum.hpp"
#include "pjb/spectral.hpp"

namespace pjb {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// 17 significant digits, '.' decimal point.
std::string format_double(double x);

json matrix_json(const LatticeOperator& q);
std::string matrix_csv(const LatticeOperator& q);

json sweep_json(const SweepResult& sr, int n, const Word& w);
std::string sweep_csv(const SweepResult& sr);

json classification_json(const LatticeOperator& q, const Spectrum& s, const SpectrumClassification& cls);
std::string classification_csv(const Spectrum& s, const SpectrumClassification& cls);

std::string field_csv(const ResolventField& f);
json pseudospectrum_json(const ResolventField& f, const Spectrum& s, const ComponentReport& rep);
json contours_json(const ResolventField& f, std::span<const ContourLevel> levels);

json metric_json(const LatticeOperator& q, const MetricSolution& m, const HermitizationResult* h = nullptr);
std::string metric_csv(const MetricSolution& m);

json phase_table_json(std::span<const PhaseTableRow> rows);
std::string phase_table_csv(std::span<const PhaseTableRow> rows);

json reduced_model_json(const LatticeOperator& q, const ReducedModel& rm, const HermitizationResult* h = nullptr);
std::string reduced_model_csv(const ReducedModel& rm);

/// Row-major real and imaginary parts under `<key>` and `<key>_imag`.
void put_matrix(json& out, const std::string& key, const Eigen::MatrixXcd& m);

}  // namespace pjb
