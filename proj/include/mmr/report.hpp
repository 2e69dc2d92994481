#pragma once

#include <string>

#include "mmr/baseline.hpp"
#include "mmr/control.hpp"
#include "mmr/regret.hpp"

namespace mmr {

/// "# generated <UTC time>\n", or empty when disabled. Only text and SVG
/// outputs carry it; CSV files are always byte-stable.
std::string timestamp_line(bool enabled, const std::string& comment = "#");

/// Annual samples of B, A, E, T and the no-abatement stock up to `horizon`.
std::string solution_csv(const OptimalSolution& solution,
                         const ScenarioConfig& scenario, double horizon = 500.0);

/// Full-precision matrix; last row holds each policy's maximum regret.
std::string regret_matrix_csv(const RegretMatrix& matrix, double scale = 1.0);

/// Three-decimal layout in three parts (14, 14, 15 policy columns), each
/// closed by a Max Regret row. The MMR column is marked with '*'.
std::string regret_table_text(const RegretMatrix& matrix, double scale,
                              const std::string& stamp);

/// Heatmap: white at zero, saturated red at the matrix maximum, rows and
/// columns in table order.
std::string regret_heatmap_svg(const RegretMatrix& matrix,
                               const std::string& stamp);

std::string sweep_csv(const SweepReport& report, double scale = 1.0);

/// Two aligned tables: MMR choice per (alpha, beta), then the peak
/// temperature under the hottest model and the years until it is reached.
std::string sweep_text(const SweepReport& report, double scale,
                       const std::string& stamp);

std::string fit_report_text(const BaselineFit& fit, const EmissionsSeries& series,
                            const std::string& stamp);

}  // namespace mmr
