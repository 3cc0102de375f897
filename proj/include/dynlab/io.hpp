#pragma once

#include <filesystem>
#include <string>

#include "dynlab/ensemble.hpp"
#include "dynlab/rescale.hpp"

namespace dynlab {

// Full round-trip precision ("%.17g") so re-runs are byte-identical.
std::string format_double(double v);

// header: t,y_1..y_d,c_1..c_d ; one row per recorded grid point.
void write_trajectory_csv(const std::filesystem::path& file,
                          std::span<const double> grid,
                          std::span<const double> states, int dim);

// long format: t,metric,value
void write_metrics_csv(const std::filesystem::path& file, const MetricSeries& series);

// t,metric,mean,sd,ci_lo,ci_hi
void write_ensemble_csv(const std::filesystem::path& file, const EnsembleStats& stats);

// s,position_error,velocity_error
void write_equivalence_csv(const std::filesystem::path& file,
                           const EquivalenceReport& report);

MetricSeries read_metrics_csv(const std::filesystem::path& file);
// Returns the per-metric mean series of an ensemble CSV.
MetricSeries read_ensemble_mean_csv(const std::filesystem::path& file);

void write_text_file(const std::filesystem::path& file, const std::string& text);

} // namespace dynlab
