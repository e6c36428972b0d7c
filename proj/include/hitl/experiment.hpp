#pragma once

#include "hitl/config.hpp"

namespace hitl {

// Runs the configured experiment and writes its artifacts under
// config.out_dir. Single-model modes produce trials.csv + summary.json;
// reward-map adds surface.csv + surface_meta.json; supervise additionally
// writes run.csv and the three SVG panels (gain trajectory over the surface,
// p0 series, p-bar series). Throws DegenerateSurfaceError when no grid cell
// ever decides correctly.
void run_experiment(const ExperimentConfig& config);

}  // namespace hitl
