#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/bridge/potential.hpp"
#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/csv.hpp"
#include "symbridge/measure/measure.hpp"
#include "symbridge/runner/config.hpp"
#include "symbridge/runner/report.hpp"

namespace symbridge::runner {

// Runs the configured experiment, writes its data files and report.json into
// out_dir, and returns the report. Failures inside a check are recorded as
// failed checks; independent checks still run.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Closed-form bottom eigenvalue of -Laplacian + W for boxes and harmonic traps.
std::optional<double> analytic_lambda(const TrapPotential& W);
// Closed-form L2-normalized ground state on the grid nodes, when known.
std::optional<std::vector<double>> analytic_ground_state(const TrapPotential& W, const Grid& grid);

// K_eff(i,j) m(i) m(j): the kernel on node masses used by the fixed-marginal solver.
linalg::Matrix mass_kernel(const linalg::Matrix& k_eff, const DiscreteMeasure& m);

// Smooth bounded test function: sum_k a_k sin(k pi (x - lower)/L + c_k) per axis.
std::vector<double> random_smooth_function(const Grid& grid, std::uint64_t seed, std::uint64_t index);

// Nodes of a grid function as "x0[,x1],<name>" rows.
void write_grid_function(const std::filesystem::path& path, const Grid& grid, const std::vector<double>& values,
                         const std::string& name, const csv::Metadata& meta = {});

}  // namespace symbridge::runner
