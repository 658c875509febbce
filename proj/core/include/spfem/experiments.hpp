#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spfem/config.hpp"
#include "spfem/fem.hpp"
#include "spfem/report.hpp"

namespace spfem {

/// Smooth function vanishing on the boundary of the polygon: a product of
/// sines on axis-aligned rectangles, otherwise the product of the distances
/// to the edge lines scaled to 1 at the vertex centroid.
struct TestFunction {
  std::string name;
  ScalarField value;
  VectorField gradient;
};

TestFunction reference_function(const ConvexPolygon& polygon);

/// Coarsest mesh from config.coarse_h followed by `count - 1` red refinements.
std::vector<MeshPtr> mesh_family(const ExperimentConfig& config, int count);

/// For each triangle of `fine`, the triangle of `coarse` containing its barycenter.
std::vector<std::size_t> parent_triangles(const Mesh& fine, const Mesh& coarse);

ExperimentReport run_ap_sweep(const ExperimentConfig& config);
ExperimentReport run_stability_sweep(const ExperimentConfig& config);
ExperimentReport run_convergence_delta(const ExperimentConfig& config);
ExperimentReport run_convergence_line(const ExperimentConfig& config);
ExperimentReport run_apriori_divq(const ExperimentConfig& config);
ExperimentReport run_poincare(const ExperimentConfig& config);
ExperimentReport run_green_verify(const ExperimentConfig& config);
ExperimentReport run_localization(const ExperimentConfig& config);
ExperimentReport run_maximal_probes(const ExperimentConfig& config);

/// Subcommand names in execution order of `all`.
const std::vector<std::string>& experiment_names();

/// Validates the config, applies config.workers, and runs one experiment.
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& config);

}  // namespace spfem
