#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"
#include "emrecon/forward_solver.hpp"
#include "emrecon/objective.hpp"
#include "emrecon/optimizer.hpp"
#include "emrecon/postprocess.hpp"
#include "emrecon/verify.hpp"

namespace emrecon {

enum class Mode { GenerateData, Reconstruct, GradCheck, AdjointCheck, RegSearch };

struct RunConfig {
  Extents outer_extents{{{-3.4, 3.4}, {-0.8, 0.8}, {-0.4, 0.4}}};
  Extents inner_extents{{{-3.2, 3.2}, {-0.6, 0.6}, {-0.3, 0.3}}};
  double h = 0.1;
  double tau = 0.003;
  double T = 1.2;
  double omega = 30.0;
  int polarization = 1;
  double s = 1.0;
  double delta = 0.12;
  double gamma1 = 0.01;
  double gamma2 = 0.9;
  double eps0 = 1.0;
  double mu0 = 1.0;
  double noise_level = 3.0;
  std::uint64_t seed = 1;
  double alpha1 = 0.5;
  double alpha2 = 0.05;
  bool line_search = true;
  double theta = 1e-6;
  int W = 5;
  double rho = 1e-4;
  int max_iter = 50;
  int observation_axis = 2;
  Illumination illumination = Illumination::Dirichlet;
  DivergenceTerm divergence_term = DivergenceTerm::FieldDotGrad;
  std::vector<Inclusion> inclusions;
  int data_refinement = 2;
  bool background_calibration = true;
  int gradcheck_nodes = 5;
  double h_fd = 1e-3;
  double gradcheck_eps = 2.0;
  double gradcheck_mu = 1.5;
  std::vector<double> regsearch_gamma1{0.001, 0.01, 0.1};
  std::vector<double> regsearch_gamma2{0.09, 0.9, 9.0};
  Mode mode = Mode::Reconstruct;
  std::string data_path = "data.trace";
  std::string output_dir = "out";

  RunConfig();
};

/// Two boxes of eps = 12, mu = 2 inside the default inner region.
std::vector<Inclusion> default_inclusions();

/// Names of every configuration key, in documentation order.
std::vector<std::string> config_keys();

/// Parses a JSON object on top of the defaults. Unknown keys and wrongly
/// typed values raise ValidationError, malformed text ParseError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Sets one key from a JSON literal; bare words are taken as strings.
void apply_override(RunConfig& cfg, std::string_view key, std::string_view value);

/// Throws ValidationError naming the offending key.
void validate_config(const RunConfig& cfg);

/// Fully resolved configuration as pretty-printed JSON.
std::string config_to_json(const RunConfig& cfg);

std::string_view to_string(Mode m);

// ---------------------------------------------------------------- traces

/// Binary layout (native little-endian): 8-byte magic "EMTRACE1", then
/// uint64 N, double tau, uint64 node_count, double omega, double noise_level,
/// uint64 seed, then (N+1) * node_count * 3 doubles ordered (k, node, component).
void write_trace_binary(const std::filesystem::path& path, const ObservationTrace& t);
ObservationTrace read_trace_binary(const std::filesystem::path& path);

/// CSV: header line, then k,node,E1,E2,E3 per row.
void write_trace_csv(const std::filesystem::path& path, const ObservationTrace& t);

// ---------------------------------------------------------------- fields

using NamedField = std::pair<std::string, const NodalArray*>;

/// Legacy ASCII STRUCTURED_POINTS, one SCALARS block per field, x1 fastest.
void write_field_vtk(const std::filesystem::path& path, const Grid3& g,
                     const std::vector<NamedField>& fields);

/// Rows i,j,k,x1,x2,x3,value in storage order, full precision.
void write_field_csv(const std::filesystem::path& path, const Grid3& g, const NodalArray& f);
NodalArray read_field_csv(const std::filesystem::path& path, const Grid3& g);

// ---------------------------------------------------------------- pipelines

struct Setup {
  Grid3 grid;
  RegionMask mask;
  BoundaryMap bc;
  SourcePulse source;
  TimeLoopSpec time;
};

Setup make_setup(const RunConfig& cfg, int refinement = 1);

/// Observation-face trace of the configured phantom, computed with h and tau
/// divided by `data_refinement` and restricted to the coarse nodes and levels.
ObservationTrace generate_clean_data(const RunConfig& cfg);

/// Homogeneous-medium trace on the refined grid, restricted like the data.
ObservationTrace background_trace_refined(const RunConfig& cfg);

/// Replaces the refined-grid incident field in `observed` by the one of the
/// inversion grid: observed - background(refined) + background(coarse).
ObservationTrace calibrate_observations(const RunConfig& cfg, const ObservationTrace& observed);

InverseProblem make_problem(const RunConfig& cfg, const ObservationTrace& observed);

struct GradCheckRow {
  std::size_t node = 0;
  Parameter param = Parameter::Eps;
  double adjoint = 0.0;
  double oracle = 0.0;
};

struct GradCheckResult {
  double tau = 0.0;
  std::vector<GradCheckRow> rows;
  double error_eps = 0.0;  // |adjoint - oracle| / |oracle| over the sampled nodes
  double error_mu = 0.0;
  double error = 0.0;      // both parameters together
};

/// Adjoint gradient against the finite-difference oracle at
/// `gradcheck_nodes` random INNER nodes. Data come from the phantom on the
/// same grid; the evaluation point has eps = gradcheck_eps, mu = gradcheck_mu
/// on INNER nodes.
GradCheckResult gradient_check(const RunConfig& cfg);

struct CaseOutcome {
  ReconstructionResult result;
  ThresholdedFields thresholded;
  double max_eps = 0.0;
  double max_mu = 0.0;
  double error_eps = 0.0;
  double error_mu = 0.0;
  LocalizationReport eps_localization;
  LocalizationReport mu_localization;
  std::string report;  // deterministic text
};

/// Reconstructs from `observed` and writes fields, log, report and manifest
/// into cfg.output_dir (skipped when the directory string is empty). The
/// report starts with `label` when given.
CaseOutcome run_reconstruction(const RunConfig& cfg, const ObservationTrace& observed,
                               std::string_view label = {});

/// Case settings: i) omega 21, 3%; ii) omega 21, 10%; iii) omega 30, 3%; iv) omega 30, 10%.
RunConfig case_config(const RunConfig& base, std::string_view case_id);

/// Full experiment: data generation, noise, reconstruction, artifacts.
CaseOutcome run_case(const RunConfig& base, std::string_view case_id,
                     const std::filesystem::path& workdir);

struct RegSearchRow {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double error_eps = 0.0;
  double error_mu = 0.0;
  bool best = false;
};

std::vector<RegSearchRow> regsearch(const RunConfig& cfg, const std::vector<double>& gamma1,
                                    const std::vector<double>& gamma2);

}  // namespace emrecon
