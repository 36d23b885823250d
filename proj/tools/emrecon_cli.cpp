// Command-line front end. Every configuration key is also a flag
// (--omega 30, --inner_extents "[[-1,1],[-0.5,0.5],[-0.2,0.2]]").

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "emrecon/cli_io.hpp"
#include "emrecon/error.hpp"
#include "emrecon/verify.hpp"

namespace {

using namespace emrecon;

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "JSON configuration file");
  for (const std::string& key : config_keys())
    cmd->add_option("--" + key, ov.values[key], "configuration key " + key);
}

RunConfig resolve(const CLI::App* cmd, const Overrides& ov) {
  RunConfig cfg = ov.config_path.empty() ? RunConfig{} : load_config(ov.config_path);
  for (const std::string& key : config_keys())
    if (cmd->count("--" + key) > 0) apply_override(cfg, key, ov.values.at(key));
  validate_config(cfg);
  return cfg;
}

int generate_data(const RunConfig& cfg) {
  const ObservationTrace clean = generate_clean_data(cfg);
  const ObservationTrace noisy = add_noise(clean, cfg.noise_level, cfg.seed);
  write_trace_binary(cfg.data_path, noisy);
  std::printf("trace: %s\nsteps: %zu\nnodes: %zu\nnoise_level: %.10g\nseed: %llu\n",
              cfg.data_path.c_str(), noisy.steps, noisy.node_count, noisy.noise_level,
              static_cast<unsigned long long>(noisy.seed));
  return 0;
}

int reconstruct_cmd(const RunConfig& cfg) {
  const ObservationTrace observed = read_trace_binary(cfg.data_path);
  const CaseOutcome out = run_reconstruction(cfg, observed);
  std::cout << out.report;
  return 0;
}

int gradcheck_cmd(const RunConfig& cfg) {
  const GradCheckResult r = gradient_check(cfg);
  std::printf("node,parameter,adjoint,oracle\n");
  for (const GradCheckRow& row : r.rows)
    std::printf("%zu,%s,%.12e,%.12e\n", row.node, row.param == Parameter::Eps ? "eps" : "mu",
                row.adjoint, row.oracle);
  std::printf("error_eps: %.6e\nerror_mu: %.6e\nerror: %.6e\n", r.error_eps, r.error_mu, r.error);
  return 0;
}

int adjointcheck_cmd(const RunConfig& cfg) {
  const Grid3 g = build_grid({{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}}, 0.125);
  struct Row {
    const char* name;
    BoundaryTreatment b;
    AdjointMutation m;
  };
  const Row rows[] = {
      {"physical", BoundaryTreatment::Physical, AdjointMutation::None},
      {"frozen", BoundaryTreatment::Frozen, AdjointMutation::None},
      {"physical_flipped_absorbing", BoundaryTreatment::Physical, AdjointMutation::FlipAbsorbingSign},
      {"physical_flipped_penalty", BoundaryTreatment::Physical, AdjointMutation::FlipPenaltySign},
  };
  for (const Row& r : rows) {
    AdjointCheckSpec spec;
    spec.boundaries = r.b;
    spec.mutation = r.m;
    std::printf("%s: %.6e\n", r.name, adjoint_identity_check(g, cfg.seed, spec));
  }
  return 0;
}

int regsearch_cmd(const RunConfig& cfg) {
  const auto rows = regsearch(cfg, cfg.regsearch_gamma1, cfg.regsearch_gamma2);
  std::string table = "gamma1,gamma2,e_eps,e_mu,best\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%d\n", r.gamma1, r.gamma2,
                  r.error_eps, r.error_mu, r.best ? 1 : 0);
    table += buf;
  }
  std::cout << table;
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::FILE* f = std::fopen((std::filesystem::path(cfg.output_dir) / "regsearch.csv").c_str(), "w");
    if (!f) throw Error(ErrorCode::IoError, "cannot write regsearch.csv");
    std::fputs(table.c_str(), f);
    std::fclose(f);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous permittivity / permeability reconstruction"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    CLI::App* cmd = nullptr;
    Overrides ov;
  };
  Sub subs[] = {
      {"generate-data", "simulate observations of the configured phantom"},
      {"reconstruct", "reconstruct eps and mu from data_path"},
      {"gradcheck", "compare adjoint gradients with finite differences"},
      {"adjointcheck", "discrete adjoint identity on a 9x9x9 grid"},
      {"regsearch", "reconstruction error over a grid of regularization weights"},
      {"run-case", "full experiment for case i, ii, iii or iv"},
  };
  std::string case_id;
  std::string workdir;
  for (Sub& s : subs) {
    s.cmd = app.add_subcommand(s.name, s.help);
    add_config_flags(s.cmd, s.ov);
  }
  subs[5].cmd->add_option("--case", case_id, "i, ii, iii or iv")->required();
  subs[5].cmd->add_option("--workdir", workdir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(ErrorCode::ParseError)).c_str(),
                 e.what());
    return exit_status(ErrorCode::ParseError);
  }

  try {
    for (Sub& s : subs) {
      if (!s.cmd->parsed()) continue;
      const RunConfig cfg = resolve(s.cmd, s.ov);
      const std::string name = s.name;
      if (name == "generate-data") return generate_data(cfg);
      if (name == "reconstruct") return reconstruct_cmd(cfg);
      if (name == "gradcheck") return gradcheck_cmd(cfg);
      if (name == "adjointcheck") return adjointcheck_cmd(cfg);
      if (name == "regsearch") return regsearch_cmd(cfg);
      if (name == "run-case") {
        std::cout << run_case(cfg, case_id, workdir).report;
        return 0;
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
