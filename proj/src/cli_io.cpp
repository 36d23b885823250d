#include "emrecon/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "emrecon/discrete_ops.hpp"
#include "emrecon/error.hpp"
#include "json.hpp"

namespace emrecon {

using nlohmann::json;

std::vector<Inclusion> default_inclusions() {
  return {
      {{{{-1.4, -1.0}, {-0.2, 0.2}, {-0.2, 0.2}}}, 12.0, 2.0},
      {{{{0.6, 1.0}, {0.0, 0.4}, {-0.2, 0.2}}}, 12.0, 2.0},
  };
}

RunConfig::RunConfig() : inclusions(default_inclusions()) {}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::GenerateData: return "generate-data";
    case Mode::Reconstruct: return "reconstruct";
    case Mode::GradCheck: return "gradcheck";
    case Mode::AdjointCheck: return "adjointcheck";
    case Mode::RegSearch: return "regsearch";
  }
  return "unknown";
}

namespace {

[[noreturn]] void invalid(std::string_view key, std::string_view why) {
  throw Error(ErrorCode::ValidationError, std::string(key) + ": " + std::string(why));
}

json extents_json(const Extents& e) {
  json out = json::array();
  for (const auto& iv : e) out.push_back({iv.lo, iv.hi});
  return out;
}

Extents extents_from(const json& j, std::string_view key) {
  if (!j.is_array() || j.size() != 3) invalid(key, "expected three [lo, hi] pairs");
  Extents e{};
  for (int a = 0; a < 3; ++a) {
    const json& iv = j[static_cast<std::size_t>(a)];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      invalid(key, "expected three [lo, hi] pairs");
    e[a] = {iv[0].get<double>(), iv[1].get<double>()};
  }
  return e;
}

double number_from(const json& j, std::string_view key) {
  if (!j.is_number()) invalid(key, "expected a number");
  return j.get<double>();
}

int integer_from(const json& j, std::string_view key) {
  if (!j.is_number_integer()) invalid(key, "expected an integer");
  return j.get<int>();
}

bool bool_from(const json& j, std::string_view key) {
  if (!j.is_boolean()) invalid(key, "expected true or false");
  return j.get<bool>();
}

std::string string_from(const json& j, std::string_view key) {
  if (!j.is_string()) invalid(key, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers_from(const json& j, std::string_view key) {
  if (!j.is_array()) invalid(key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& v : j) out.push_back(number_from(v, key));
  return out;
}

struct KeySpec {
  const char* name;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

#define EMRECON_NUMBER(field)                                                  \
  KeySpec {                                                                    \
    #field, [](const RunConfig& c) { return json(c.field); },                  \
        [](RunConfig& c, const json& j) { c.field = number_from(j, #field); } \
  }
#define EMRECON_INTEGER(field)                                                  \
  KeySpec {                                                                     \
    #field, [](const RunConfig& c) { return json(c.field); },                   \
        [](RunConfig& c, const json& j) { c.field = integer_from(j, #field); } \
  }
#define EMRECON_BOOL(field)                                                  \
  KeySpec {                                                                  \
    #field, [](const RunConfig& c) { return json(c.field); },                \
        [](RunConfig& c, const json& j) { c.field = bool_from(j, #field); } \
  }
#define EMRECON_STRING(field)                                                  \
  KeySpec {                                                                    \
    #field, [](const RunConfig& c) { return json(c.field); },                  \
        [](RunConfig& c, const json& j) { c.field = string_from(j, #field); } \
  }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"outer_extents", [](const RunConfig& c) { return extents_json(c.outer_extents); },
       [](RunConfig& c, const json& j) { c.outer_extents = extents_from(j, "outer_extents"); }},
      {"inner_extents", [](const RunConfig& c) { return extents_json(c.inner_extents); },
       [](RunConfig& c, const json& j) { c.inner_extents = extents_from(j, "inner_extents"); }},
      EMRECON_NUMBER(h),
      EMRECON_NUMBER(tau),
      EMRECON_NUMBER(T),
      EMRECON_NUMBER(omega),
      EMRECON_INTEGER(polarization),
      EMRECON_NUMBER(s),
      EMRECON_NUMBER(delta),
      EMRECON_NUMBER(gamma1),
      EMRECON_NUMBER(gamma2),
      EMRECON_NUMBER(eps0),
      EMRECON_NUMBER(mu0),
      EMRECON_NUMBER(noise_level),
      {"seed", [](const RunConfig& c) { return json(c.seed); },
       [](RunConfig& c, const json& j) {
         if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
           invalid("seed", "expected a non-negative integer");
         c.seed = j.get<std::uint64_t>();
       }},
      EMRECON_NUMBER(alpha1),
      EMRECON_NUMBER(alpha2),
      EMRECON_BOOL(line_search),
      EMRECON_NUMBER(theta),
      EMRECON_INTEGER(W),
      EMRECON_NUMBER(rho),
      EMRECON_INTEGER(max_iter),
      EMRECON_INTEGER(observation_axis),
      {"illumination",
       [](const RunConfig& c) {
         return json(c.illumination == Illumination::Dirichlet ? "dirichlet" : "neumann");
       },
       [](RunConfig& c, const json& j) {
         const std::string v = string_from(j, "illumination");
         if (v == "dirichlet") c.illumination = Illumination::Dirichlet;
         else if (v == "neumann") c.illumination = Illumination::Neumann;
         else invalid("illumination", "expected dirichlet or neumann");
       }},
      {"divergence_term",
       [](const RunConfig& c) {
         return json(c.divergence_term == DivergenceTerm::FieldDotGrad ? "field_dot_grad"
                                                                       : "div_product");
       },
       [](RunConfig& c, const json& j) {
         const std::string v = string_from(j, "divergence_term");
         if (v == "field_dot_grad") c.divergence_term = DivergenceTerm::FieldDotGrad;
         else if (v == "div_product") c.divergence_term = DivergenceTerm::DivProduct;
         else invalid("divergence_term", "expected field_dot_grad or div_product");
       }},
      {"inclusions",
       [](const RunConfig& c) {
         json out = json::array();
         for (const Inclusion& inc : c.inclusions)
           out.push_back({{"box", extents_json(inc.box)}, {"eps", inc.eps}, {"mu", inc.mu}});
         return out;
       },
       [](RunConfig& c, const json& j) {
         if (!j.is_array()) invalid("inclusions", "expected an array of objects");
         c.inclusions.clear();
         for (const json& item : j) {
           if (!item.is_object() || !item.contains("box") || !item.contains("eps") ||
               !item.contains("mu") || item.size() != 3)
             invalid("inclusions", "each entry needs exactly box, eps and mu");
           c.inclusions.push_back({extents_from(item["box"], "inclusions"),
                                   number_from(item["eps"], "inclusions"),
                                   number_from(item["mu"], "inclusions")});
         }
       }},
      EMRECON_INTEGER(data_refinement),
      EMRECON_BOOL(background_calibration),
      EMRECON_INTEGER(gradcheck_nodes),
      EMRECON_NUMBER(h_fd),
      EMRECON_NUMBER(gradcheck_eps),
      EMRECON_NUMBER(gradcheck_mu),
      {"regsearch_gamma1", [](const RunConfig& c) { return json(c.regsearch_gamma1); },
       [](RunConfig& c, const json& j) { c.regsearch_gamma1 = numbers_from(j, "regsearch_gamma1"); }},
      {"regsearch_gamma2", [](const RunConfig& c) { return json(c.regsearch_gamma2); },
       [](RunConfig& c, const json& j) { c.regsearch_gamma2 = numbers_from(j, "regsearch_gamma2"); }},
      {"mode", [](const RunConfig& c) { return json(std::string(to_string(c.mode))); },
       [](RunConfig& c, const json& j) {
         const std::string v = string_from(j, "mode");
         for (Mode m : {Mode::GenerateData, Mode::Reconstruct, Mode::GradCheck,
                        Mode::AdjointCheck, Mode::RegSearch})
           if (v == to_string(m)) {
             c.mode = m;
             return;
           }
         invalid("mode", "unknown mode '" + v + "'");
       }},
      EMRECON_STRING(data_path),
      EMRECON_STRING(output_dir),
  };
  return table;
}

#undef EMRECON_NUMBER
#undef EMRECON_INTEGER
#undef EMRECON_BOOL
#undef EMRECON_STRING

const KeySpec* find_key(std::string_view name) {
  for (const KeySpec& k : key_table())
    if (name == k.name) return &k;
  return nullptr;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const KeySpec& k : key_table()) out.emplace_back(k.name);
  return out;
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "configuration must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    const KeySpec* spec = find_key(key);
    if (!spec) invalid(key, "unknown key");
    spec->set(cfg, value);
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(RunConfig& cfg, std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  if (!spec) invalid(key, "unknown key");
  json j = json::parse(value, nullptr, false);
  if (j.is_discarded()) j = std::string(value);
  spec->set(cfg, j);
}

std::string config_to_json(const RunConfig& cfg) {
  json out = json::object();
  for (const KeySpec& k : key_table()) out[k.name] = k.get(cfg);
  return out.dump(2);
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.h > 0.0)) invalid("h", "must be positive");
  if (!(cfg.tau > 0.0)) invalid("tau", "must be positive");
  if (!(cfg.T > 0.0)) invalid("T", "must be positive");
  TimeLoopSpec time;
  time.tau = cfg.tau;
  time.final_time = cfg.T;
  try {
    time.steps();
  } catch (const Error& e) {
    invalid("T", e.what());
  }
  Grid3 grid;
  try {
    grid = build_grid(cfg.outer_extents, cfg.h);
  } catch (const Error& e) {
    invalid("outer_extents", e.what());
  }
  RegionMask mask;
  try {
    mask = build_decomposition(grid, cfg.inner_extents);
  } catch (const Error& e) {
    invalid("inner_extents", e.what());
  }
  // Admissible coefficients are >= 1, so the background speed 1 is the fastest.
  const double tau_max = cfl_max_step(grid, CoefficientField::uniform(grid));
  if (cfg.tau > tau_max) {
    std::ostringstream msg;
    msg << "CFL violated: tau=" << cfg.tau << " > h/sqrt(3)=" << tau_max;
    invalid("tau", msg.str());
  }
  if (!(cfg.omega > 0.0)) invalid("omega", "must be positive");
  if (cfg.polarization < 0 || cfg.polarization > 2) invalid("polarization", "must be 0, 1 or 2");
  if (cfg.observation_axis < 0 || cfg.observation_axis > 2)
    invalid("observation_axis", "must be 0, 1 or 2");
  if (!(cfg.s >= 0.0 && cfg.s <= 1.0)) invalid("s", "must lie in [0, 1]");
  if (!(cfg.delta > 0.0 && cfg.delta < cfg.T)) invalid("delta", "must lie in (0, T)");
  if (!(cfg.gamma1 >= 0.0)) invalid("gamma1", "must be non-negative");
  if (!(cfg.gamma2 >= 0.0)) invalid("gamma2", "must be non-negative");
  if (!kEpsBounds.contains(cfg.eps0)) invalid("eps0", "outside [1, 15]");
  if (!kMuBounds.contains(cfg.mu0)) invalid("mu0", "outside [1, 3]");
  if (!(cfg.noise_level >= 0.0)) invalid("noise_level", "must be non-negative");
  if (!(cfg.alpha1 >= 0.0)) invalid("alpha1", "must be non-negative");
  if (!(cfg.alpha2 >= 0.0)) invalid("alpha2", "must be non-negative");
  if (!(cfg.theta > 0.0)) invalid("theta", "must be positive");
  if (cfg.W < 2) invalid("W", "must be at least 2");
  if (!(cfg.rho > 0.0)) invalid("rho", "must be positive");
  if (cfg.max_iter < 0) invalid("max_iter", "must be non-negative");
  if (cfg.data_refinement < 1) invalid("data_refinement", "must be at least 1");
  try {
    phantom(grid, mask, cfg.inclusions);
    if (cfg.data_refinement > 1) {
      const Grid3 fine = build_grid(cfg.outer_extents, cfg.h / cfg.data_refinement);
      phantom(fine, build_decomposition(fine, cfg.inner_extents), cfg.inclusions);
    }
  } catch (const Error& e) {
    invalid("inclusions", e.what());
  }
  if (cfg.gradcheck_nodes < 1 || static_cast<std::size_t>(cfg.gradcheck_nodes) > mask.inner_count())
    invalid("gradcheck_nodes", "must lie between 1 and the number of INNER nodes");
  if (!(cfg.h_fd > 0.0)) invalid("h_fd", "must be positive");
  if (!kEpsBounds.contains(cfg.gradcheck_eps)) invalid("gradcheck_eps", "outside [1, 15]");
  if (!kMuBounds.contains(cfg.gradcheck_mu)) invalid("gradcheck_mu", "outside [1, 3]");
  for (const auto* list : {&cfg.regsearch_gamma1, &cfg.regsearch_gamma2}) {
    const char* key = list == &cfg.regsearch_gamma1 ? "regsearch_gamma1" : "regsearch_gamma2";
    if (list->empty()) invalid(key, "must not be empty");
    for (double v : *list)
      if (!(v >= 0.0)) invalid(key, "values must be non-negative");
  }
}

// ---------------------------------------------------------------- traces

namespace {

constexpr char kTraceMagic[8] = {'E', 'M', 'T', 'R', 'A', 'C', 'E', '1'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_trace_binary(const std::filesystem::path& path, const ObservationTrace& t) {
  std::ofstream out = open_out(path, true);
  out.write(kTraceMagic, sizeof kTraceMagic);
  put<std::uint64_t>(out, t.steps);
  put<double>(out, t.tau);
  put<std::uint64_t>(out, t.node_count);
  put<double>(out, t.omega);
  put<double>(out, t.noise_level);
  put<std::uint64_t>(out, t.seed);
  out.write(reinterpret_cast<const char*>(t.samples.data()),
            static_cast<std::streamsize>(t.samples.size() * sizeof(double)));
  finish_write(out, path);
}

ObservationTrace read_trace_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kTraceMagic, sizeof magic) != 0)
    throw Error(ErrorCode::IoError, path.string() + " is not a trace file");
  const auto steps = take<std::uint64_t>(in);
  const auto tau = take<double>(in);
  const auto nodes = take<std::uint64_t>(in);
  ObservationTrace t(steps, nodes, tau);
  t.omega = take<double>(in);
  t.noise_level = take<double>(in);
  t.seed = take<std::uint64_t>(in);
  in.read(reinterpret_cast<char*>(t.samples.data()),
          static_cast<std::streamsize>(t.samples.size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::IoError, path.string() + " is truncated");
  return t;
}

void write_trace_csv(const std::filesystem::path& path, const ObservationTrace& t) {
  std::ofstream out = open_out(path);
  out << "# N=" << t.steps << " tau=" << fmt(t.tau) << " nodes=" << t.node_count
      << " omega=" << fmt(t.omega) << " noise_level=" << fmt(t.noise_level) << " seed=" << t.seed
      << '\n';
  out << "k,node,E1,E2,E3\n";
  for (std::size_t k = 0; k <= t.steps; ++k)
    for (std::size_t p = 0; p < t.node_count; ++p)
      out << k << ',' << p << ',' << fmt(t.at(k, p, 0)) << ',' << fmt(t.at(k, p, 1)) << ','
          << fmt(t.at(k, p, 2)) << '\n';
  finish_write(out, path);
}

// ---------------------------------------------------------------- fields

void write_field_vtk(const std::filesystem::path& path, const Grid3& g,
                     const std::vector<NamedField>& fields) {
  for (const auto& [name, f] : fields)
    if (f->size() != g.size()) throw Error(ErrorCode::ShapeMismatch, name + " does not match grid");
  std::ofstream out = open_out(path);
  const auto& e = g.extents();
  out << "# vtk DataFile Version 3.0\nemrecon coefficient fields\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.count(0) << ' ' << g.count(1) << ' ' << g.count(2) << '\n';
  out << "ORIGIN " << fmt(e[0].lo) << ' ' << fmt(e[1].lo) << ' ' << fmt(e[2].lo) << '\n';
  out << "SPACING " << fmt(g.spacing()) << ' ' << fmt(g.spacing()) << ' ' << fmt(g.spacing())
      << '\n';
  out << "POINT_DATA " << g.size() << '\n';
  for (const auto& [name, f] : fields) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < g.count(2); ++k)
      for (int j = 0; j < g.count(1); ++j)
        for (int i = 0; i < g.count(0); ++i) out << fmt((*f)[g.index(i, j, k)]) << '\n';
  }
  finish_write(out, path);
}

void write_field_csv(const std::filesystem::path& path, const Grid3& g, const NodalArray& f) {
  if (f.size() != g.size()) throw Error(ErrorCode::ShapeMismatch, "field does not match grid");
  std::ofstream out = open_out(path);
  out << "i,j,k,x1,x2,x3,value\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Index3 ijk = g.unravel(n);
    const Point3 x = g.coordinate(ijk);
    out << ijk[0] << ',' << ijk[1] << ',' << ijk[2] << ',' << fmt(x[0]) << ',' << fmt(x[1]) << ','
        << fmt(x[2]) << ',' << fmt(f[n]) << '\n';
  }
  finish_write(out, path);
}

NodalArray read_field_csv(const std::filesystem::path& path, const Grid3& g) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  NodalArray out(g.size(), 0.0);
  std::vector<bool> seen(g.size(), false);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int i = 0, j = 0, k = 0;
    double x1 = 0, x2 = 0, x3 = 0, v = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf,%lf,%lf", &i, &j, &k, &x1, &x2, &x3, &v) != 7)
      throw Error(ErrorCode::ParseError, "malformed field row: " + line);
    if (i < 0 || j < 0 || k < 0 || i >= g.count(0) || j >= g.count(1) || k >= g.count(2))
      throw Error(ErrorCode::ShapeMismatch, "field row outside the grid: " + line);
    const std::size_t n = g.index(i, j, k);
    if (!seen[n]) ++count;
    seen[n] = true;
    out[n] = v;
  }
  if (count != g.size()) throw Error(ErrorCode::ShapeMismatch, "field file does not cover the grid");
  return out;
}

// ---------------------------------------------------------------- pipelines

Setup make_setup(const RunConfig& cfg, int refinement) {
  Setup s;
  s.grid = build_grid(cfg.outer_extents, cfg.h / refinement);
  s.mask = build_decomposition(s.grid, cfg.inner_extents);
  s.bc = classify_boundary(s.grid, cfg.observation_axis);
  s.source.omega = cfg.omega;
  s.source.polarization = cfg.polarization;
  s.time.tau = cfg.tau / refinement;
  s.time.final_time = cfg.T;
  s.time.s = cfg.s;
  s.time.illumination = cfg.illumination;
  return s;
}

namespace {

/// Samples a refined-grid trace at the coarse observation nodes and levels.
ObservationTrace restrict_trace(const RunConfig& cfg, const Setup& fine, const ObservationTrace& t) {
  const Setup coarse = make_setup(cfg, 1);
  const int r = cfg.data_refinement;
  std::vector<std::ptrdiff_t> position(fine.grid.size(), -1);
  for (std::size_t p = 0; p < fine.bc.observation.size(); ++p)
    position[fine.bc.observation[p]] = static_cast<std::ptrdiff_t>(p);

  const std::size_t n_steps = coarse.time.steps();
  ObservationTrace out(n_steps, coarse.bc.observation.size(), cfg.tau);
  out.omega = cfg.omega;
  for (std::size_t p = 0; p < coarse.bc.observation.size(); ++p) {
    Index3 ijk = coarse.grid.unravel(coarse.bc.observation[p]);
    for (int& c : ijk) c *= r;
    const std::ptrdiff_t fp = position[fine.grid.index(ijk)];
    if (fp < 0) throw Error(ErrorCode::TraceMismatch, "refined observation face does not align");
    for (std::size_t k = 0; k <= n_steps; ++k)
      for (int d = 0; d < 3; ++d)
        out.at(k, p, d) = t.at(k * static_cast<std::size_t>(r), static_cast<std::size_t>(fp), d);
  }
  return out;
}

ObservationTrace refined_trace(const RunConfig& cfg, bool with_phantom) {
  Setup fine = make_setup(cfg, cfg.data_refinement);
  fine.time.record = RecordPolicy::TraceOnly;
  const CoefficientField c = with_phantom ? phantom(fine.grid, fine.mask, cfg.inclusions)
                                          : CoefficientField::uniform(fine.grid);
  const ObservationTrace t = solve_forward(fine.grid, fine.bc, c, fine.source, fine.time).trace;
  return restrict_trace(cfg, fine, t);
}

CoefficientField start_field(const RunConfig& cfg, const Setup& s, double eps, double mu) {
  CoefficientField c = CoefficientField::uniform(s.grid);
  for (std::size_t n = 0; n < s.grid.size(); ++n)
    if (s.mask.is_inner(n)) {
      c.eps[n] = eps;
      c.mu[n] = mu;
    }
  (void)cfg;
  return c;
}

std::string point(const Point3& p) {
  return "(" + fmt10(p[0]) + ", " + fmt10(p[1]) + ", " + fmt10(p[2]) + ")";
}

void append_localization(std::ostringstream& out, std::string_view name,
                         const LocalizationReport& rep) {
  out << name << "_components: " << rep.components.size() << '\n';
  for (std::size_t i = 0; i < rep.components.size(); ++i) {
    const Component& c = rep.components[i];
    out << name << "_component_" << i << ": nodes=" << c.node_count
        << " centroid=" << point(c.centroid) << " lo=" << point(c.lo) << " hi=" << point(c.hi)
        << " peak=" << fmt10(c.peak) << '\n';
  }
  for (std::size_t i = 0; i < rep.inclusions.size(); ++i) {
    const InclusionMatch& m = rep.inclusions[i];
    out << name << "_inclusion_" << i << ": center=" << point(m.true_centroid)
        << " component=" << m.component << " planar_distance=" << fmt10(m.planar_distance)
        << " distance=" << fmt10(m.distance) << " hit=" << (m.hit ? "true" : "false") << '\n';
  }
}

}  // namespace

ObservationTrace generate_clean_data(const RunConfig& cfg) { return refined_trace(cfg, true); }

ObservationTrace background_trace_refined(const RunConfig& cfg) { return refined_trace(cfg, false); }

ObservationTrace calibrate_observations(const RunConfig& cfg, const ObservationTrace& observed) {
  const ObservationTrace fine_bg = background_trace_refined(cfg);
  Setup coarse = make_setup(cfg, 1);
  coarse.time.record = RecordPolicy::TraceOnly;
  const ObservationTrace coarse_bg =
      solve_forward(coarse.grid, coarse.bc, CoefficientField::uniform(coarse.grid), coarse.source,
                    coarse.time)
          .trace;
  if (!observed.congruent(coarse_bg))
    throw Error(ErrorCode::TraceMismatch, "observations do not match the inversion grid");
  ObservationTrace out = observed;
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] += coarse_bg.samples[i] - fine_bg.samples[i];
  return out;
}

InverseProblem make_problem(const RunConfig& cfg, const ObservationTrace& observed) {
  const Setup s = make_setup(cfg, 1);
  InverseProblem prob{s.grid, s.mask, s.bc, s.source, s.time, observed,
                      TikhonovParams::uniform_priors(s.grid, cfg.eps0, cfg.mu0)};
  for (std::size_t n = 0; n < s.grid.size(); ++n)
    if (!s.mask.is_inner(n)) prob.params.eps0[n] = prob.params.mu0[n] = 1.0;
  prob.params.gamma1 = cfg.gamma1;
  prob.params.gamma2 = cfg.gamma2;
  prob.params.cutoff = {cfg.delta, cfg.T};
  prob.params.divergence_term = cfg.divergence_term;
  if (!observed.congruent(ObservationTrace(s.time.steps(), s.bc.observation.size(), s.time.tau)))
    throw Error(ErrorCode::TraceMismatch, "observations do not match the inversion grid");
  return prob;
}

GradCheckResult gradient_check(const RunConfig& cfg) {
  Setup s = make_setup(cfg, 1);
  s.time.record = RecordPolicy::TraceOnly;
  const ObservationTrace data =
      solve_forward(s.grid, s.bc, phantom(s.grid, s.mask, cfg.inclusions), s.source, s.time).trace;
  const InverseProblem prob = make_problem(cfg, data);
  const CoefficientField c = start_field(cfg, s, cfg.gradcheck_eps, cfg.gradcheck_mu);
  const GradientEvaluation ev = evaluate_gradient(prob, c);

  std::vector<std::size_t> inner = s.mask.inner_nodes();
  std::vector<std::size_t> nodes;
  std::mt19937_64 rng(cfg.seed);
  std::sample(inner.begin(), inner.end(), std::back_inserter(nodes),
              static_cast<std::size_t>(cfg.gradcheck_nodes), rng);

  GradCheckResult out;
  out.tau = cfg.tau;
  const double h3 = std::pow(cfg.h, 3);
  double num[2] = {0, 0}, den[2] = {0, 0};
  for (std::size_t node : nodes)
    for (Parameter param : {Parameter::Eps, Parameter::Mu}) {
      GradCheckRow row;
      row.node = node;
      row.param = param;
      row.adjoint = h3 * (param == Parameter::Eps ? ev.g1 : ev.g2)[node];
      row.oracle = fd_gradient_oracle(prob, c, param, node, cfg.h_fd);
      const int i = param == Parameter::Eps ? 0 : 1;
      num[i] += (row.adjoint - row.oracle) * (row.adjoint - row.oracle);
      den[i] += row.oracle * row.oracle;
      out.rows.push_back(row);
    }
  auto ratio = [](double a, double b) { return b > 0.0 ? std::sqrt(a / b) : std::sqrt(a); };
  out.error_eps = ratio(num[0], den[0]);
  out.error_mu = ratio(num[1], den[1]);
  out.error = ratio(num[0] + num[1], den[0] + den[1]);
  return out;
}

CaseOutcome run_reconstruction(const RunConfig& cfg, const ObservationTrace& observed,
                               std::string_view label) {
  const ObservationTrace data = (cfg.background_calibration && cfg.data_refinement > 1)
                                    ? calibrate_observations(cfg, observed)
                                    : observed;
  const InverseProblem prob = make_problem(cfg, data);
  const Setup s = make_setup(cfg, 1);
  const CoefficientField start = start_field(cfg, s, cfg.eps0, cfg.mu0);

  ReconstructionOptions opt;
  opt.stopping = {cfg.theta, cfg.W, cfg.rho, cfg.max_iter};
  opt.step.alpha1 = cfg.alpha1;
  opt.step.alpha2 = cfg.alpha2;
  opt.step.line_search = cfg.line_search;

  std::ostringstream log;
  CaseOutcome out;
  out.result = reconstruct(prob, start, opt, &log);
  out.thresholded = threshold_fields(out.result.c.eps, out.result.c.mu);
  out.max_eps = *std::max_element(out.thresholded.eps.begin(), out.thresholded.eps.end());
  out.max_mu = *std::max_element(out.thresholded.mu.begin(), out.thresholded.mu.end());
  const CoefficientField truth = phantom(s.grid, s.mask, cfg.inclusions);
  out.error_eps = relative_error(s.mask, out.result.c.eps, truth.eps);
  out.error_mu = relative_error(s.mask, out.result.c.mu, truth.mu);
  const double radius = 3.0 * cfg.h;
  out.eps_localization = localization_report(s.grid, out.thresholded.eps, cfg.inclusions, radius);
  out.mu_localization = localization_report(s.grid, out.thresholded.mu, cfg.inclusions, radius);

  std::ostringstream rep;
  if (!label.empty()) rep << "case: " << label << '\n';
  rep << "omega: " << fmt10(cfg.omega) << '\n'
      << "noise_level: " << fmt10(cfg.noise_level) << '\n'
      << "seed: " << cfg.seed << '\n'
      << "gamma1: " << fmt10(cfg.gamma1) << '\n'
      << "gamma2: " << fmt10(cfg.gamma2) << '\n'
      << "iterations: " << out.result.iterations << '\n'
      << "n: " << out.result.n << '\n'
      << "l: " << out.result.l << '\n'
      << "stop_reason: " << out.result.stop_reason << '\n'
      << "line_search_failed: " << (out.result.line_search_failed ? "true" : "false") << '\n'
      << "F_initial: " << fmt10(out.result.f_history.front()) << '\n'
      << "F_final: " << fmt10(out.result.f_history.back()) << '\n'
      << "max_eps_thresholded: " << fmt10(out.max_eps) << '\n'
      << "max_mu_thresholded: " << fmt10(out.max_mu) << '\n'
      << "e_eps: " << fmt10(out.error_eps) << '\n'
      << "e_mu: " << fmt10(out.error_mu) << '\n';
  append_localization(rep, "eps", out.eps_localization);
  append_localization(rep, "mu", out.mu_localization);
  out.report = rep.str();

  if (!cfg.output_dir.empty()) {
    const std::filesystem::path dir = cfg.output_dir;
    write_field_vtk(dir / "fields.vtk", s.grid,
                    {{"eps", &out.result.c.eps},
                     {"mu", &out.result.c.mu},
                     {"eps_thresholded", &out.thresholded.eps},
                     {"mu_thresholded", &out.thresholded.mu}});
    write_field_csv(dir / "eps.csv", s.grid, out.result.c.eps);
    write_field_csv(dir / "mu.csv", s.grid, out.result.c.mu);
    write_field_csv(dir / "eps_thresholded.csv", s.grid, out.thresholded.eps);
    write_field_csv(dir / "mu_thresholded.csv", s.grid, out.thresholded.mu);
    {
      std::ofstream f = open_out(dir / "log.csv");
      f << log.str();
      finish_write(f, dir / "log.csv");
    }
    {
      std::ofstream f = open_out(dir / "report.txt");
      f << out.report;
      finish_write(f, dir / "report.txt");
    }
    {
      json manifest;
      manifest["config"] = json::parse(config_to_json(cfg));
      manifest["data_grid_spacing"] = cfg.h / cfg.data_refinement;
      manifest["data_time_step"] = cfg.tau / cfg.data_refinement;
      manifest["data_generation"] =
          "uniformly refined grid, traces restricted to the inversion face nodes and levels";
      manifest["background_calibration_applied"] =
          cfg.background_calibration && cfg.data_refinement > 1;
      std::ofstream f = open_out(dir / "manifest.json");
      f << manifest.dump(2) << '\n';
      finish_write(f, dir / "manifest.json");
    }
  }
  return out;
}

RunConfig case_config(const RunConfig& base, std::string_view case_id) {
  RunConfig cfg = base;
  if (case_id == "i") {
    cfg.omega = 21.0;
    cfg.noise_level = 3.0;
  } else if (case_id == "ii") {
    cfg.omega = 21.0;
    cfg.noise_level = 10.0;
  } else if (case_id == "iii") {
    cfg.omega = 30.0;
    cfg.noise_level = 3.0;
  } else if (case_id == "iv") {
    cfg.omega = 30.0;
    cfg.noise_level = 10.0;
  } else {
    invalid("case", "expected i, ii, iii or iv");
  }
  return cfg;
}

CaseOutcome run_case(const RunConfig& base, std::string_view case_id,
                     const std::filesystem::path& workdir) {
  RunConfig cfg = case_config(base, case_id);
  cfg.output_dir = workdir.string();
  validate_config(cfg);
  const ObservationTrace clean = generate_clean_data(cfg);
  const ObservationTrace noisy = add_noise(clean, cfg.noise_level, cfg.seed);
  if (!workdir.empty()) {
    write_trace_binary(workdir / "trace_clean.bin", clean);
    write_trace_binary(workdir / "trace.bin", noisy);
  }
  return run_reconstruction(cfg, noisy, case_id);
}

std::vector<RegSearchRow> regsearch(const RunConfig& cfg, const std::vector<double>& gamma1,
                                    const std::vector<double>& gamma2) {
  const ObservationTrace noisy = add_noise(generate_clean_data(cfg), cfg.noise_level, cfg.seed);
  std::vector<RegSearchRow> rows;
  for (double g1 : gamma1)
    for (double g2 : gamma2) {
      RunConfig c = cfg;
      c.gamma1 = g1;
      c.gamma2 = g2;
      c.output_dir.clear();
      const CaseOutcome o = run_reconstruction(c, noisy);
      rows.push_back({g1, g2, o.error_eps, o.error_mu, false});
    }
  auto best = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.error_eps + a.error_mu < b.error_eps + b.error_mu;
  });
  if (best != rows.end()) best->best = true;
  return rows;
}

}  // namespace emrecon
