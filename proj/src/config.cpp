#include "pointctl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pointctl/vtk.hpp"

namespace pointctl {

namespace {

const std::set<std::string> kCommands{"solve", "eoc", "approx-eoc", "newton-table", "nu-sweep"};
const std::set<std::string> kProblems{"benchmark2d", "benchmark3d", "constrained2d", "fivepoint2d", "custom"};
const std::set<std::string> kDomains{"square", "disk", "ball"};
const std::set<std::string> kFormats{"csv", "vtk", "txt"};
const std::vector<std::string> kKeys{"command", "problem",  "domain",      "forcing",         "levels",
                                     "level",   "fine_level", "nu",        "nus",             "bounds",
                                     "points",  "theta",    "quad_degree", "assembly_degree", "tol",
                                     "maxit",   "output_dir", "formats"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(s);
  while (std::getline(in, current, sep)) parts.push_back(trim(current));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& text, int line) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) throw ParseError(line, "'" + text + "' is not a number");
  return value;
}

int parse_int(const std::string& text, int line) {
  int value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) throw ParseError(line, "'" + text + "' is not an integer");
  return value;
}

std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_double(part, line));
  return values;
}

std::string number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + number(values[i]);
  return s;
}

bool is_benchmark(const std::string& problem) { return problem == "benchmark2d" || problem == "benchmark3d"; }

int problem_dim(const RunConfig& c) {
  if (c.problem == "benchmark3d") return 3;
  if (c.problem == "custom" && c.domain == "ball") return 3;
  return 2;
}

void require(bool condition, const std::string& invariant) {
  if (!condition) throw ValidationError(invariant);
}

std::shared_ptr<const Mesh> domain_mesh(const std::string& domain, int level) {
  if (domain == "disk") return std::make_shared<Mesh>(build_unit_disk(level));
  if (domain == "ball") return std::make_shared<Mesh>(build_unit_ball(level));
  return std::make_shared<Mesh>(build_unit_square(4 << level));
}

std::string file_stem(const RunConfig& c) { return c.command + "_" + c.problem; }

bool wants(const RunConfig& c, const std::string& format) {
  return std::find(c.formats.begin(), c.formats.end(), format) != c.formats.end();
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  const auto path = std::filesystem::path(c.output_dir) / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("output_dir must be writable (cannot open " + path.string() + ")");
  return file;
}

template <typename Records>
void emit(const RunConfig& c, const Records& records, std::ostream& out) {
  write_table(out, records);
  if (wants(c, "csv")) {
    auto file = open_output(c, file_stem(c) + ".csv");
    write_csv(file, records);
  }
  if (wants(c, "txt")) {
    auto file = open_output(c, file_stem(c) + ".txt");
    write_table(file, records);
  }
}

void run_solve(const RunConfig& c, const ProblemFamily& family, std::ostream& out) {
  OptimalControlProblem problem(family.spec(c.level));
  const auto solution = problem.solve(c.tol, c.maxit);
  const ProblemSpec& spec = problem.spec();
  const Mesh& mesh = spec.mesh();
  const double control_norm = l2_norm(mesh, solution.control_function(), gauss_rule(mesh.dim(), c.quad_degree));

  std::ostringstream csv;
  csv << "x,y,z,target,state\n";
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    const auto& w = spec.points[i];
    csv << format_number(w.location[0]) << ',' << format_number(w.location[1]) << ','
        << format_number(w.location[2]) << ',' << format_number(w.target) << ','
        << format_number(problem.observe(solution.y, i)) << '\n';
  }
  std::ostringstream txt;
  txt << "problem " << c.problem << ", level " << c.level << ", " << mesh.num_vertices() << " vertices\n";
  txt << "newton iterations " << solution.log.iterations() << ", final residual "
      << format_number(solution.log.residuals.back()) << "\n";
  txt << "|u_h|_L2 " << format_number(control_norm) << "\n";
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    txt << "y_h(" << format_number(spec.points[i].location[0]) << ", " << format_number(spec.points[i].location[1]);
    if (mesh.dim() == 3) txt << ", " << format_number(spec.points[i].location[2]);
    txt << ") = " << format_number(problem.observe(solution.y, i)) << "  target "
        << format_number(spec.points[i].target) << '\n';
  }
  out << txt.str();
  if (wants(c, "csv")) open_output(c, file_stem(c) + ".csv") << csv.str();
  if (wants(c, "txt")) open_output(c, file_stem(c) + ".txt") << txt.str();
  if (wants(c, "vtk")) {
    auto y = open_output(c, "y_h.vtk");
    write_vtk(y, solution.y, "y_h");
    auto p = open_output(c, "p_h.vtk");
    write_vtk(p, solution.p, "p_h");
    auto u = open_output(c, "u_h.vtk");
    write_vtk(u, mesh, {{"u_h", solution.control_vertex_values()}},
              "u_h sampled at vertices; not piecewise linear where a bound is active");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw);
    if (content.empty() || content[0] == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key=value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) throw ParseError(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(line, "duplicate key '" + key + "'");

    if (key == "command") {
      c.command = value;
    } else if (key == "problem") {
      c.problem = value;
    } else if (key == "domain") {
      c.domain = value;
    } else if (key == "forcing") {
      c.forcing = parse_double(value, line);
    } else if (key == "levels") {
      c.levels = parse_int(value, line);
    } else if (key == "level") {
      c.level = parse_int(value, line);
    } else if (key == "fine_level") {
      c.fine_level = parse_int(value, line);
    } else if (key == "nu") {
      c.nu = parse_double(value, line);
    } else if (key == "nus") {
      c.nus = parse_list(value, line);
    } else if (key == "bounds") {
      if (value == "none") {
        c.bounds = std::pair{-kInfinity, kInfinity};
      } else {
        const auto ab = parse_list(value, line);
        if (ab.size() != 2) throw ParseError(line, "bounds must be 'a,b' or 'none'");
        c.bounds = std::pair{ab[0], ab[1]};
      }
    } else if (key == "points") {
      c.points.clear();
      for (const auto& entry : split(value, ';')) {
        if (entry.empty()) continue;
        const auto values = parse_list(entry, line);
        if (values.size() != 3 && values.size() != 4) throw ParseError(line, "a point is 'x,y,g' or 'x,y,z,g'");
        c.points.push_back({{values.begin(), values.end() - 1}, values.back()});
      }
    } else if (key == "theta") {
      c.theta = parse_double(value, line);
    } else if (key == "quad_degree") {
      c.quad_degree = parse_int(value, line);
    } else if (key == "assembly_degree") {
      c.assembly_degree = parse_int(value, line);
    } else if (key == "tol") {
      c.tol = parse_double(value, line);
    } else if (key == "maxit") {
      c.maxit = parse_int(value, line);
    } else if (key == "output_dir") {
      c.output_dir = value;
    } else if (key == "formats") {
      c.formats.clear();
      for (const auto& f : split(value, ',')) {
        if (!f.empty()) c.formats.push_back(f);
      }
    }
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  require(kCommands.count(c.command) == 1, "command must be one of solve, eoc, approx-eoc, newton-table, nu-sweep");
  require(kProblems.count(c.problem) == 1,
          "problem must be one of benchmark2d, benchmark3d, constrained2d, fivepoint2d, custom");
  require(kDomains.count(c.domain) == 1, "domain must be square, disk or ball");
  require(c.problem == "custom" || c.domain == "square", "domain applies to custom problems only");
  require(std::isfinite(c.forcing), "forcing must be finite");
  require(c.problem == "custom" || c.forcing == 0.0, "forcing applies to custom problems only");
  require(c.levels >= 1, "levels >= 1");
  require(c.level >= 0, "level >= 0");
  if (c.command == "eoc" || c.command == "approx-eoc") require(c.levels >= 2, "levels >= 2 for a convergence study");
  if (c.fine_level) require(*c.fine_level >= c.levels - 1, "fine_level >= levels - 1");
  if (c.nu) require(*c.nu > 0.0 && std::isfinite(*c.nu), "nu > 0");
  require(!c.nus.empty(), "nus must not be empty");
  for (double nu : c.nus) require(nu > 0.0 && std::isfinite(nu), "every value in nus must be > 0");
  if (c.bounds) {
    require(!std::isnan(c.bounds->first) && !std::isnan(c.bounds->second), "bounds must be numbers");
    require(c.bounds->first < c.bounds->second, "bounds must satisfy a < b");
    require(c.bounds->first < kInfinity && c.bounds->second > -kInfinity, "bounds must admit a finite control");
  }
  require(c.theta == 0.0, "theta = 0 (the L2 fidelity term is not supported)");
  require(c.quad_degree >= 1 && c.quad_degree <= 10, "quad_degree in 1..10");
  require(c.assembly_degree >= 1 && c.assembly_degree <= 10, "assembly_degree in 1..10");
  require(c.tol > 0.0 && std::isfinite(c.tol), "tol > 0");
  require(c.maxit >= 1, "maxit >= 1");
  require(!c.output_dir.empty(), "output_dir must not be empty");
  require(!c.formats.empty(), "formats must name at least one of csv, vtk, txt");
  for (const auto& f : c.formats) require(kFormats.count(f) == 1, "formats must be a subset of csv, vtk, txt");

  if (is_benchmark(c.problem)) {
    require(c.points.empty(), "exact benchmarks fix their observation point");
    require(!c.nu || *c.nu == 1.0, "exact benchmarks require nu = 1");
    require(!c.bounds || (c.bounds->first == -kInfinity && c.bounds->second == kInfinity),
            "exact benchmarks are unconstrained");
  }
  if (c.command == "eoc") require(is_benchmark(c.problem), "eoc needs a problem with an exact solution");
  if (c.problem == "custom") require(!c.points.empty(), "custom problems need at least one point");
  const int dim = problem_dim(c);
  for (const auto& p : c.points) {
    require(static_cast<int>(p.coords.size()) <= dim, "point coordinates must match the domain dimension");
    for (double x : p.coords) require(std::isfinite(x), "point coordinates must be finite");
    require(std::isfinite(p.target), "point targets must be finite");
  }
}

std::string render(const RunConfig& c) {
  std::ostringstream out;
  out << "command=" << c.command << '\n';
  out << "problem=" << c.problem << '\n';
  out << "domain=" << c.domain << '\n';
  out << "forcing=" << number(c.forcing) << '\n';
  out << "levels=" << c.levels << '\n';
  out << "level=" << c.level << '\n';
  if (c.fine_level) out << "fine_level=" << *c.fine_level << '\n';
  if (c.nu) out << "nu=" << number(*c.nu) << '\n';
  out << "nus=" << join(c.nus) << '\n';
  if (c.bounds) {
    if (c.bounds->first == -kInfinity && c.bounds->second == kInfinity) {
      out << "bounds=none\n";
    } else {
      out << "bounds=" << number(c.bounds->first) << ',' << number(c.bounds->second) << '\n';
    }
  }
  if (!c.points.empty()) {
    out << "points=";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      std::vector<double> values = c.points[i].coords;
      values.push_back(c.points[i].target);
      out << (i ? ";" : "") << join(values);
    }
    out << '\n';
  }
  out << "theta=" << number(c.theta) << '\n';
  out << "quad_degree=" << c.quad_degree << '\n';
  out << "assembly_degree=" << c.assembly_degree << '\n';
  out << "tol=" << number(c.tol) << '\n';
  out << "maxit=" << c.maxit << '\n';
  out << "output_dir=" << c.output_dir << '\n';
  out << "formats=";
  for (std::size_t i = 0; i < c.formats.size(); ++i) out << (i ? "," : "") << c.formats[i];
  out << '\n';
  return out.str();
}

ProblemFamily resolve_family(const RunConfig& c) {
  ProblemFamily base;
  if (c.problem == "benchmark2d") {
    base = benchmark_2d().family;
  } else if (c.problem == "benchmark3d") {
    base = benchmark_3d().family;
  } else if (c.problem == "constrained2d") {
    base = constrained_2d_family();
  } else if (c.problem == "fivepoint2d") {
    base = {"fivepoint2d", [](int level) { return five_point_2d(4 << level, 1e-4); },
            [](int level) { return std::sqrt(2.0) / (4 << level); }};
  } else {
    const std::string domain = c.domain;
    const double forcing = c.forcing;
    base.name = "custom";
    base.spec = [domain, forcing](int level) {
      ProblemSpec spec;
      spec.dofs = std::make_shared<DofMap>(domain_mesh(domain, level));
      if (forcing != 0.0) spec.forcing = [forcing](const Point&) { return forcing; };
      return spec;
    };
    if (domain == "square") {
      base.h = [](int level) { return std::sqrt(2.0) / (4 << level); };
    } else if (domain == "disk") {
      base.h = [](int level) { return std::ldexp(0.5, -level); };
    } else {
      base.h = [](int level) { return std::ldexp(1.0, -level); };
    }
  }
  ProblemFamily family = base;
  family.spec = [base_spec = base.spec, c](int level) {
    ProblemSpec spec = base_spec(level);
    if (c.nu) spec.nu = *c.nu;
    if (c.bounds) {
      spec.lower = c.bounds->first;
      spec.upper = c.bounds->second;
    }
    if (!c.points.empty()) {
      spec.points.clear();
      for (const auto& p : c.points) {
        ObservationPoint w;
        for (std::size_t k = 0; k < p.coords.size(); ++k) w.location[k] = p.coords[k];
        w.target = p.target;
        spec.points.push_back(w);
      }
    }
    spec.quad_degree = c.assembly_degree;
    return spec;
  };
  return family;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    std::filesystem::create_directories(c.output_dir);
    const ProblemFamily family = resolve_family(c);
    StudyOptions options;
    options.tol = c.tol;
    options.maxit = c.maxit;
    options.error_degree = c.quad_degree;

    if (c.command == "solve") {
      run_solve(c, family, out);
    } else if (c.command == "eoc") {
      ExactBenchmark benchmark = c.problem == "benchmark2d" ? benchmark_2d() : benchmark_3d();
      benchmark.family = family;
      emit(c, eoc_study(benchmark, c.levels, options), out);
    } else if (c.command == "approx-eoc") {
      emit(c, approx_eoc_study(family, c.levels, c.fine_level.value_or(-1), options), out);
    } else if (c.command == "newton-table") {
      emit(c, newton_rate_table(family.spec(c.level), options), out);
    } else {
      const auto builder = [&family, &c](double nu) {
        ProblemSpec spec = family.spec(c.level);
        spec.nu = nu;
        return spec;
      };
      emit(c, nu_sweep(builder, c.nus, options), out);
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidProblem& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PointOutsideMesh& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace pointctl
