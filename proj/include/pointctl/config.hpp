#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pointctl/bench.hpp"
#include "pointctl/errors.hpp"

namespace pointctl {

/// Malformed config text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Well-formed config that violates an invariant; the message names it.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// One observation point: x,y,g or x,y,z,g.
struct ConfigPoint {
  std::vector<double> coords;
  double target = 0.0;

  bool operator==(const ConfigPoint&) const = default;
};

/// Flat key=value run description. Lines starting with '#' are comments.
///
///   command      solve | eoc | approx-eoc | newton-table | nu-sweep
///   problem      benchmark2d | benchmark3d | constrained2d | fivepoint2d | custom
///   domain       square | disk | ball            (custom only)
///   forcing      constant right-hand side f      (custom only)
///   levels       number of study levels
///   level        mesh level of single solves and of the nu sweep
///   fine_level   reference level of approx-eoc
///   nu, nus      cost parameter, sweep values "1e-1,1e-2"
///   bounds       "a,b" or "none"
///   points       "x,y,g;x,y,g"
///   theta        weight of an L2 fidelity term; only 0 is supported
///   quad_degree  error quadrature degree, assembly_degree for assembly
///   tol, maxit   Newton stopping tolerance and iteration cap
///   output_dir, formats ("csv,vtk,txt")
struct RunConfig {
  std::string command = "solve";
  std::string problem = "constrained2d";
  std::string domain = "square";
  double forcing = 0.0;
  int levels = 4;
  int level = 3;
  std::optional<int> fine_level;
  std::optional<double> nu;
  std::vector<double> nus{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  /// Unset: the problem's own bounds. Set to (-inf, inf) by "bounds=none".
  std::optional<std::pair<double, double>> bounds;
  std::vector<ConfigPoint> points;
  double theta = 0.0;
  int quad_degree = 10;
  int assembly_degree = 5;
  double tol = 1e-8;
  int maxit = 30;
  std::string output_dir = ".";
  std::vector<std::string> formats{"csv", "txt"};

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates. Throws ParseError or ValidationError.
RunConfig parse_config(const std::string& text);

/// Throws ValidationError naming the first violated invariant.
void validate(const RunConfig& config);

/// Canonical text form; parse_config(render(c)) == c.
std::string render(const RunConfig& config);

/// Problem family of a config with its overrides applied.
ProblemFamily resolve_family(const RunConfig& config);

/// Executes the command, printing tables to `out` and writing the requested
/// files. Returns 0 on success, 2 for configuration errors, 3 for solver failures.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pointctl
