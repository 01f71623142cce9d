#pragma once

// Command-line surface: configuration, the four commands and the
// verification suites. The executable in tools/ only forwards argv to run().

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotstokes/asymscan.hpp"
#include "rotstokes/core.hpp"
#include "rotstokes/errors.hpp"

namespace rotstokes::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Invalid configuration; `field()` names the offending entry (e.g. "grid.nx").
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class OutputFormat { csv, json };

struct KernelSpec {
  Vec2 x{2.0, 0.0};
  Vec2 y{0.0, 0.0};
  bool decompose = false;
};

struct GridSpec {
  double xmin = -4.0, xmax = 4.0;
  double ymin = -4.0, ymax = 4.0;
  int nx = 9, ny = 9;
};

struct FieldSpec {
  std::string preset = "rotational_gaussian";
  std::vector<std::pair<std::string, double>> parameters;
  std::string grid_file;  // CSV x1,x2,f1,f2 on a uniform grid; overrides preset
  bool gradient = false;
  bool residual = false;
  double fd_step = 1e-2;
};

// Scan quantities:
//   gamma_remainder     max_dir |Γ_a(r e, y) - x^⊥⊗y^⊥/(4π|x|²)|
//   gamma_mirror        max_dir |Γ_a(y, r e) - x^⊥⊗(re)^⊥/(4π r²)|   (x := scan.y held fixed)
//   grad_gamma          max_dir |∇_x Γ_a(r e, y)|
//   velocity_remainder  max_dir |u(r e) - torque x^⊥/(4π|x|²)| for the configured field
//   pressure_remainder  max_dir |p(r e) - force·x/(2π|x|²)|
struct ScanSpec {
  std::string quantity = "gamma_remainder";
  std::vector<double> radii{8.0, 16.0, 32.0, 64.0, 128.0};
  Vec2 y{1.0, 0.0};
  int directions = 16;
  double expected_exponent = -2.0;
  double tolerance = 0.15;
};

struct RunConfig {
  KernelParams params;
  int threads = 1;
  KernelSpec kernel;
  GridSpec grid;
  FieldSpec field;
  ScanSpec scan;
  std::string output;  // empty: stdout (kernel, field, verify); scan requires a path stem
  OutputFormat format = OutputFormat::csv;
  std::string suite = "all";
};

/// Parses a JSON document into a config (unknown keys are errors).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Throws ConfigError for invariants of `command` (grid counts >= 2, >= 4
/// radii, a != 0, known suite/quantity, ...).
void validate(const RunConfig& config, const std::string& command);

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
};

/// Suite names: centering, kernels, decay, potentials, exact, all.
const std::vector<std::string>& suite_names();

/// Runs one suite (or all, in the order of suite_names()) with the
/// quadrature controls of `params`. Checks run sequentially; `threads` is
/// used inside scans only. Output is independent of timing and thread count.
VerifyReport run_verify(const std::string& suite, const KernelParams& params, int threads);

std::string verify_report_json(const VerifyReport& report);

int cmd_kernel(const RunConfig& config, std::ostream& out);
int cmd_field(const RunConfig& config, std::ostream& out);
int cmd_verify(const RunConfig& config, std::ostream& out);
/// Writes <output>.json and <output>.csv.
int cmd_scan(const RunConfig& config, std::ostream& out);

/// Scan report for the configured quantity (no files written).
DecayReport run_scan(const RunConfig& config);

/// Full command line: parses flags, loads --config, applies overrides,
/// dispatches and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rotstokes::cli
