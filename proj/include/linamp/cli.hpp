#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "linamp/ampmap.hpp"
#include "linamp/fock.hpp"

namespace linamp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTruncation = 3;
inline constexpr int kExitUnphysical = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AncillaConfig {
  std::string type = "vacuum";  // vacuum | thermal | lambda_family | weights | number
  double nbar = 0.0;
  double lambda = 0.0;
  std::vector<double> weights;
  int n = 0;
};

struct InputConfig {
  std::string type = "coherent";  // coherent | thermal | number
  cplx beta = 1.0;
  double nbar = 0.0;
  int n = 0;
};

struct RunConfig {
  double gain = 4.0;
  AncillaConfig ancilla;
  InputConfig input;
  int dim = 60;
  double grid_extent = 12.0;
  int grid_steps = 120;
  std::string out_dir = ".";
  bool quasidist = false;
  double tol = 1e-6;
};

// Missing fields keep their defaults; unknown keys throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

fock::AncillaState make_ancilla(const RunConfig& c);
fock::FockOperator make_input(const RunConfig& c);

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;
  std::string message;
};

CommandResult cmd_amplify(const RunConfig& c);
CommandResult cmd_figure(const std::string& which, const RunConfig& c);
// kind is "ak" or "ml"; K < 0 selects the largest order the file supports.
CommandResult cmd_gate(const std::string& moments_file, const std::string& kind, int K,
                       double zero_tol, const std::string& out_dir);
CommandResult cmd_moments(const RunConfig& c, int K, bool allow_high_order = false);

int run(int argc, char** argv);

}  // namespace linamp::cli
