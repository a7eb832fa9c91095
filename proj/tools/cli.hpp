#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hbml/hbsampler.hpp"
#include "hbml/model.hpp"
#include "hbml/simulate.hpp"

namespace hbml::cli {

enum class Subcommand { Fit, FitWtp, Simulate, Summarize, Convert };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Environment variable supplying the default --seed.
inline constexpr const char* kSeedEnv = "HBML_SEED";

struct ConvertOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  std::string choice_var;
  std::vector<std::string> case_vars;
  std::string id_var;
  std::string gen = "choice";
  bool replace = false;
};

struct SummarizeOptions {
  std::filesystem::path input;
  std::string depvar = "draws";
};

struct CliCommand {
  Subcommand subcommand = Subcommand::Fit;
  // fit / fitwtp
  std::filesystem::path data;
  ModelSpec spec;
  SamplerConfig config;
  std::optional<std::filesystem::path> results;
  // simulate
  SimulationSpec simulation;
  std::filesystem::path simulate_out;
  SummarizeOptions summarize;
  ConvertOptions convert;
  /// Set when --help was requested; holds the help text.
  std::optional<std::string> help;
};

/// Parses argv (argv[0] is the program name). Throws ValidationError on
/// unknown flags, missing required options, or inconsistent values.
CliCommand parse(int argc, const char* const* argv);
CliCommand parse(const std::vector<std::string>& args);

/// Executes a parsed command; returns the process exit code.
int run(const CliCommand& command, std::ostream& out, std::ostream& err);

/// parse + run with error-to-exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::vector<double> parse_vector(const std::string& text);
/// Rows separated by ';', entries by ','.
Matrix parse_matrix(const std::string& text);
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace hbml::cli
