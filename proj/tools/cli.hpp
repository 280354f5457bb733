#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nbp/measures.hpp"

namespace nbp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

inline constexpr std::uint64_t kDefaultSeed = 20240601;

enum class Mode { Bep, NbpKnown, NbpIbp, NbpHier };

struct RunConfig {
  Mode mode = Mode::Bep;
  std::optional<double> r;
  std::optional<double> c;
  std::optional<double> gamma;
  std::uint64_t rows = 1;
  std::optional<unsigned> depth;
  std::uint64_t seed = kDefaultSeed;
  std::vector<FixedAtom> atoms;
  std::string out;
  std::uint64_t max_coins = 1'000'000;
  std::uint64_t max_proposals = 10'000;
};

const char* mode_name(Mode mode);

/// Parses "loc:mass,loc:mass". Throws std::invalid_argument.
std::vector<FixedAtom> parse_atoms(const std::string& text);

/// Mode-specific presence and range checks. Throws std::invalid_argument.
void validate_config(const RunConfig& config, bool require_rows = true);

int cmd_sample(const RunConfig& config, std::ostream& err);
int cmd_validate(const std::string& suite, std::uint64_t seed, std::uint64_t samples,
                 const std::string& report_path, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nbp::cli
