#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nbp/measures.hpp"

namespace nbp {

// One process per line:
//   {"row": n, "atoms": [{"loc": <float>, "mult": <int>}, ...]}
// Locations are written with 17 significant digits so that parsing returns
// the identical double.

struct JsonlRecord {
  std::uint64_t row = 0;
  MultisetPointProcess process;

  friend bool operator==(const JsonlRecord&, const JsonlRecord&) = default;
};

std::string to_jsonl(std::uint64_t row, const MultisetPointProcess& process);
std::string to_jsonl(std::uint64_t row, const SimplePointProcess& process);

/// Throws std::invalid_argument on malformed records.
JsonlRecord parse_jsonl(std::string_view line);

/// Reads every non-blank line of a stream.
std::vector<JsonlRecord> read_jsonl(std::istream& in);

}  // namespace nbp
