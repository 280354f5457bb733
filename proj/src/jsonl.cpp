#include "nbp/jsonl.hpp"

#include <cstdio>
#include <istream>
#include <stdexcept>

#include "json.hpp"

namespace nbp {

namespace {

void append_entry(std::string& out, double loc, std::uint64_t mult, bool first) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s{\"loc\": %.17g, \"mult\": %llu}", first ? "" : ", ", loc,
                static_cast<unsigned long long>(mult));
  out += buf;
}

}  // namespace

std::string to_jsonl(std::uint64_t row, const MultisetPointProcess& process) {
  std::string out = "{\"row\": " + std::to_string(row) + ", \"atoms\": [";
  bool first = true;
  for (const auto& e : process.entries()) {
    append_entry(out, e.location.value, e.multiplicity, first);
    first = false;
  }
  out += "]}";
  return out;
}

std::string to_jsonl(std::uint64_t row, const SimplePointProcess& process) {
  std::string out = "{\"row\": " + std::to_string(row) + ", \"atoms\": [";
  bool first = true;
  for (double s : process.atoms()) {
    append_entry(out, s, 1, first);
    first = false;
  }
  out += "]}";
  return out;
}

JsonlRecord parse_jsonl(std::string_view line) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("parse_jsonl: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("row") || !doc.contains("atoms") ||
      !doc["row"].is_number_unsigned() || !doc["atoms"].is_array()) {
    throw std::invalid_argument("parse_jsonl: expected {\"row\": n, \"atoms\": [...]}");
  }
  std::vector<MultisetEntry> entries;
  for (const auto& atom : doc["atoms"]) {
    if (!atom.is_object() || !atom.contains("loc") || !atom.contains("mult") ||
        !atom["loc"].is_number() || !atom["mult"].is_number_unsigned() ||
        atom["mult"].get<std::uint64_t>() == 0) {
      throw std::invalid_argument("parse_jsonl: malformed atom entry");
    }
    entries.push_back({Location{atom["loc"].get<double>()}, atom["mult"].get<std::uint64_t>()});
  }
  return {doc["row"].get<std::uint64_t>(), MultisetPointProcess(std::move(entries))};
}

std::vector<JsonlRecord> read_jsonl(std::istream& in) {
  std::vector<JsonlRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_jsonl(line));
  }
  return records;
}

}  // namespace nbp
