#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dip {

inline constexpr const char* kReportSchemaVersion = "1";

// Machine-readable result document. `body` is the checksummed payload and is
// byte-identical across runs with the same config and seed; the timestamp
// lives outside it.
struct Report {
  nlohmann::ordered_json body;
  std::string created_at;  // ISO-8601 UTC
  std::string checksum;    // fnv1a-64 hex of the serialized body

  static Report wrap(nlohmann::ordered_json body);
  std::string to_string() const;
  static Report parse(const std::string& text);

  void save(const std::string& path) const;  // write-then-rename
  static Report load(const std::string& path);
};

struct Violation {
  std::string where;
  std::string what;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Re-checks schema, checksum and every additivity identity the report's
// numbers must satisfy (to 1e-9 relative). Violations are data, not errors.
ValidationResult verify_report(const Report& report);

// fnv1a-64 of a byte string, lower-case hex.
std::string fnv1a_hex(const std::string& bytes);

// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace dip
