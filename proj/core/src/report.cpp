#include "dip/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "dip/common.hpp"

namespace dip {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("rename '" + tmp + "' -> '" + path + "': " + ec.message());
  }
}

namespace {

std::string now_utc_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Report Report::wrap(nlohmann::ordered_json body) {
  Report report;
  report.body = std::move(body);
  report.created_at = now_utc_iso8601();
  report.checksum = fnv1a_hex(report.body.dump());
  return report;
}

std::string Report::to_string() const {
  nlohmann::ordered_json doc;
  doc["meta"] = {{"created_at", created_at}, {"checksum", checksum}};
  doc["body"] = body;
  return doc.dump(2) + "\n";
}

Report Report::parse(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: invalid JSON: ") + e.what());
  }
  if (!doc.contains("body") || !doc.contains("meta")) {
    throw ParseError("report: missing body or meta section");
  }
  Report report;
  report.body = doc["body"];
  report.created_at = doc["meta"].value("created_at", "");
  report.checksum = doc["meta"].value("checksum", "");
  return report;
}

void Report::save(const std::string& path) const {
  atomic_write_file(path, to_string());
}

Report Report::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("report: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse(text);
}

namespace {

constexpr double kIdentityTol = 1e-9;

bool close(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kIdentityTol * scale;
}

double field(const nlohmann::ordered_json& entry, const char* name,
             ValidationResult& result, const std::string& where) {
  if (!entry.contains(name) || !entry[name].is_number()) {
    result.violations.push_back({where, std::string("missing numeric field '") +
                                            name + "'"});
    return 0.0;
  }
  return entry[name].get<double>();
}

void check_identity(ValidationResult& result, const std::string& where,
                    const std::string& name, double lhs, double rhs) {
  if (!close(lhs, rhs)) {
    result.violations.push_back(
        {where, name + " violated: " + std::to_string(lhs) +
                    " != " + std::to_string(rhs)});
  }
}

void verify_dip_entry(const nlohmann::ordered_json& entry,
                      const std::string& where, ValidationResult& result) {
  const double v_j = field(entry, "v_j", result, where);
  const double v_jbar = field(entry, "v_jbar", result, where);
  const double v_joint = field(entry, "v_joint", result, where);
  const double psi = field(entry, "psi", result, where);
  const double surplus = field(entry, "interaction_surplus", result, where);
  const double dep = field(entry, "dep", result, where);
  const double cross_pred = field(entry, "cross_pred", result, where);
  const double covariance = field(entry, "covariance", result, where);
  check_identity(result, where, "psi = v_joint - v_j - v_jbar", psi,
                 v_joint - v_j - v_jbar);
  check_identity(result, where, "psi = interaction_surplus - dep", psi,
                 surplus - dep);
  check_identity(result, where, "dep = cross_pred + covariance", dep,
                 cross_pred + covariance);
}

void verify_loco_entry(const nlohmann::ordered_json& entry,
                       const std::string& where, ValidationResult& result) {
  const double loco = field(entry, "loco", result, where);
  const double standalone = field(entry, "standalone", result, where);
  const double interaction = field(entry, "interaction", result, where);
  const double dependencies = field(entry, "dependencies", result, where);
  const double cross_pred = field(entry, "cross_pred", result, where);
  const double covariance = field(entry, "covariance", result, where);
  check_identity(result, where, "loco = standalone + interaction - dependencies",
                 loco, standalone + interaction - dependencies);
  check_identity(result, where, "dependencies = cross_pred + covariance",
                 dependencies, cross_pred + covariance);
}

void verify_sage_entry(const nlohmann::ordered_json& entry,
                       const std::string& where, ValidationResult& result) {
  const double phi = field(entry, "phi", result, where);
  const double standalone = field(entry, "standalone", result, where);
  const double avg_interaction = field(entry, "avg_interaction", result, where);
  const double avg_dependencies =
      field(entry, "avg_dependencies", result, where);
  check_identity(result, where,
                 "phi = standalone + avg_interaction - avg_dependencies", phi,
                 standalone + avg_interaction - avg_dependencies);
}

}  // namespace

ValidationResult verify_report(const Report& report) {
  ValidationResult result;

  const std::string version = report.body.value("schema_version", "");
  if (version != kReportSchemaVersion) {
    result.violations.push_back(
        {"schema", "version mismatch: got '" + version + "', expected '" +
                       kReportSchemaVersion + "'"});
  }
  if (!report.checksum.empty() &&
      report.checksum != fnv1a_hex(report.body.dump())) {
    result.violations.push_back({"checksum", "body checksum mismatch"});
  }

  const std::string command = report.body.value("command", "");
  const auto entries = report.body.contains("entries")
                           ? report.body["entries"]
                           : nlohmann::ordered_json::array();

  if (command == "decompose" || command == "pairwise") {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      verify_dip_entry(entries[i], "entries[" + std::to_string(i) + "]",
                       result);
    }
  } else if (command == "loco") {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      verify_loco_entry(entries[i], "entries[" + std::to_string(i) + "]",
                        result);
    }
    if (report.body.contains("per_fold")) {
      const auto& per_fold = report.body["per_fold"];
      for (std::size_t f = 0; f < per_fold.size(); ++f) {
        for (std::size_t i = 0; i < per_fold[f].size(); ++i) {
          verify_loco_entry(per_fold[f][i],
                            "per_fold[" + std::to_string(f) + "][" +
                                std::to_string(i) + "]",
                            result);
        }
      }
    }
  } else if (command == "sage") {
    double phi_sum = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      verify_sage_entry(entries[i], "entries[" + std::to_string(i) + "]",
                        result);
      phi_sum += entries[i].value("phi", 0.0);
    }
    const bool exact = report.body.value("exact", false);
    const double v_full = report.body.value("v_full", 0.0);
    if (exact) {
      check_identity(result, "entries", "sum(phi) = v_full", phi_sum, v_full);
    }
    if (report.body.contains("ordering_totals")) {
      const auto& totals = report.body["ordering_totals"];
      for (std::size_t i = 0; i < totals.size(); ++i) {
        check_identity(result, "ordering_totals[" + std::to_string(i) + "]",
                       "telescoping sum = v_full", totals[i].get<double>(),
                       v_full);
      }
    }
  } else if (command == "example") {
    // Nothing numeric to re-check.
  } else {
    result.violations.push_back({"command", "unknown command '" + command + "'"});
  }
  return result;
}

}  // namespace dip
