#pragma once

// Certificate reports shared by the CLI and the acceptance suite.
// Reports are deterministic: no timestamps, no addresses, fixed
// ordering, so repeated runs are byte-identical.

#include <json.hpp>

#include <string>
#include <vector>

namespace twpatch {

inline constexpr const char* kToolVersion = "twpatch 1.0.0";
inline constexpr const char* kReportSchema = "twpatch-report/1";

struct Certificate {
  std::string name;
  std::string status;  // PASS | FAIL | INCONCLUSIVE
  std::string claim;   // stable tag for what is being checked
  nlohmann::json payload;
};

struct Report {
  std::string tool = kToolVersion;
  std::string schema = kReportSchema;
  nlohmann::json config;
  std::vector<Certificate> certificates;

  void add(const std::string& name, bool pass, const std::string& claim,
           nlohmann::json payload = nlohmann::json::object()) {
    certificates.push_back({name, pass ? "PASS" : "FAIL", claim, std::move(payload)});
  }
  void add_status(const std::string& name, const std::string& status,
                  const std::string& claim,
                  nlohmann::json payload = nlohmann::json::object()) {
    certificates.push_back({name, status, claim, std::move(payload)});
  }
  bool any_fail() const {
    for (const auto& c : certificates)
      if (c.status == "FAIL") return true;
    return false;
  }
  std::string to_json() const;
  std::string to_text() const;
};

}  // namespace twpatch
