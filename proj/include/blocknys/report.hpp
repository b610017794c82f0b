#pragma once

#include <string>

#include <json.hpp>

namespace blocknys {

// Machine-readable run record: the effective configuration, the measured
// metrics, per-trial details, and explicit pass/fail checks, each tagged
// with the bound it was tested against. Timing lives in its own subobject so
// determinism comparisons can strip it.
class RunReport {
 public:
  explicit RunReport(std::string command);

  nlohmann::ordered_json& config() { return body_["config"]; }
  nlohmann::ordered_json& metrics() { return body_["metrics"]; }
  nlohmann::ordered_json& trials() { return body_["trials"]; }
  nlohmann::ordered_json& timing() { return body_["timing"]; }

  // relation is one of "<=", ">=", "=="; the check passes when
  // `value relation bound` holds (equality up to 1e-12 relative).
  void add_check(const std::string& name, double value,
                 const std::string& relation, double bound);
  void add_flag(const std::string& name, bool pass);

  void set_timing(const std::string& key, double milliseconds);

  bool passed() const;
  std::string to_json(int indent = 2) const;

  // Serialization with every timing field removed; byte-identical across
  // runs with the same seed and configuration.
  std::string stable_text() const;

  void write(const std::string& path) const;

 private:
  nlohmann::ordered_json body_;
};

}  // namespace blocknys
