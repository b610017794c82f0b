#include "blocknys/report.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "blocknys/errors.hpp"

namespace blocknys {

RunReport::RunReport(std::string command) {
  body_["command"] = std::move(command);
  body_["config"] = nlohmann::ordered_json::object();
  body_["metrics"] = nlohmann::ordered_json::object();
  body_["trials"] = nlohmann::ordered_json::array();
  body_["checks"] = nlohmann::ordered_json::array();
  body_["passed"] = true;
  body_["timing"] = nlohmann::ordered_json::object();
}

void RunReport::add_check(const std::string& name, double value,
                          const std::string& relation, double bound) {
  bool pass = false;
  if (relation == "<=") {
    pass = value <= bound;
  } else if (relation == ">=") {
    pass = value >= bound;
  } else if (relation == "==") {
    pass = std::abs(value - bound) <=
           1e-12 * std::max({1.0, std::abs(value), std::abs(bound)});
  } else {
    throw InvalidSpecError("report: unknown check relation " + relation);
  }
  nlohmann::ordered_json check;
  check["name"] = name;
  check["value"] = value;
  check["relation"] = relation;
  check["bound"] = bound;
  check["pass"] = pass;
  body_["checks"].push_back(check);
  if (!pass) body_["passed"] = false;
}

void RunReport::add_flag(const std::string& name, bool pass) {
  nlohmann::ordered_json check;
  check["name"] = name;
  check["pass"] = pass;
  body_["checks"].push_back(check);
  if (!pass) body_["passed"] = false;
}

void RunReport::set_timing(const std::string& key, double milliseconds) {
  body_["timing"][key] = milliseconds;
}

bool RunReport::passed() const { return body_.at("passed").get<bool>(); }

std::string RunReport::to_json(int indent) const {
  return body_.dump(indent);
}

std::string RunReport::stable_text() const {
  nlohmann::ordered_json copy = body_;
  copy.erase("timing");
  return copy.dump(2);
}

void RunReport::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out << to_json(2) << "\n";
  if (!out) throw IoError("write failed for report: " + path);
}

}  // namespace blocknys
