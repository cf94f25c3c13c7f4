#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scfault/network.hpp"

namespace scfault {

// A parsed case document: the network plus its named faults.
struct LoadedCase {
  NetworkCase network;
  std::vector<FaultSpec> faults;

  const FaultSpec& fault(const std::string& name) const;
};

// Parse failures carry the JSON line for syntax errors or the section path
// (for example "ibrs[0].model.tabular.rows[3]") for content errors.
class CaseParseError : public CaseError {
 public:
  CaseParseError(const std::string& origin, const std::string& where, const std::string& what);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

LoadedCase parse_case(std::string_view text, const std::string& origin = "<case>");

// Loads an embedded fixture by name, or else a file from disk.
LoadedCase load_case(const std::string& name_or_path);

// Embedded fixtures in stable order.
std::vector<std::string> fixture_names();
std::optional<std::string> fixture_text(std::string_view name);

}  // namespace scfault
