#pragma once

#include "config.hpp"

#include <string>
#include <vector>

namespace holdercover::cli {

struct Outcome {
  Json result = Json::object();
  std::vector<std::vector<std::string>> rows;  // CSV body, columns from the command spec
  bool certificate_failed = false;
  std::string failure;
};

/// Runs one command on a resolved config. Library errors propagate.
Outcome run_command(const std::string& name, const Json& config);

}  // namespace holdercover::cli
