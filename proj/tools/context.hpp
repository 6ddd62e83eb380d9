#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nilmix/io/json_io.hpp"

namespace nilmix::cli {

using io::json;

enum ExitCode : int {
  kOk = 0,
  kOperational = 1,
  kSchema = 2,
  kBudget = 3,
  kFalsification = 4,
  kPrecision = 5,
};

/// Settings shared by every command. `inputs` starts as the config block and
/// is completed with every default the command reads, so that it can be
/// logged as the resolved config.
struct RunContext {
  json inputs;
  long precision = 128;
  std::uint64_t seed = 1;
  std::uint64_t budget = 100'000'000;
  unsigned jobs = 1;

  /// inputs[key], inserting `fallback` first when absent.
  const json& get(const char* key, json fallback) {
    if (!inputs.contains(key)) inputs[key] = std::move(fallback);
    return inputs[key];
  }
  const json& need(const char* key) { return io::require(inputs, key); }
};

struct CommandResult {
  json result = json::object();
  std::optional<std::string> csv;  ///< set when the command produces a table
  int status = kOk;
  std::string diagnostic;          ///< reason for a nonzero status

  void raise(int code, const std::string& why) {
    if (code > status) status = code;
    if (!diagnostic.empty()) diagnostic += "; ";
    diagnostic += why;
  }
};

}  // namespace nilmix::cli
