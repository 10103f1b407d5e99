#pragma once

// Command runner behind the nori executable.  Each command walks one corpus
// section, computes every entry (in parallel) and reports them in
// declaration order as a text table and a JSON certificate.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace nori::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct Options {
  std::string command;
  std::string corpus;
  std::optional<Ring> ring;
  std::optional<std::string> out;
  std::size_t budget = 100000;
  std::optional<std::size_t> depth;
  std::optional<std::string> only;  // restrict to one entry name
};

enum ExitCode { kOk = 0, kInvalidInput = 1, kCheckFailed = 2 };

struct RunResult {
  int exit_code = kOk;
  std::string table;
  json certificate;
};

/// The 20 module commands; "all" runs each of them in this order.
const std::vector<std::string>& command_names();
/// q for the diagram/bialgebra commands, z otherwise.
Ring default_ring(const std::string& command);

RunResult run(const Options& opts);
/// Same, on an already parsed corpus.
RunResult run(const Options& opts, const Corpus& corpus);

/// Canonical serialization: two-space indent, trailing newline.
std::string certificate_text(const json& certificate);

}  // namespace nori::cli
