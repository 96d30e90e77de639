#pragma once

// JSON persistence of optimizer state and of the operator session file.
//
// Session file = optimizer state document plus optional `pending {vp, em}`
// and `state_hash`, the FNV-1a 64 hex digest of the compact dump of the
// document without the `state_hash` key.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fffopt/optimizer.hpp"

namespace fffopt {

nlohmann::json state_to_json(const OptimizerState& state);

/// Throws ValidationError naming the first offending field. Feasibility is
/// recomputed from roughness and lambda, never read.
OptimizerState state_from_json(const nlohmann::json& j);

struct Session {
  OptimizerState state;
  std::optional<PrintParameters> pending;

  friend bool operator==(const Session&, const Session&) = default;
};

std::string content_hash(const nlohmann::json& document_without_hash);

/// Pretty-printed session document including its state_hash, newline terminated.
std::string serialize_session(const Session& session);

/// Parses and validates; a present state_hash must match the content.
Session parse_session(const std::string& text);

}  // namespace fffopt
