#pragma once

#include <string>

#include <json.hpp>

namespace entropic {

/// Serializes JSON with floating-point numbers printed at 17 significant
/// digits and object keys in sorted order, so identical inputs always yield
/// byte-identical output.
std::string dump_stable(const nlohmann::json& j);

/// FNV-1a 64-bit digest of a byte string, hex encoded.
std::string digest64(const std::string& bytes);

/// Flattens a report into `key,value` CSV rows (JSON-pointer style keys).
/// Commands with a natural table shape (`basisrisk` profiles, `expand`
/// epsilon tables) emit those tables instead; see the README for the fixed
/// column orders.
std::string to_csv(const nlohmann::json& report);

} // namespace entropic
