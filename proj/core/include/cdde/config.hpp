#pragma once

#include <string>

#include "cdde/model.hpp"

namespace cdde {

/// Parse a JSON model document:
///   { "stages": [ { "feedback": {...}, "kernel": {...},
///                   "gate": {...}, "clearance": {...} }, ... ],
///     "labels": ["M","I","E"] }
/// "kernel" defaults to {"kind":"none"} and "gate" to {"kind":"constant","c":1}.
/// Malformed documents and invariant violations raise ParseError with a
/// field path in the message.
CyclicModel parse_model_config(const std::string& text);

/// Canonical JSON form; parse_model_config(serialize_model(m)) == m.
std::string serialize_model(const CyclicModel& m);

} // namespace cdde
