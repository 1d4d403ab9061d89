#pragma once

#include <string>
#include <string_view>

namespace glmp {

/// Lookup key for identifiers: ASCII-lowercased, with runs of spaces,
/// underscores and hyphens collapsed to a single '_' and trimmed at both
/// ends. "Reaction time", "reaction_time" and "REACTION-TIME" share a key.
std::string name_key(std::string_view name);

}  // namespace glmp
