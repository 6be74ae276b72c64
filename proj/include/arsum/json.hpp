#pragma once

#include <json.hpp>

namespace arsum {

/// Insertion-ordered so serialized files keep a stable, readable key order.
using Json = nlohmann::ordered_json;

}  // namespace arsum
