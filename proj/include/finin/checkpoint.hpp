#pragma once

#include <string>

#include "finin/model.hpp"

namespace finin {

// Binary model checkpoint: magic, config digest, config fields, bar
// standardizer, then named parameters with shape and little-endian f64
// payloads. Loading verifies the digest against the embedded config.
void save_checkpoint(const std::string& path, const FininModel& model);
FininModel load_checkpoint(const std::string& path);

}  // namespace finin
