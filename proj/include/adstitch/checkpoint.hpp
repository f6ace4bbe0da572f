#pragma once

#include <string>

#include "adstitch/model.hpp"

namespace adstitch {

// Binary model snapshot, little-endian, float32 weights verbatim; loading a
// checkpoint reproduces scores bit-exactly. Errors name the section that
// failed so truncated or mismatched files are diagnosable.
void save_checkpoint(const ModelBank& bank, const std::string& path);
ModelBank load_checkpoint(const std::string& path);

}  // namespace adstitch
