#pragma once

#define CFC_LAB_VERSION "0.1.0"

namespace cfc {

inline const char* version() { return CFC_LAB_VERSION; }

}  // namespace cfc
