#pragma once

#ifndef SCONCORD_VERSION
#define SCONCORD_VERSION "0.1.0+unknown"
#endif

namespace sconcord {

inline constexpr const char* artifact_version = SCONCORD_VERSION;

}  // namespace sconcord
