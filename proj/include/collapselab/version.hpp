#pragma once

namespace collapselab {

inline constexpr const char* kArtifactVersion = "collapselab 0.1.0";

}  // namespace collapselab
