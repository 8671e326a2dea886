#pragma once

namespace glnn {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kMetricsFormatVersion = 1;
inline constexpr const char* kGeneratorVersion = "glnn-0.1.0";

} // namespace glnn
