#pragma once

#include <string>
#include <vector>

namespace rmcap {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "rmcap";

// Fixed-point decimal formatting. All machine-readable text outputs go
// through this so that files are reproducible byte for byte.
std::string fmt_fixed(double v, int decimals = 9);

// Shortest float formatting for human-facing messages ("%.12g").
std::string fmt_g(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Whitespace-separated numbers; '#' starts a comment that runs to end of line.
std::vector<double> read_number_file(const std::string& path);

}  // namespace rmcap
