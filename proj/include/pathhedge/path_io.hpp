#pragma once

#include <filesystem>
#include <string>

#include "pathhedge/path.hpp"

namespace pathhedge {

/// 17 significant digits: round-trips doubles exactly.
std::string format_double(double v);

/// CSV body: header `t,value[,value2,...]`, one breakpoint per row. The JSON
/// manifest carries mode, dim, the initial value and any explicit left
/// limits. Round-trips are bit exact.
void write_path_csv(const CadlagPath& path, const std::filesystem::path& csv_file,
                    const std::filesystem::path& manifest_file);
CadlagPath read_path_csv(const std::filesystem::path& csv_file,
                         const std::filesystem::path& manifest_file);

}  // namespace pathhedge
