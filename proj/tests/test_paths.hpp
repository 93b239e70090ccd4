#pragma once

#include <filesystem>

namespace test_paths {
inline const std::filesystem::path data_dir = JITTERSCOPE_DATA_DIR;
inline const std::filesystem::path tests_data_dir = JITTERSCOPE_TESTS_DATA_DIR;
}  // namespace test_paths
