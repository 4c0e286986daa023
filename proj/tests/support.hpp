#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mbt/model_io.hpp"

namespace testing {

inline std::filesystem::path source_dir() {
    return MBT_SOURCE_DIR;
}

inline std::filesystem::path quizup_dir() {
    return source_dir() / "models" / "quizup";
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spill(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

/// Flattened model from DSL text.
inline mbt::EfsmModel dsl_model(const std::string& text) {
    return mbt::flatten(mbt::parse_dsl(text));
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("mbt-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing
