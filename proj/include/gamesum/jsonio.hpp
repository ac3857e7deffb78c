#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamesum::jsonio {

// Reads a .jsonl file; parse failures report the 1-based line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

// All writers go through a temp-file-then-rename so interrupted runs never
// leave half-written artifacts.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_jsonl_atomic(const std::filesystem::path& path,
                        std::span<const nlohmann::json> lines);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace gamesum::jsonio
