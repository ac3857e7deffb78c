#include "gamesum/jsonio.hpp"

#include <fstream>
#include <sstream>

#include "gamesum/common.hpp"

namespace gamesum::jsonio {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path.string());
  }
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Tolerate blank lines and trailing whitespace-only lines.
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": malformed JSON line");
    }
    out.push_back(std::move(value));
  }
  return out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path.string());
  }
  json value = json::parse(in, nullptr, false);
  if (value.is_discarded()) {
    throw ValidationError(path.string() + ": malformed JSON");
  }
  return value;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw RuntimeError("cannot write file: " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw RuntimeError("short write: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw RuntimeError("rename failed for " + path.string() + ": " + ec.message());
  }
}

void write_jsonl_atomic(const fs::path& path, std::span<const json> lines) {
  std::ostringstream body;
  for (const json& line : lines) {
    body << line.dump() << "\n";
  }
  write_text_atomic(path, body.str());
}

void write_json_atomic(const fs::path& path, const json& value) {
  write_text_atomic(path, value.dump(2) + "\n");
}

}  // namespace gamesum::jsonio
