#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <istream>
#include <string>

#include <json.hpp>

#include "narrative/error.hpp"

namespace narrative::jsonl {

using Json = nlohmann::json;

// Parses one line. Blank lines yield nullopt; anything but a JSON object
// raises ParseError.
std::optional<Json> parse_line(std::string line, const std::string& label, std::size_t number);

// Calls `fn(record, line_number)` for every non-blank line. Lines that are not
// a JSON object raise ParseError naming the line.
void for_each(std::istream& in, const std::string& label,
              const std::function<void(const Json&, std::size_t)>& fn);

std::ifstream open_in(const std::filesystem::path& path);
std::ofstream open_out(const std::filesystem::path& path);

// Typed field access; a missing or mistyped field raises ParseError.
std::string get_string(const Json& rec, const char* key, const std::string& label, std::size_t line);
long long get_int(const Json& rec, const char* key, const std::string& label, std::size_t line);
double get_real(const Json& rec, const char* key, const std::string& label, std::size_t line);
const Json& get_array(const Json& rec, const char* key, const std::string& label, std::size_t line);

// Compact single-line dump with stable key order.
std::string dump(const Json& rec);

}  // namespace narrative::jsonl
