#include "narrative/jsonl.hpp"

namespace narrative::jsonl {

std::optional<Json> parse_line(std::string line, const std::string& label, std::size_t number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) return std::nullopt;
    Json rec;
    try {
        rec = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw ParseError(label, number, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(label, number, "record is not an object");
    return rec;
}

void for_each(std::istream& in, const std::string& label,
              const std::function<void(const Json&, std::size_t)>& fn) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto rec = parse_line(std::move(line), label, number)) fn(*rec, number);
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

namespace {

const Json& field(const Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto it = rec.find(key);
    if (it == rec.end()) throw ParseError(label, line, std::string("missing field `") + key + "`");
    return *it;
}

}  // namespace

std::string get_string(const Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto& v = field(rec, key, label, line);
    if (!v.is_string()) throw ParseError(label, line, std::string("field `") + key + "` must be a string");
    return v.get<std::string>();
}

long long get_int(const Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto& v = field(rec, key, label, line);
    if (!v.is_number_integer()) throw ParseError(label, line, std::string("field `") + key + "` must be an integer");
    return v.get<long long>();
}

double get_real(const Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto& v = field(rec, key, label, line);
    if (!v.is_number()) throw ParseError(label, line, std::string("field `") + key + "` must be a number");
    return v.get<double>();
}

const Json& get_array(const Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto& v = field(rec, key, label, line);
    if (!v.is_array()) throw ParseError(label, line, std::string("field `") + key + "` must be an array");
    return v;
}

std::string dump(const Json& rec) { return rec.dump(-1, ' ', false, Json::error_handler_t::strict); }

}  // namespace narrative::jsonl
