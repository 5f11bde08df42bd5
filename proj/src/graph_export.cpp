#include "narrative/graph_export.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "narrative/error.hpp"
#include "narrative/jsonl.hpp"
#include "narrative/text.hpp"

namespace narrative {

void CategoryMap::assign(const std::string& topic, const std::string& category) {
    const auto [it, inserted] = topic_to_category.emplace(topic, category);
    if (!inserted)
        throw Error("topic \"" + topic + "\" mapped to both \"" + it->second + "\" and \"" + category + "\"");
}

const std::string& CategoryMap::category_of(const std::string& topic) const {
    const auto it = topic_to_category.find(topic);
    if (it == topic_to_category.end()) throw Error("topic \"" + topic + "\" has no category");
    return it->second;
}

namespace {

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = text::trim_space(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!piece.empty()) out.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

}  // namespace

CategoryMap parse_category_map(std::istream& in, const std::string& label) {
    CategoryMap map;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto trimmed = text::trim_space(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto tab1 = line.find('\t');
        if (tab1 == std::string::npos) throw ParseError(label, number, "expected category<TAB>topics");
        const auto tab2 = line.find('\t', tab1 + 1);
        const std::string category(text::trim_space(std::string_view(line).substr(0, tab1)));
        if (category.empty()) throw ParseError(label, number, "empty category label");
        const auto topics = split_list(std::string_view(line).substr(tab1 + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab1 - 1));
        if (topics.empty()) throw ParseError(label, number, "category \"" + category + "\" lists no topics");
        try {
            for (const auto& t : topics) map.assign(t, category);
        } catch (const Error& e) {
            throw ParseError(label, number, e.what());
        }
        if (tab2 != std::string::npos) {
            auto& kw = map.keywords[category];
            for (auto& k : split_list(std::string_view(line).substr(tab2 + 1))) kw.push_back(std::move(k));
        }
    }
    return map;
}

CategoryMap load_category_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open category map " + path.string());
    return parse_category_map(in, path.string());
}

double CategoryGraph::total() const {
    double sum = 0.0;
    for (const auto& [k, w] : edges) sum += w;
    return sum;
}

CategoryGraph aggregate_categories(const NarrativeMatrix& matrix, const CategoryMap& map) {
    for (const auto& t : matrix.topics) {
        if (!map.topic_to_category.contains(t))
            throw Error("unmapped topic \"" + t + "\": add it to the category map");
    }
    CategoryGraph g;
    std::set<std::string> nodes;
    for (const auto& t : matrix.topics) nodes.insert(map.category_of(t));
    g.nodes.assign(nodes.begin(), nodes.end());
    for (const auto& [key, value] : matrix.cells) {
        if (value < 0.0) throw Error("negative matrix cell for " + key.first + " -> " + key.second);
        g.edges[{map.category_of(key.first), map.category_of(key.second)}] += value;
    }
    return g;
}

std::optional<GraphFormat> parse_graph_format(std::string_view name) {
    if (name == "dot") return GraphFormat::dot;
    if (name == "json") return GraphFormat::json;
    return std::nullopt;
}

void export_graph(const CategoryGraph& graph, double min_weight, GraphFormat format, std::ostream& out,
                  const CategoryMap* map) {
    if (!(min_weight >= 0.0)) throw Error("min_weight must be non-negative");
    std::vector<std::pair<std::pair<std::string, std::string>, double>> kept;
    double max_w = 0.0;
    for (const auto& [key, w] : graph.edges) {
        if (w < min_weight) continue;
        kept.emplace_back(key, w);
        max_w = std::max(max_w, w);
    }
    auto pen = [max_w](double w) { return max_w > 0.0 ? 1.0 + 7.0 * w / max_w : 1.0; };

    if (format == GraphFormat::json) {
        jsonl::Json doc = jsonl::Json::object();
        doc["nodes"] = graph.nodes;
        auto edges = jsonl::Json::array();
        for (const auto& [key, w] : kept) {
            jsonl::Json e = jsonl::Json::object();
            e["src"] = key.first;
            e["dst"] = key.second;
            e["weight"] = w;
            e["penwidth"] = pen(w);
            edges.push_back(std::move(e));
        }
        doc["edges"] = std::move(edges);
        out << doc.dump(2) << '\n';
        return;
    }

    out << "digraph narratives {\n";
    out << "  rankdir=LR;\n  node [shape=box, style=rounded];\n";
    for (const auto& n : graph.nodes) {
        out << "  " << dot_quote(n);
        if (map) {
            if (const auto it = map->keywords.find(n); it != map->keywords.end() && !it->second.empty()) {
                std::string tip;
                for (const auto& k : it->second) tip += (tip.empty() ? "" : ", ") + k;
                out << " [tooltip=" << dot_quote(tip) << "]";
            }
        }
        out << ";\n";
    }
    for (const auto& [key, w] : kept) {
        out << "  " << dot_quote(key.first) << " -> " << dot_quote(key.second) << " [tooltip="
            << dot_quote(fmt("%.9f", w)) << ", penwidth=" << fmt("%.3f", pen(w)) << ", label=" << dot_quote(fmt("%.4g", w))
            << "];\n";
    }
    out << "}\n";
}

}  // namespace narrative
