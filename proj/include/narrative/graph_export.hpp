#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "narrative/narrative_index.hpp"

namespace narrative {

struct CategoryMap {
    std::map<std::string, std::string> topic_to_category;
    std::map<std::string, std::vector<std::string>> keywords;  // display only

    // Throws Error when a topic is already mapped.
    void assign(const std::string& topic, const std::string& category);
    const std::string& category_of(const std::string& topic) const;
};

// One category per line: category<TAB>topic,topic,...[<TAB>keyword,keyword,...].
// `#` starts a comment line.
CategoryMap load_category_map(const std::filesystem::path& path);
CategoryMap parse_category_map(std::istream& in, const std::string& label = "<categories>");

struct CategoryGraph {
    std::vector<std::string> nodes;  // sorted
    std::map<std::pair<std::string, std::string>, double> edges;

    double total() const;
};

// Edge (C1, C2) sums the matrix cells with src in C1 and dst in C2. Throws
// Error naming the first matrix topic missing from the map.
CategoryGraph aggregate_categories(const NarrativeMatrix& matrix, const CategoryMap& map);

enum class GraphFormat { dot, json };
std::optional<GraphFormat> parse_graph_format(std::string_view name);

// Edges below `min_weight` are dropped. Pen widths scale linearly from 1 at
// weight 0 to 8 at the heaviest emitted edge. Output is fully deterministic.
void export_graph(const CategoryGraph& graph, double min_weight, GraphFormat format, std::ostream& out,
                  const CategoryMap* map = nullptr);

}  // namespace narrative
