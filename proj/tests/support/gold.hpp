#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace narrative::testing {

struct GoldSentence {
    std::string sentence;
    std::string cause;  // empty: no causal cue
    std::string effect;
};

inline std::vector<GoldSentence> load_gold() {
    std::ifstream in(data_path("causal_gold.tsv"));
    std::vector<GoldSentence> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        out.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
    }
    return out;
}

}  // namespace narrative::testing
