#include "narrative/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "narrative/error.hpp"
#include "narrative/jsonl.hpp"

namespace narrative {

std::vector<std::string> tokenize(std::string_view text, ScriptProfile profile) {
    std::vector<std::string> out;
    std::vector<text::CodePoint> run;

    auto flush = [&] {
        if (run.empty()) return;
        if (profile == ScriptProfile::spaced) {
            const auto b = run.front().begin;
            const auto e = run.back().begin + run.back().size;
            out.push_back(text::ascii_lower(text.substr(b, e - b)));
        } else if (run.size() == 1) {
            out.emplace_back(text.substr(run[0].begin, run[0].size));
        } else {
            for (std::size_t i = 0; i + 1 < run.size(); ++i) {
                const auto b = run[i].begin;
                const auto e = run[i + 1].begin + run[i + 1].size;
                out.emplace_back(text.substr(b, e - b));
            }
        }
        run.clear();
    };

    for (std::size_t pos = 0; pos < text.size();) {
        const auto cp = text::decode_at(text, pos);
        pos += cp.size;
        if (text::is_word_char(cp.value))
            run.push_back(cp);
        else
            flush();
    }
    flush();
    return out;
}

Vector Vector::dense(const std::vector<double>& values) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0.0) entries.emplace_back(static_cast<std::uint32_t>(i), values[i]);
    }
    return sparse(values.size(), std::move(entries));
}

Vector Vector::sparse(std::size_t dim, std::vector<Entry> entries) {
    Vector v(dim);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto [idx, val] = entries[i];
        if (idx >= dim) throw Error("vector index " + std::to_string(idx) + " out of range");
        if (i > 0 && entries[i - 1].first >= idx) throw Error("vector indices must be strictly increasing");
        if (!std::isfinite(val)) throw Error("vector entries must be finite");
    }
    std::erase_if(entries, [](const Entry& e) { return e.second == 0.0; });
    v.entries_ = std::move(entries);
    return v;
}

std::vector<double> Vector::to_dense() const {
    std::vector<double> out(dim_, 0.0);
    for (const auto& [i, x] : entries_) out[i] = x;
    return out;
}

double Vector::norm() const {
    double s = 0.0;
    for (const auto& [i, x] : entries_) s += x * x;
    return std::sqrt(s);
}

double Vector::dot(const Vector& other) const {
    if (dim_ != other.dim_)
        throw Error("dimension mismatch: " + std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    double s = 0.0;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() && b != other.entries_.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            s += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return s;
}

Vector Vector::scaled(double c) const {
    Vector v(dim_);
    v.entries_ = entries_;
    for (auto& e : v.entries_) e.second *= c;
    std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0.0; });
    return v;
}

Vector embed(std::string_view text, ScriptProfile profile, std::size_t dim) {
    if (dim < 2) throw Error("embedding dimension must be at least 2");
    std::map<std::uint32_t, int> counts;
    for (const auto& tok : tokenize(text, profile))
        ++counts[static_cast<std::uint32_t>(text::fnv1a(tok) % dim)];

    std::vector<Vector::Entry> entries;
    entries.reserve(counts.size());
    double sq = 0.0;
    for (const auto& [idx, n] : counts) {
        const double w = 1.0 + std::log(static_cast<double>(n));
        entries.emplace_back(idx, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& e : entries) e.second *= inv;
    }
    return Vector::sparse(dim, std::move(entries));
}

double cosine(const Vector& u, const Vector& v) {
    const double d = u.dot(v);
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return std::clamp(d / (nu * nv), -1.0, 1.0);
}

std::string_view to_string(Role role) { return role == Role::cause ? "cause" : "effect"; }

std::optional<Role> parse_role(std::string_view name) {
    if (name == "cause") return Role::cause;
    if (name == "effect") return Role::effect;
    return std::nullopt;
}

std::string ExpressionKey::str() const {
    return article_id + "/" + std::to_string(paragraph) + "/" + std::to_string(sentence) + "/" +
           std::string(to_string(role));
}

void EmbeddingTable::insert(ExpressionKey key, Vector v) {
    if (dim_ && *dim_ != v.dimension())
        throw Error("embedding for " + key.str() + " has dimension " + std::to_string(v.dimension()) +
                    ", expected " + std::to_string(*dim_));
    dim_ = v.dimension();
    vectors_.insert_or_assign(std::move(key), std::move(v));
}

const Vector* EmbeddingTable::find(const ExpressionKey& key) const {
    const auto it = vectors_.find(key);
    return it == vectors_.end() ? nullptr : &it->second;
}

const Vector& EmbeddingTable::at(const ExpressionKey& key) const {
    const auto* v = find(key);
    if (!v) throw Error("missing embedding for " + key.str());
    return *v;
}

void EmbeddingTable::merge_override(const EmbeddingTable& overrides) {
    for (const auto& [k, v] : overrides.vectors_) insert(k, v);
}

EmbeddingTable load_embeddings(std::istream& in, const std::set<ExpressionKey>* known,
                               const std::string& label) {
    EmbeddingTable table;
    jsonl::for_each(in, label, [&](const jsonl::Json& rec, std::size_t line) {
        ExpressionKey key;
        key.article_id = jsonl::get_string(rec, "article_id", label, line);
        const auto para = jsonl::get_int(rec, "paragraph", label, line);
        const auto sent = jsonl::get_int(rec, "sentence", label, line);
        if (para < 0 || sent < 0) throw ParseError(label, line, "negative paragraph or sentence index");
        key.paragraph = static_cast<std::size_t>(para);
        key.sentence = static_cast<std::size_t>(sent);
        const auto role_name = jsonl::get_string(rec, "role", label, line);
        const auto role = parse_role(role_name);
        if (!role) throw ParseError(label, line, "unknown role \"" + role_name + "\"");
        key.role = *role;
        if (known && !known->contains(key))
            throw ParseError(label, line, "unknown key " + key.str() + " (no matching causal pair)");

        Vector v;
        try {
            if (rec.contains("vector")) {
                std::vector<double> values;
                for (const auto& x : jsonl::get_array(rec, "vector", label, line)) {
                    if (!x.is_number()) throw ParseError(label, line, "`vector` entries must be numbers");
                    values.push_back(x.get<double>());
                }
                v = Vector::dense(values);
            } else {
                const auto dim = jsonl::get_int(rec, "dim", label, line);
                const auto& idx = jsonl::get_array(rec, "indices", label, line);
                const auto& val = jsonl::get_array(rec, "values", label, line);
                if (dim < 1 || idx.size() != val.size())
                    throw ParseError(label, line, "inconsistent sparse vector");
                std::vector<Vector::Entry> entries;
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    if (!idx[i].is_number_unsigned() || !val[i].is_number())
                        throw ParseError(label, line, "sparse vector entries must be numeric");
                    entries.emplace_back(idx[i].get<std::uint32_t>(), val[i].get<double>());
                }
                v = Vector::sparse(static_cast<std::size_t>(dim), std::move(entries));
            }
            table.insert(std::move(key), std::move(v));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(label, line, e.what());
        }
    });
    return table;
}

EmbeddingTable load_external_embeddings(const std::filesystem::path& path,
                                        const std::set<ExpressionKey>* known) {
    auto in = jsonl::open_in(path);
    return load_embeddings(in, known, path.string());
}

void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
    for (const auto& [key, v] : table.items()) {
        jsonl::Json rec = jsonl::Json::object();
        rec["article_id"] = key.article_id;
        rec["paragraph"] = key.paragraph;
        rec["sentence"] = key.sentence;
        rec["role"] = std::string(to_string(key.role));
        if (v.entries().size() * 2 >= v.dimension()) {
            rec["vector"] = v.to_dense();
        } else {
            auto idx = jsonl::Json::array();
            auto val = jsonl::Json::array();
            for (const auto& [i, x] : v.entries()) {
                idx.push_back(i);
                val.push_back(x);
            }
            rec["dim"] = v.dimension();
            rec["indices"] = std::move(idx);
            rec["values"] = std::move(val);
        }
        out << jsonl::dump(rec) << '\n';
    }
}

}  // namespace narrative
