#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "narrative/text.hpp"

namespace narrative {

// Spaced scripts: lowercased word tokens split on whitespace and punctuation.
// Unspaced scripts: character bigrams within each punctuation-free run; a run
// of one character yields that character.
std::vector<std::string> tokenize(std::string_view text, ScriptProfile profile);

inline constexpr std::size_t kDefaultEmbeddingDim = std::size_t{1} << 20;

// Fixed-dimension real vector stored sparsely; entries are sorted by index
// and never hold an explicit zero.
class Vector {
public:
    using Entry = std::pair<std::uint32_t, double>;

    Vector() = default;
    explicit Vector(std::size_t dim) : dim_(dim) {}

    static Vector dense(const std::vector<double>& values);
    // Throws Error on unsorted, duplicate or out-of-range indices, or non-finite values.
    static Vector sparse(std::size_t dim, std::vector<Entry> entries);

    std::size_t dimension() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<double> to_dense() const;
    double norm() const;
    double dot(const Vector& other) const;
    Vector scaled(double c) const;

    bool operator==(const Vector&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<Entry> entries_;
};

// Hashed token counts with 1 + ln(count) weighting, L2-normalized when nonzero.
// Throws Error when dim < 2.
Vector embed(std::string_view text, ScriptProfile profile, std::size_t dim = kDefaultEmbeddingDim);

// dot(u, v) / (|u| |v|), clamped to [-1, 1]; 0 when either norm is 0.
// Throws Error on dimension mismatch.
double cosine(const Vector& u, const Vector& v);

enum class Role { cause, effect };
std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

// Identifies one side of one extracted causal pair.
struct ExpressionKey {
    std::string article_id;
    std::size_t paragraph = 0;
    std::size_t sentence = 0;
    Role role = Role::cause;

    std::string str() const;
    auto operator<=>(const ExpressionKey&) const = default;
};

class EmbeddingTable {
public:
    // Throws Error if the vector's dimension differs from the table's.
    void insert(ExpressionKey key, Vector v);
    const Vector* find(const ExpressionKey& key) const;
    // Throws Error naming the key when absent.
    const Vector& at(const ExpressionKey& key) const;

    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    std::optional<std::size_t> dimension() const { return dim_; }
    const std::map<ExpressionKey, Vector>& items() const { return vectors_; }

    // Entries of `overrides` replace entries here.
    void merge_override(const EmbeddingTable& overrides);

private:
    std::map<ExpressionKey, Vector> vectors_;
    std::optional<std::size_t> dim_;
};

// Reads the exchange format. Every record is `article_id`, `paragraph`,
// `sentence`, `role` plus either a dense `vector` array or a sparse
// `dim`/`indices`/`values` triple. The dimension is fixed by the first record.
// When `known` is given, a key outside it is an error.
EmbeddingTable load_embeddings(std::istream& in, const std::set<ExpressionKey>* known = nullptr,
                               const std::string& label = "<embeddings>");
EmbeddingTable load_external_embeddings(const std::filesystem::path& path,
                                        const std::set<ExpressionKey>* known = nullptr);

// Dense `vector` when at least half the entries are nonzero, sparse otherwise.
void write_embeddings(const EmbeddingTable& table, std::ostream& out);

}  // namespace narrative
