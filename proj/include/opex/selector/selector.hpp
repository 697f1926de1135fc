#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "opex/common/http.hpp"

namespace opex::selector {

using Vector = std::vector<double>;

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual Vector embed(const std::string& text) = 0;
    virtual std::string kind() const = 0;
};

// Character trigram counts pushed through a seeded random projection.
class HashEmbedding : public EmbeddingBackend {
public:
    explicit HashEmbedding(int dimension = 64, std::uint64_t seed = 0x5e1ec7) : dim_(dimension), seed_(seed) {}
    Vector embed(const std::string& text) override;
    std::string kind() const override { return "deterministic-hash"; }
    int dimension() const { return dim_; }

private:
    int dim_;
    std::uint64_t seed_;
};

struct RemoteEmbeddingConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/embeddings";
    std::string model = "text-embedding-ada-002";
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_ms = 30000;
    int attempts = 3;
};

class RemoteEmbedding : public EmbeddingBackend {
public:
    explicit RemoteEmbedding(RemoteEmbeddingConfig cfg) : cfg_(std::move(cfg)) {}
    Vector embed(const std::string& text) override;
    std::string kind() const override { return "remote-endpoint"; }

private:
    RemoteEmbeddingConfig cfg_;
};

// Rejects empty text before touching the backend.
Vector embed(const std::string& text, EmbeddingBackend& backend);

// Cosine similarity; -1 when either vector has zero norm.
double cosine(const Vector& a, const Vector& b);

struct PoolEntry {
    std::string instruction;
    std::string example;  // rendered planner example
    Vector embedding;
};

struct ExamplePool {
    std::vector<PoolEntry> entries;

    // Entries without a stored vector are embedded with `backend` (required then).
    static ExamplePool load(const std::filesystem::path& path, EmbeddingBackend* backend);
    void save(const std::filesystem::path& path) const;
    // Fills every missing vector and checks that all share one dimension.
    void embed_missing(EmbeddingBackend& backend);
    std::size_t dimension() const;
};

struct Ranked {
    std::size_t index = 0;
    double similarity = 0.0;
};

// Descending similarity, ties by position; min(k, size) entries.
std::vector<Ranked> rank_top_k(const Vector& query, const std::vector<Vector>& pool, std::size_t k);
std::vector<Ranked> select_top_k(const std::string& query, const ExamplePool& pool, std::size_t k, EmbeddingBackend& backend);

inline constexpr std::size_t kDefaultK = 3;

}  // namespace opex::selector
