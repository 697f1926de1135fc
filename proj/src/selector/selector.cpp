#include "opex/selector/selector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "opex/common/hashing.hpp"
#include "opex/common/text.hpp"

namespace opex::selector {

Vector HashEmbedding::embed(const std::string& text) {
    const std::string s = "  " + text::collapse_ws(text::to_lower(text)) + " ";
    std::map<std::uint64_t, int> grams;
    for (std::size_t i = 0; i + 3 <= s.size(); ++i) ++grams[fnv1a(std::string_view(s).substr(i, 3))];
    Vector v(static_cast<std::size_t>(dim_), 0.0);
    for (const auto& [g, count] : grams)
        for (int d = 0; d < dim_; ++d)
            v[static_cast<std::size_t>(d)] += count * (2.0 * unit_interval(mix64(seed_, g, static_cast<std::uint64_t>(d))) - 1.0);
    return v;
}

Vector RemoteEmbedding::embed(const std::string& text) {
    const std::string key = http::env_credential(cfg_.api_key_env);
    const nlohmann::json body = {{"model", cfg_.model}, {"input", text}};
    http::Endpoint ep{cfg_.base_url, cfg_.path, std::chrono::milliseconds(cfg_.timeout_ms), cfg_.attempts};
    const std::string raw = http::post_json(ep, body.dump(), {{"Authorization", "Bearer " + key}});
    try {
        return nlohmann::json::parse(raw).at("data").at(0).at("embedding").get<Vector>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed embedding response: " + std::string(e.what()));
    }
}

Vector embed(const std::string& text, EmbeddingBackend& backend) {
    if (text::trim(text).empty()) throw std::invalid_argument("cannot embed empty text");
    return backend.embed(text);
}

double cosine(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return -1.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

ExamplePool ExamplePool::load(const std::filesystem::path& path, EmbeddingBackend* backend) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open example pool " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("example pool " + path.string() + ": " + e.what());
    }
    ExamplePool pool;
    for (const auto& e : doc.at("entries")) {
        PoolEntry p;
        p.instruction = e.at("instruction").get<std::string>();
        p.example = e.at("example").get<std::string>();
        if (e.contains("embedding")) p.embedding = e["embedding"].get<Vector>();
        pool.entries.push_back(std::move(p));
    }
    const bool missing = std::any_of(pool.entries.begin(), pool.entries.end(), [](const auto& p) { return p.embedding.empty(); });
    if (missing) {
        if (!backend) throw std::runtime_error("example pool " + path.string() + " has entries without vectors");
        pool.embed_missing(*backend);
    }
    pool.dimension();
    return pool;
}

void ExamplePool::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json doc;
    doc["entries"] = nlohmann::ordered_json::array();
    for (const auto& p : entries) {
        nlohmann::ordered_json e;
        e["instruction"] = p.instruction;
        e["example"] = p.example;
        if (!p.embedding.empty()) e["embedding"] = p.embedding;
        doc["entries"].push_back(std::move(e));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write example pool " + path.string());
    out << doc.dump(1) << '\n';
}

void ExamplePool::embed_missing(EmbeddingBackend& backend) {
    for (auto& p : entries)
        if (p.embedding.empty()) p.embedding = embed(p.instruction, backend);
    dimension();
}

std::size_t ExamplePool::dimension() const {
    if (entries.empty()) return 0;
    const std::size_t d = entries.front().embedding.size();
    for (const auto& p : entries)
        if (p.embedding.size() != d) throw std::runtime_error("example pool vectors have different dimensions");
    return d;
}

std::vector<Ranked> rank_top_k(const Vector& query, const std::vector<Vector>& pool, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (pool.empty()) throw std::invalid_argument("example pool is empty");
    const auto zero = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); };
    struct Key {
        bool degenerate;
        Ranked r;
    };
    std::vector<Key> all(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) all[i] = {zero(pool[i]), {i, cosine(query, pool[i])}};
    const std::size_t n = std::min(k, all.size());
    // Zero-norm entries go last regardless of the -1 they score.
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), [](const Key& a, const Key& b) {
        if (a.degenerate != b.degenerate) return b.degenerate;
        if (a.r.similarity != b.r.similarity) return a.r.similarity > b.r.similarity;
        return a.r.index < b.r.index;
    });
    std::vector<Ranked> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(all[i].r);
    return out;
}

std::vector<Ranked> select_top_k(const std::string& query, const ExamplePool& pool, std::size_t k, EmbeddingBackend& backend) {
    std::vector<Vector> vs;
    vs.reserve(pool.entries.size());
    for (const auto& e : pool.entries) vs.push_back(e.embedding);
    return rank_top_k(embed(query, backend), vs, k);
}

}  // namespace opex::selector
