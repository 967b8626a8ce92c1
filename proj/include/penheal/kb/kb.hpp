#pragma once

#include <cstddef>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace penheal::kb {

inline constexpr std::size_t kDefaultChunkSize = 800;
inline constexpr std::size_t kDefaultOverlap = 200;

struct Chunk {
    std::string doc_id;
    int seq = 0;
    std::string text;
    std::vector<float> vector;

    bool operator==(const Chunk&) const = default;
};

struct Excerpt {
    Chunk chunk;
    double similarity = 0.0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<float> embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string id() const = 0;
};

/// Lowercase [a-z0-9_] word tokens, minus common English stopwords, hashed
/// (FNV-1a) into `dim` buckets with weight 1 + ln(tf), L2-normalised.
class HashedTfEmbedder : public Embedder {
public:
    explicit HashedTfEmbedder(std::size_t dim = 512) : dim_(dim) {}
    std::vector<float> embed(std::string_view text) const override;
    std::size_t dimension() const override { return dim_; }
    std::string id() const override { return "hashed-logtf-" + std::to_string(dim_); }

private:
    std::size_t dim_;
};

std::vector<std::string> tokenize(std::string_view text);

/// dot(a,b) / (|a| |b|) accumulated in double; 0 when either norm is 0.
double cosine(const std::vector<float>& a, const std::vector<float>& b);

/// Window start offsets 0, step, 2*step, ... below `length`, where
/// step = chunk_size - overlap.
std::vector<std::size_t> window_starts(std::size_t length, std::size_t chunk_size, std::size_t overlap);

/// Exact-scan vector index. Concurrent retrieve() calls are safe; ingest()
/// and remove() take exclusive access.
class Index {
public:
    explicit Index(std::shared_ptr<const Embedder> embedder = std::make_shared<HashedTfEmbedder>());

    /// Replaces any chunks previously ingested under `doc_id`. Returns the
    /// chunk count; an empty document yields 0 and sets `warning`.
    std::size_t ingest(std::string_view text, const std::string& doc_id,
                       std::size_t chunk_size = kDefaultChunkSize,
                       std::size_t overlap = kDefaultOverlap, std::string* warning = nullptr);
    void remove(const std::string& doc_id);

    /// Top-k by cosine, ties by (doc_id, seq). Throws PreconditionError on
    /// an empty index or k == 0.
    std::vector<Excerpt> retrieve(std::string_view query, std::size_t k) const;

    std::size_t size() const;
    std::vector<Chunk> chunks() const;
    const Embedder& embedder() const { return *embedder_; }

    /// Directory with chunks.jsonl, vectors.bin and meta.json.
    void save(const std::string& dir) const;
    static Index load(const std::string& dir,
                      std::shared_ptr<const Embedder> embedder = std::make_shared<HashedTfEmbedder>());

    Index(Index&& other) noexcept;
    Index& operator=(Index&& other) noexcept;

private:
    std::shared_ptr<const Embedder> embedder_;
    std::vector<Chunk> chunks_;
    mutable std::shared_mutex mutex_;
};

/// Renders the guidance block handed to the Executor: the task followed by
/// numbered excerpts in rank order.
std::string build_instructor_prompt(std::string_view task, const std::vector<Excerpt>& excerpts);

/// Ingests every regular file under `path` (or the file itself), doc_id =
/// file name. Returns total chunks added.
std::size_t ingest_path(Index& index, const std::string& path, std::size_t chunk_size = kDefaultChunkSize,
                        std::size_t overlap = kDefaultOverlap, std::vector<std::string>* warnings = nullptr);

}  // namespace penheal::kb
