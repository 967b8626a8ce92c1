#include "penheal/kb/kb.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "penheal/core/errors.hpp"
#include "penheal/core/json.hpp"
#include "penheal/llm/prompts.hpp"

namespace fs = std::filesystem;

namespace penheal::kb {

namespace {

std::uint32_t fnv1a(std::string_view s) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : s) {
        h ^= c;
        h *= 16777619u;
    }
    return h;
}

bool stopword(std::string_view w) {
    static const std::set<std::string_view> kStop = {
        "a",    "an",   "and",  "are",  "as",   "at",    "be",   "by",   "for",  "from", "has",  "have",
        "in",   "into", "is",   "it",   "its",  "of",    "on",   "or",   "that", "the",  "then", "there",
        "these", "this", "to",  "was",  "were", "which", "with", "when", "will", "can",  "not",  "all"};
    return kStop.count(w) > 0;
}

bool token_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

void put_le(std::ostream& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                           static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
    out.write(bytes, 4);
}

float get_le(const unsigned char* p) {
    const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                               (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
}

bool ranks_before(const Excerpt& a, const Excerpt& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
    return a.chunk.seq < b.chunk.seq;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char raw : text) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (token_char(c)) {
            cur += c;
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<float> HashedTfEmbedder::embed(std::string_view text) const {
    std::vector<double> tf(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
        if (!stopword(tok)) tf[fnv1a(tok) % dim_] += 1.0;
    }
    std::vector<double> acc(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) acc[i] = tf[i] > 0.0 ? 1.0 + std::log(tf[i]) : 0.0;
    double norm = 0.0;
    for (double v : acc) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<float> out(dim_, 0.0f);
    if (norm > 0.0) {
        for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<float>(acc[i] / norm);
    }
    return out;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) throw PreconditionError("cosine of vectors with different dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::size_t> window_starts(std::size_t length, std::size_t chunk_size, std::size_t overlap) {
    if (chunk_size == 0 || overlap >= chunk_size) {
        throw PreconditionError("chunk_size must exceed overlap");
    }
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s < length; s += chunk_size - overlap) starts.push_back(s);
    return starts;
}

Index::Index(std::shared_ptr<const Embedder> embedder) : embedder_(std::move(embedder)) {}

Index::Index(Index&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    embedder_ = std::move(other.embedder_);
    chunks_ = std::move(other.chunks_);
}

Index& Index::operator=(Index&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        embedder_ = std::move(other.embedder_);
        chunks_ = std::move(other.chunks_);
    }
    return *this;
}

std::size_t Index::ingest(std::string_view text, const std::string& doc_id, std::size_t chunk_size,
                          std::size_t overlap, std::string* warning) {
    const auto starts = window_starts(text.size(), chunk_size, overlap);
    std::vector<Chunk> fresh;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        Chunk c;
        c.doc_id = doc_id;
        c.seq = static_cast<int>(i);
        c.text = std::string(text.substr(starts[i], chunk_size));
        c.vector = embedder_->embed(c.text);
        fresh.push_back(std::move(c));
    }
    if (fresh.empty() && warning) *warning = "document '" + doc_id + "' is empty; nothing ingested";

    std::unique_lock lock(mutex_);
    std::erase_if(chunks_, [&](const Chunk& c) { return c.doc_id == doc_id; });
    for (auto& c : fresh) chunks_.push_back(std::move(c));
    return starts.size();
}

void Index::remove(const std::string& doc_id) {
    std::unique_lock lock(mutex_);
    std::erase_if(chunks_, [&](const Chunk& c) { return c.doc_id == doc_id; });
}

std::vector<Excerpt> Index::retrieve(std::string_view query, std::size_t k) const {
    if (k == 0) throw PreconditionError("retrieve needs k >= 1");
    std::shared_lock lock(mutex_);
    if (chunks_.empty()) {
        throw PreconditionError("knowledge base is empty; ingest documents first (penheal ingest)");
    }
    const auto q = embedder_->embed(query);
    std::vector<Excerpt> scored;
    scored.reserve(chunks_.size());
    for (const auto& c : chunks_) scored.push_back({c, cosine(q, c.vector)});
    const auto n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), ranks_before);
    scored.resize(n);
    return scored;
}

std::size_t Index::size() const {
    std::shared_lock lock(mutex_);
    return chunks_.size();
}

std::vector<Chunk> Index::chunks() const {
    std::shared_lock lock(mutex_);
    return chunks_;
}

void Index::save(const std::string& dir) const {
    std::shared_lock lock(mutex_);
    fs::create_directories(dir);
    const fs::path root(dir);
    std::ofstream jsonl(root / "chunks.jsonl", std::ios::binary | std::ios::trunc);
    std::ofstream bin(root / "vectors.bin", std::ios::binary | std::ios::trunc);
    if (!jsonl || !bin) throw Error("cannot write knowledge base to " + dir);
    for (const auto& c : chunks_) {
        jsonl << json{{"doc_id", c.doc_id}, {"seq", c.seq}, {"text", c.text}}.dump() << '\n';
        for (float f : c.vector) put_le(bin, f);
    }
    std::ofstream meta(root / "meta.json", std::ios::binary | std::ios::trunc);
    meta << json{{"dimension", embedder_->dimension()}, {"embedder", embedder_->id()}, {"count", chunks_.size()}}
                .dump(2)
         << '\n';
}

Index Index::load(const std::string& dir, std::shared_ptr<const Embedder> embedder) {
    const fs::path root(dir);
    std::ifstream meta_in(root / "meta.json");
    if (!meta_in) throw Error("cannot read " + (root / "meta.json").string());
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::parse_error& e) {
        throw ParseError("meta.json: " + std::string(e.what()), e.byte);
    }
    const auto dim = meta.at("dimension").get<std::size_t>();
    const auto emb_id = meta.at("embedder").get<std::string>();
    if (dim != embedder->dimension() || emb_id != embedder->id()) {
        throw Error("knowledge base at " + dir + " was built with " + emb_id + ", not " + embedder->id());
    }

    Index index(std::move(embedder));
    std::ifstream jsonl(root / "chunks.jsonl", std::ios::binary);
    std::ifstream bin(root / "vectors.bin", std::ios::binary);
    if (!jsonl || !bin) throw Error("incomplete knowledge base at " + dir);
    const std::string raw((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());

    std::string line;
    std::size_t row = 0;
    while (std::getline(jsonl, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        Chunk c;
        c.doc_id = j.at("doc_id").get<std::string>();
        c.seq = j.at("seq").get<int>();
        c.text = j.at("text").get<std::string>();
        const std::size_t offset = row * dim * 4;
        if (offset + dim * 4 > raw.size()) throw Error("vectors.bin is shorter than chunks.jsonl at " + dir);
        c.vector.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) c.vector[i] = get_le(bytes + offset + i * 4);
        index.chunks_.push_back(std::move(c));
        ++row;
    }
    if (row * dim * 4 != raw.size()) throw Error("vectors.bin row count mismatch at " + dir);
    return index;
}

std::string build_instructor_prompt(std::string_view task, const std::vector<Excerpt>& excerpts) {
    std::ostringstream list;
    for (std::size_t i = 0; i < excerpts.size(); ++i) {
        if (i) list << '\n';
        list << (i + 1) << ". " << excerpts[i].chunk.text;
    }
    return llm::render_prompt(llm::PromptId::InstructorGuidance,
                              {{"task", std::string(task)}, {"excerpts", list.str()}});
}

std::size_t ingest_path(Index& index, const std::string& path, std::size_t chunk_size, std::size_t overlap,
                        std::vector<std::string>* warnings) {
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::recursive_directory_iterator(path)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
    } else if (fs::is_regular_file(path)) {
        files.emplace_back(path);
    } else {
        throw Error("no such file or directory: " + path);
    }
    std::sort(files.begin(), files.end());

    std::size_t total = 0;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw Error("cannot read " + f.string());
        const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::string warning;
        total += index.ingest(content, f.filename().string(), chunk_size, overlap, &warning);
        if (!warning.empty() && warnings) warnings->push_back(warning);
    }
    return total;
}

}  // namespace penheal::kb
