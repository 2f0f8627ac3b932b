#include "dsaudit/textindex.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsaudit {

LemmaDictionary LemmaDictionary::load(const std::string& lemma_tsv_path,
                                      const std::string& stopword_path) {
    LemmaDictionary dict;
    for (const auto& line : read_lines(lemma_tsv_path)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("lemma dictionary line without tab: " + line);
        std::string surface = ascii_lower(line.substr(0, tab));
        std::string lemma = ascii_lower(line.substr(tab + 1));
        if (surface.empty() || lemma.empty())
            throw DataError("empty lemma dictionary entry: " + line);
        dict.lemmas.emplace(std::move(surface), std::move(lemma));
    }
    for (const auto& line : read_lines(stopword_path)) {
        if (line.empty() || line[0] == '#') continue;
        dict.stopwords.insert(ascii_lower(line));
    }
    return dict;
}

namespace {

// Decodes one UTF-8 codepoint; on malformed input consumes one byte.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra = (c >= 0xF0) ? 3 : (c >= 0xE0) ? 2 : (c >= 0xC0) ? 1 : 0;
    if (extra == 0 || i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return 0xFFFD;
    }
    std::uint32_t cp = c & (0x3F >> extra);
    for (int k = 1; k <= extra; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += extra + 1;
    return cp;
}

bool is_word_codepoint(std::uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z');
    }
    // General punctuation, quotes and dashes beyond ASCII are separators;
    // everything else non-ASCII counts as a word character.
    if (cp >= 0x2000 && cp <= 0x206F) return false;
    if (cp == 0x00A0 || cp == 0x00AB || cp == 0x00BB || cp == 0x00B7) return false;
    return true;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::uint32_t cp = decode_utf8(text, i);
        if (is_word_codepoint(cp)) {
            if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
            append_utf8(current, cp);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> normalize(std::string_view text, const LemmaDictionary& dict) {
    std::vector<std::string> out;
    for (auto& token : tokenize(text)) {
        if (dict.stopwords.contains(token)) continue;
        auto it = dict.lemmas.find(token);
        const std::string& lemma = (it != dict.lemmas.end()) ? it->second : token;
        if (dict.stopwords.contains(lemma)) continue;
        out.push_back(lemma);
    }
    return out;
}

InvertedIndex build_index(const std::vector<std::pair<std::string, std::string>>& docs,
                          const LemmaDictionary& dict, int threads) {
    InvertedIndex index;
    index.doc_ids.reserve(docs.size());
    {
        std::unordered_set<std::string> seen;
        seen.reserve(docs.size());
        for (const auto& [id, text] : docs) {
            (void)text;
            if (!seen.insert(id).second) throw DataError("duplicate doc id: " + id);
            index.doc_ids.push_back(id);
        }
    }
    index.doc_lemma_counts.assign(docs.size(), 0);

    // Fixed shard count keeps the merge order (and the result) independent of
    // the thread count.
    constexpr int kShards = 16;
    std::vector<std::unordered_map<std::string, std::vector<std::uint32_t>>> shard_postings(
        kShards);
    const std::size_t n = docs.size();
    const std::size_t chunk = (n + kShards - 1) / kShards;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
#endif
    for (int s = 0; s < kShards; ++s) {
        std::size_t begin = static_cast<std::size_t>(s) * chunk;
        std::size_t end = std::min(n, begin + chunk);
        auto& local = shard_postings[s];
        for (std::size_t d = begin; d < end; ++d) {
            auto lemmas = normalize(docs[d].second, dict);
            index.doc_lemma_counts[d] = static_cast<std::uint32_t>(lemmas.size());
            std::sort(lemmas.begin(), lemmas.end());
            lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());
            for (auto& lemma : lemmas)
                local[std::move(lemma)].push_back(static_cast<std::uint32_t>(d));
        }
    }

    for (auto& local : shard_postings) {
        for (auto& [lemma, rows] : local) {
            auto& dst = index.postings[lemma];
            dst.insert(dst.end(), rows.begin(), rows.end());
        }
    }
    for (auto& [lemma, rows] : index.postings) std::sort(rows.begin(), rows.end());
    return index;
}

namespace {

constexpr char kIndexMagic[8] = {'D', 'S', 'A', 'I', 'D', 'X', '0', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DataError("truncated index file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_str(std::ofstream& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::ifstream& in) {
    std::uint32_t len = get_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw DataError("truncated index file");
    return s;
}

}  // namespace

void InvertedIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write index file: " + path);
    out.write(kIndexMagic, sizeof(kIndexMagic));
    put_u32(out, doc_count());
    for (const auto& id : doc_ids) put_str(out, id);
    for (auto c : doc_lemma_counts) put_u32(out, c);
    // Lemmas written in sorted order so the file is byte-stable.
    std::vector<const std::string*> keys;
    keys.reserve(postings.size());
    for (const auto& [lemma, rows] : postings) keys.push_back(&lemma);
    std::sort(keys.begin(), keys.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    put_u32(out, static_cast<std::uint32_t>(keys.size()));
    for (const auto* key : keys) {
        put_str(out, *key);
        const auto& rows = postings.at(*key);
        put_u32(out, static_cast<std::uint32_t>(rows.size()));
        for (auto r : rows) put_u32(out, r);
    }
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open index file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0)
        throw DataError("bad index file magic: " + path);
    InvertedIndex index;
    std::uint32_t n = get_u32(in);
    index.doc_ids.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) index.doc_ids.push_back(get_str(in));
    index.doc_lemma_counts.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) index.doc_lemma_counts[i] = get_u32(in);
    std::uint32_t keys = get_u32(in);
    for (std::uint32_t k = 0; k < keys; ++k) {
        std::string lemma = get_str(in);
        std::uint32_t len = get_u32(in);
        std::vector<std::uint32_t> rows(len);
        for (auto& r : rows) {
            r = get_u32(in);
            if (r >= n) throw DataError("posting out of range in index file");
        }
        index.postings.emplace(std::move(lemma), std::move(rows));
    }
    return index;
}

KeywordQuery make_query(std::string_view phrase, const LemmaDictionary& dict) {
    KeywordQuery q;
    q.phrase = std::string(phrase);
    auto lemmas = normalize(phrase, dict);
    std::sort(lemmas.begin(), lemmas.end());
    lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());
    if (lemmas.empty())
        throw ValidationError("query normalizes to nothing: " + q.phrase);
    q.lemma_bag = std::move(lemmas);
    return q;
}

std::vector<std::uint32_t> query(const InvertedIndex& index, const KeywordQuery& q) {
    if (q.lemma_bag.empty()) throw ValidationError("empty query");
    std::vector<std::uint32_t> result;
    bool first = true;
    for (const auto& lemma : q.lemma_bag) {
        auto it = index.postings.find(lemma);
        if (it == index.postings.end()) return {};
        if (first) {
            result = it->second;
            first = false;
        } else {
            std::vector<std::uint32_t> merged;
            std::set_intersection(result.begin(), result.end(), it->second.begin(),
                                  it->second.end(), std::back_inserter(merged));
            result = std::move(merged);
            if (result.empty()) return {};
        }
    }
    return result;
}

std::vector<std::uint32_t> query_scan(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const LemmaDictionary& dict, const KeywordQuery& q) {
    std::vector<std::uint32_t> result;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        auto lemmas = normalize(docs[d].second, dict);
        std::unordered_set<std::string> present(lemmas.begin(), lemmas.end());
        bool all = true;
        for (const auto& lemma : q.lemma_bag) {
            if (!present.contains(lemma)) {
                all = false;
                break;
            }
        }
        if (all) result.push_back(static_cast<std::uint32_t>(d));
    }
    return result;
}

}  // namespace dsaudit
