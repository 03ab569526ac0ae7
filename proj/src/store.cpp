#include "wargame/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wargame/errors.hpp"
#include "wargame/io.hpp"

namespace wargame {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string version_file(long version) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "v%08ld.json", version);
    return buf;
}

void fsync_path(const fs::path& p, bool directory) {
    const int fd = ::open(p.c_str(), directory ? (O_RDONLY | O_DIRECTORY) : O_RDONLY);
    if (fd < 0) throw Error("open for fsync failed: " + p.string() + ": " + std::strerror(errno));
    const int rc = ::fsync(fd);
    ::close(fd);
    if (rc != 0) throw Error("fsync failed: " + p.string());
}

json doc_to_json(const StoredDocument& d) {
    return {{"docId", d.doc_id},   {"kind", to_string(d.kind)},        {"version", d.version},
            {"payload", d.payload}, {"contentHash", d.content_hash}, {"scenarioId", d.scenario_id}};
}

StoredDocument doc_from_json(const json& j) {
    StoredDocument d;
    d.doc_id = j.at("docId").get<std::string>();
    d.kind = doc_kind_from_string(j.at("kind").get<std::string>());
    d.version = j.at("version").get<long>();
    d.payload = j.at("payload");
    d.content_hash = j.at("contentHash").get<std::string>();
    d.scenario_id = j.value("scenarioId", "");
    return d;
}

long seq_of(const std::string& doc_id) {
    const auto dash = doc_id.rfind('-');
    if (dash == std::string::npos) return 0;
    try {
        return std::stol(doc_id.substr(dash + 1));
    } catch (const std::exception&) {
        return 0;
    }
}

std::atomic<unsigned long> tmp_counter{0};

}  // namespace

const char* to_string(DocKind k) {
    switch (k) {
        case DocKind::scenario: return "scenario";
        case DocKind::plan: return "plan";
        case DocKind::run_result: return "runResult";
        case DocKind::analytics_input: return "analyticsInput";
    }
    return "plan";
}

DocKind doc_kind_from_string(const std::string& s) {
    for (auto k : {DocKind::scenario, DocKind::plan, DocKind::run_result, DocKind::analytics_input})
        if (s == to_string(k)) return k;
    throw ParseError("unknown document kind '" + s + "'");
}

DocumentStore::DocumentStore(fs::path root, bool sync_writes) : root_(std::move(root)), sync_(sync_writes) {
    fs::create_directories(root_ / "docs");
    fs::create_directories(root_ / "meta");
    fs::create_directories(root_ / "trash");
    std::error_code ec;
    for (const auto& stale : fs::directory_iterator(root_ / "trash")) fs::remove_all(stale.path(), ec);
    load();
}

fs::path DocumentStore::doc_dir(const std::string& doc_id) const { return root_ / "docs" / doc_id; }

void DocumentStore::write_atomic(const fs::path& path, const std::string& text) const {
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(tmp_counter++));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    if (sync_) fsync_path(tmp, false);
    fs::rename(tmp, path);
    if (sync_) fsync_path(path.parent_path(), true);
}

void DocumentStore::persist(const StoredDocument& doc) const {
    const auto dir = doc_dir(doc.doc_id);
    const bool fresh = !fs::exists(dir);
    fs::create_directories(dir);
    if (fresh && sync_) fsync_path(dir.parent_path(), true);
    write_atomic(dir / version_file(doc.version), io::dump(doc_to_json(doc)));
}

void DocumentStore::load() {
    long counter = 1;
    const auto counter_file = root_ / "meta" / "next_seq";
    if (fs::exists(counter_file)) {
        std::ifstream in(counter_file);
        in >> counter;
    }
    for (const auto& dir : fs::directory_iterator(root_ / "docs")) {
        if (!dir.is_directory()) continue;
        std::vector<fs::path> versions;
        for (const auto& f : fs::directory_iterator(dir.path())) {
            const auto name = f.path().filename().string();
            if (name.size() == 14 && name[0] == 'v' && f.path().extension() == ".json") versions.push_back(f.path());
        }
        std::sort(versions.rbegin(), versions.rend());
        for (const auto& v : versions) {
            try {
                auto doc = doc_from_json(io::read_json_file(v));
                counter = std::max(counter, seq_of(doc.doc_id) + 1);
                auto e = std::make_shared<Entry>();
                e->doc = std::move(doc);
                entries_[e->doc.doc_id] = std::move(e);
                break;
            } catch (const std::exception&) {
                continue;  // torn or foreign file; fall back to the previous version
            }
        }
    }
    next_seq_ = counter;
}

std::shared_ptr<DocumentStore::Entry> DocumentStore::entry(const std::string& doc_id) const {
    std::shared_lock lock(index_mutex_);
    auto it = entries_.find(doc_id);
    return it == entries_.end() ? nullptr : it->second;
}

StoredDocument DocumentStore::create(DocKind kind, json payload, std::string scenario_id) {
    StoredDocument doc;
    {
        std::lock_guard lock(counter_mutex_);
        const long seq = next_seq_++;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s-%06ld", to_string(kind), seq);
        doc.doc_id = buf;
        write_atomic(root_ / "meta" / "next_seq", std::to_string(next_seq_) + "\n");
    }
    doc.kind = kind;
    doc.version = 1;
    doc.content_hash = io::content_hash(payload);
    doc.payload = std::move(payload);
    doc.scenario_id = std::move(scenario_id);
    persist(doc);

    auto e = std::make_shared<Entry>();
    e->doc = doc;
    std::unique_lock lock(index_mutex_);
    entries_[doc.doc_id] = std::move(e);
    return doc;
}

std::optional<StoredDocument> DocumentStore::get(const std::string& doc_id) const {
    auto e = entry(doc_id);
    if (!e) return std::nullopt;
    std::lock_guard lock(e->mutex);
    if (e->deleted) return std::nullopt;
    return e->doc;
}

std::vector<StoredDocument> DocumentStore::history(const std::string& doc_id) const {
    auto e = entry(doc_id);
    if (!e) return {};
    std::lock_guard lock(e->mutex);
    if (e->deleted) return {};
    std::vector<StoredDocument> out;
    for (long v = 1; v <= e->doc.version; ++v) {
        const auto path = doc_dir(doc_id) / version_file(v);
        if (fs::exists(path)) out.push_back(doc_from_json(io::read_json_file(path)));
    }
    return out;
}

std::vector<DocumentSummary> DocumentStore::list(std::optional<DocKind> kind, std::optional<std::string> scenario_id) const {
    std::vector<std::shared_ptr<Entry>> snapshot;
    {
        std::shared_lock lock(index_mutex_);
        for (const auto& [_, e] : entries_) snapshot.push_back(e);
    }
    std::vector<DocumentSummary> out;
    for (const auto& e : snapshot) {
        std::lock_guard lock(e->mutex);
        if (e->deleted) continue;
        const auto& d = e->doc;
        if (kind && d.kind != *kind) continue;
        if (scenario_id && d.scenario_id != *scenario_id) continue;
        out.push_back({d.doc_id, d.kind, d.version, d.content_hash, d.scenario_id});
    }
    std::sort(out.begin(), out.end(), [](const DocumentSummary& a, const DocumentSummary& b) {
        return std::make_pair(std::string(to_string(a.kind)), a.doc_id) < std::make_pair(std::string(to_string(b.kind)), b.doc_id);
    });
    return out;
}

UpdateOutcome DocumentStore::update(const std::string& doc_id, long expected_version,
                                    const std::function<json(const json&, long)>& mutate) {
    auto e = entry(doc_id);
    if (!e) throw NotFoundError("unknown document '" + doc_id + "'");
    std::lock_guard lock(e->mutex);
    if (e->deleted) throw NotFoundError("unknown document '" + doc_id + "'");
    if (expected_version != e->doc.version) return VersionConflict{e->doc.version, e->doc.payload};

    StoredDocument next = e->doc;
    next.version = e->doc.version + 1;
    next.payload = mutate(e->doc.payload, next.version);
    next.content_hash = io::content_hash(next.payload);
    persist(next);
    e->doc = next;
    return next;
}

bool DocumentStore::remove(const std::string& doc_id) {
    auto e = entry(doc_id);
    if (!e) return false;
    {
        std::lock_guard lock(e->mutex);
        if (e->deleted) return false;
        e->deleted = true;
        // Rename out of docs/ first so a crash never leaves a half-removed document behind.
        const auto graveyard = root_ / "trash" / (doc_id + "." + std::to_string(tmp_counter++));
        fs::rename(doc_dir(doc_id), graveyard);
        if (sync_) fsync_path(root_ / "docs", true);
        std::error_code ec;
        fs::remove_all(graveyard, ec);
    }
    std::unique_lock lock(index_mutex_);
    entries_.erase(doc_id);
    return true;
}

}  // namespace wargame
