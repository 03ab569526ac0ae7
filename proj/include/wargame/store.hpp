#pragma once

// File-backed versioned document store. Every accepted write lands in its
// own immutable file `docs/<docId>/v<version>.json`, written to a temporary
// name, fsynced and renamed into place before the call returns.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace wargame {

enum class DocKind { scenario, plan, run_result, analytics_input };

const char* to_string(DocKind k);
DocKind doc_kind_from_string(const std::string& s);

struct StoredDocument {
    std::string doc_id;
    DocKind kind = DocKind::plan;
    long version = 0;
    nlohmann::json payload;
    std::string content_hash;
    std::string scenario_id;  // linkage for filtering; may be empty
};

struct DocumentSummary {
    std::string doc_id;
    DocKind kind = DocKind::plan;
    long version = 0;
    std::string content_hash;
    std::string scenario_id;
};

struct VersionConflict {
    long current_version = 0;
    nlohmann::json current_payload;
};

using UpdateOutcome = std::variant<StoredDocument, VersionConflict>;

class DocumentStore {
  public:
    /// Opens (creating if needed) the store rooted at `root` and loads the
    /// newest complete version of every document.
    explicit DocumentStore(std::filesystem::path root, bool sync_writes = true);

    DocumentStore(const DocumentStore&) = delete;
    DocumentStore& operator=(const DocumentStore&) = delete;

    StoredDocument create(DocKind kind, nlohmann::json payload, std::string scenario_id = {});

    [[nodiscard]] std::optional<StoredDocument> get(const std::string& doc_id) const;

    /// All persisted versions, oldest first. Empty for unknown documents.
    [[nodiscard]] std::vector<StoredDocument> history(const std::string& doc_id) const;

    /// Sorted by (kind, docId).
    [[nodiscard]] std::vector<DocumentSummary> list(std::optional<DocKind> kind = std::nullopt,
                                                    std::optional<std::string> scenario_id = std::nullopt) const;

    /// Optimistic update. `mutate` runs under the document's write lock and
    /// only when `expected_version` matches; it receives the current payload
    /// and the version about to be written and returns the new payload. It may
    /// throw to reject the write. Throws NotFoundError for unknown documents.
    UpdateOutcome update(const std::string& doc_id, long expected_version,
                         const std::function<nlohmann::json(const nlohmann::json&, long)>& mutate);

    bool remove(const std::string& doc_id);

    [[nodiscard]] const std::filesystem::path& root() const { return root_; }

  private:
    struct Entry {
        mutable std::mutex mutex;
        StoredDocument doc;
        bool deleted = false;
    };

    void load();
    void persist(const StoredDocument& doc) const;
    void write_atomic(const std::filesystem::path& path, const std::string& text) const;
    [[nodiscard]] std::filesystem::path doc_dir(const std::string& doc_id) const;
    [[nodiscard]] std::shared_ptr<Entry> entry(const std::string& doc_id) const;

    std::filesystem::path root_;
    bool sync_;
    mutable std::shared_mutex index_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
    std::mutex counter_mutex_;
    long next_seq_ = 1;
};

}  // namespace wargame
