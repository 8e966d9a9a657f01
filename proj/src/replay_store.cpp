#include <mutex>
#include <shared_mutex>

#include "draftbench/llm_gateway.hpp"
#include "text_util.hpp"

namespace draftbench {

namespace fs = std::filesystem;

ReplayStore::ReplayStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::optional<CompletionRecord> ReplayStore::lookup(const RequestHash& hash) const {
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(hash.hex); it != cache_.end()) return it->second;
    }
    const fs::path file = dir_ / (hash.hex + ".json");
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) return std::nullopt;
    CompletionRecord record = completion_record_from_json(detail::read_file(file));
    if (record.request_hash != hash) {
        throw Error("replay record " + file.string() + " does not match its content address");
    }
    std::unique_lock lock(mutex_);
    cache_.emplace(hash.hex, record);
    return record;
}

void ReplayStore::store(const CompletionRecord& record) {
    std::lock_guard write(write_mutex_);
    detail::write_file_atomic(dir_ / (record.request_hash.hex + ".json"), completion_record_to_json(record) + "\n");
    std::unique_lock lock(mutex_);
    cache_[record.request_hash.hex] = record;
}

}  // namespace draftbench
