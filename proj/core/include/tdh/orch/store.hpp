#pragma once

// Agent-side key share storage. Each key id has a committed version and at
// most one staged (pending) version; files are sealed with ChaCha20-Poly1305
// under an agent-local key kept in a 0600 file.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tdh/aead.hpp"
#include "tdh/protocols.hpp"

namespace tdh::orch {

struct StoredShare {
  KeyShareRecord record;
  std::uint32_t version = 0;
};

class AgentShareStore {
 public:
  // Creates `dir` and the key file if missing. A key file readable by
  // group or others is refused (kStorageFailure).
  AgentShareStore(std::filesystem::path dir, std::filesystem::path key_file, Rng& rng);
  ~AgentShareStore();

  std::optional<StoredShare> current(const std::string& key_id) const;
  std::optional<StoredShare> pending(const std::string& key_id) const;

  // Stages `record` as the next version. Refused if the committed version
  // belongs to a different public key.
  void stage(const std::string& key_id, const KeyShareRecord& record, std::uint32_t version);
  // Promotes the staged version; returns it. kStorageFailure if nothing is staged.
  std::uint32_t commit(const std::string& key_id);
  void discard(const std::string& key_id);
  // Destroys every version (the agent left the committee).
  void retire(const std::string& key_id);

  std::vector<std::string> key_ids() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path file_for(const std::string& key_id, bool staged) const;
  std::optional<StoredShare> load(const std::string& key_id, bool staged) const;
  void write_atomic(const std::filesystem::path& path, ByteSpan data) const;
  void destroy(const std::filesystem::path& path) const;

  std::filesystem::path dir_;
  AeadKey key_{};
  Rng& rng_;
  mutable std::mutex mu_;
};

}  // namespace tdh::orch
