#include "tdh/orch/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>

namespace tdh::orch {

namespace fs = std::filesystem;

namespace {

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorageFailure, "cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

Bytes aad_for(const std::string& key_id, std::uint32_t version, bool staged) {
  ByteWriter w;
  w.str("TDH-STORE-v1").str(key_id).u32(version).u8(staged ? 1 : 0);
  return std::move(w).take();
}

}  // namespace

AgentShareStore::AgentShareStore(fs::path dir, fs::path key_file, Rng& rng) : dir_(std::move(dir)), rng_(rng) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "cannot create " + dir_.string());
  int fd = ::open(key_file.c_str(), O_RDONLY);
  if (fd < 0) {
    fd = ::open(key_file.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0600);
    if (fd < 0) throw Error(ErrorCode::kStorageFailure, "cannot create key file " + key_file.string());
    rng_.fill(key_);
    bool ok = ::write(fd, key_.data(), key_.size()) == static_cast<ssize_t>(key_.size()) && ::fsync(fd) == 0;
    ::close(fd);
    if (!ok) throw Error(ErrorCode::kStorageFailure, "cannot write key file");
    return;
  }
  struct stat st {};
  bool ok = ::fstat(fd, &st) == 0 && (st.st_mode & 077) == 0 &&
            ::read(fd, key_.data(), key_.size()) == static_cast<ssize_t>(key_.size());
  ::close(fd);
  if (!ok) throw Error(ErrorCode::kStorageFailure, "key file must be 32 bytes and private to its owner");
}

AgentShareStore::~AgentShareStore() { secure_zero(key_); }

fs::path AgentShareStore::file_for(const std::string& key_id, bool staged) const {
  Bytes id(key_id.begin(), key_id.end());
  return dir_ / (to_hex(id) + (staged ? ".pending" : ".current"));
}

void AgentShareStore::write_atomic(const fs::path& path, ByteSpan data) const {
  fs::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  if (fd < 0) throw Error(ErrorCode::kStorageFailure, "cannot write " + tmp.string());
  bool ok = ::write(fd, data.data(), data.size()) == static_cast<ssize_t>(data.size()) && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok || ::rename(tmp.c_str(), path.c_str()) != 0) {
    ::unlink(tmp.c_str());
    throw Error(ErrorCode::kStorageFailure, "cannot replace " + path.string());
  }
}

void AgentShareStore::destroy(const fs::path& path) const {
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  if (ec) return;
  int fd = ::open(path.c_str(), O_WRONLY);
  if (fd >= 0) {
    Bytes zeros(size, 0);
    [[maybe_unused]] auto n = ::write(fd, zeros.data(), zeros.size());
    ::fsync(fd);
    ::close(fd);
  }
  fs::remove(path, ec);
}

std::optional<StoredShare> AgentShareStore::load(const std::string& key_id, bool staged) const {
  fs::path path = file_for(key_id, staged);
  if (!fs::exists(path)) return std::nullopt;
  Bytes raw = read_file(path);
  ByteReader r(raw);
  std::uint32_t version = r.u32();
  auto nonce = r.fixed<12>();
  auto sealed = r.raw(r.remaining());
  Bytes plain;
  try {
    plain = aead_open(key_, nonce, aad_for(key_id, version, staged), sealed);
  } catch (const Error&) {
    throw Error(ErrorCode::kStorageFailure, "stored share for '" + key_id + "' failed authentication");
  }
  StoredShare out{parse_key_share_record(plain), version};
  secure_zero(plain);
  return out;
}

std::optional<StoredShare> AgentShareStore::current(const std::string& key_id) const {
  std::lock_guard lock(mu_);
  return load(key_id, false);
}

std::optional<StoredShare> AgentShareStore::pending(const std::string& key_id) const {
  std::lock_guard lock(mu_);
  return load(key_id, true);
}

void AgentShareStore::stage(const std::string& key_id, const KeyShareRecord& record, std::uint32_t version) {
  std::lock_guard lock(mu_);
  auto existing = load(key_id, false);
  if (existing) {
    if (!(existing->record.public_key == record.public_key)) {
      throw Error(ErrorCode::kStorageFailure, "key id '" + key_id + "' already holds a different public key");
    }
    if (version <= existing->version) throw Error(ErrorCode::kStorageFailure, "staged version must increase");
  }
  Bytes plain = serialize(record);
  AeadNonce nonce;
  rng_.fill(nonce);
  ByteWriter w;
  w.u32(version).raw(nonce).raw(aead_seal(key_, nonce, aad_for(key_id, version, true), plain));
  secure_zero(plain);
  write_atomic(file_for(key_id, true), w.bytes());
}

std::uint32_t AgentShareStore::commit(const std::string& key_id) {
  std::lock_guard lock(mu_);
  auto staged = load(key_id, true);
  if (!staged) throw Error(ErrorCode::kStorageFailure, "nothing staged for '" + key_id + "'");
  // Re-seal under the committed label, then atomically replace the old version.
  Bytes plain = serialize(staged->record);
  AeadNonce nonce;
  rng_.fill(nonce);
  ByteWriter w;
  w.u32(staged->version).raw(nonce).raw(aead_seal(key_, nonce, aad_for(key_id, staged->version, false), plain));
  secure_zero(plain);
  fs::path cur = file_for(key_id, false);
  if (fs::exists(cur)) {
    // A second link to the old inode lets it be wiped after the atomic swap.
    fs::path old = cur;
    old += ".old";
    std::error_code ec;
    fs::remove(old, ec);
    fs::create_hard_link(cur, old);
    write_atomic(cur, w.bytes());
    destroy(old);
  } else {
    write_atomic(cur, w.bytes());
  }
  destroy(file_for(key_id, true));
  return staged->version;
}

void AgentShareStore::discard(const std::string& key_id) {
  std::lock_guard lock(mu_);
  destroy(file_for(key_id, true));
}

void AgentShareStore::retire(const std::string& key_id) {
  std::lock_guard lock(mu_);
  destroy(file_for(key_id, true));
  destroy(file_for(key_id, false));
}

std::vector<std::string> AgentShareStore::key_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".current") continue;
    Bytes id = from_hex(entry.path().stem().string());
    out.emplace_back(id.begin(), id.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tdh::orch
