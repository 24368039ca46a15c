#include "bt/harness/checkpoint.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "bt/learner/serialize.hpp"

namespace bt::harness {

namespace {

constexpr std::string_view kMagic = "BTCKPT01";
constexpr std::size_t kDigestSize = 32;

std::string sha256_raw(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != kDigestSize) {
    throw IntegrityError("SHA-256 computation failed");
  }
  return std::string(reinterpret_cast<const char*>(md.data()), len);
}

std::uint32_t phase_code(Phase p) {
  switch (p) {
    case Phase::pretrain_ngu: return 0;
    case Phase::pretrain_rnd: return 1;
    case Phase::transfer: return 2;
  }
  return 0;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic);
  learner::put_u32(out, ckpt.format_version);
  learner::put_u32(out, phase_code(ckpt.phase));
  learner::put_u64(out, ckpt.env_steps);
  learner::put_u64(out, ckpt.seed);
  learner::put_qfunction(out, ckpt.q);
  out += sha256_raw(out);
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + kDigestSize || bytes.substr(0, kMagic.size()) != kMagic) {
    throw IntegrityError("not a checkpoint (bad magic)");
  }
  const auto body = bytes.substr(0, bytes.size() - kDigestSize);
  if (sha256_raw(body) != bytes.substr(bytes.size() - kDigestSize)) {
    throw IntegrityError("checkpoint digest mismatch");
  }
  learner::ByteReader in(body.substr(kMagic.size()));
  Checkpoint ckpt;
  ckpt.format_version = in.u32();
  if (ckpt.format_version != Checkpoint::kFormatVersion) {
    throw IntegrityError("unsupported checkpoint version " + std::to_string(ckpt.format_version));
  }
  const std::uint32_t phase = in.u32();
  if (phase > 2) throw IntegrityError("invalid phase code in checkpoint");
  ckpt.phase = phase == 0 ? Phase::pretrain_ngu : phase == 1 ? Phase::pretrain_rnd : Phase::transfer;
  ckpt.env_steps = in.u64();
  ckpt.seed = in.u64();
  ckpt.q = learner::read_qfunction(in);
  if (in.remaining() != 0) throw IntegrityError("trailing bytes in checkpoint");
  return ckpt;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace bt::harness
