#include "bitext/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "bitext/types.hpp"

namespace bitext {
namespace {

struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using Ctx = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

Ctx make_ctx(const EVP_MD* md) {
  Ctx ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1) throw std::runtime_error("digest init failed");
  return ctx;
}

void update(EVP_MD_CTX* ctx, std::string_view bytes) {
  if (EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1) throw std::runtime_error("digest update failed");
}

std::string hex(const unsigned char* p, unsigned n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    out[2 * i] = kDigits[p[i] >> 4];
    out[2 * i + 1] = kDigits[p[i] & 15];
  }
  return out;
}

std::string finish_hex(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned n = 0;
  if (EVP_DigestFinal_ex(ctx, md.data(), &n) != 1) throw std::runtime_error("digest final failed");
  return hex(md.data(), n);
}

// One MD5 context per thread, reset per key; keys are hashed from OpenMP workers.
EVP_MD_CTX* thread_md5() {
  thread_local Ctx ctx = make_ctx(EVP_md5());
  return ctx.get();
}

}  // namespace

Key128 key_of(std::string_view a, std::string_view b) {
  EVP_MD_CTX* ctx = thread_md5();
  EVP_DigestInit_ex(ctx, nullptr, nullptr);
  const std::uint64_t len = a.size();
  char prefix[8];
  std::memcpy(prefix, &len, sizeof prefix);
  update(ctx, std::string_view(prefix, sizeof prefix));
  update(ctx, a);
  update(ctx, b);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned n = 0;
  EVP_DigestFinal_ex(ctx, md, &n);
  Key128 key;
  std::memcpy(&key.hi, md, 8);
  std::memcpy(&key.lo, md + 8, 8);
  return key;
}

std::string sha256_hex(std::string_view bytes) {
  Ctx ctx = make_ctx(EVP_sha256());
  update(ctx.get(), bytes);
  return finish_hex(ctx.get());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string() + " for hashing");
  Ctx ctx = make_ctx(EVP_sha256());
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    update(ctx.get(), std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return finish_hex(ctx.get());
}

}  // namespace bitext
