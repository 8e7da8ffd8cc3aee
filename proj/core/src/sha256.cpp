#include "anchorid/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace anchorid {

Hash256 sha256(ByteSpan data) {
    Hash256 out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256: digest failed");
    }
    return out;
}

Hash256 sha256_concat(std::initializer_list<ByteSpan> parts) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha256: ctx alloc failed");
    Hash256 out;
    unsigned int len = 0;
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1;
    for (const ByteSpan& p : parts) {
        ok = ok && EVP_DigestUpdate(ctx, p.data(), p.size()) == 1;
    }
    ok = ok && EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok || len != out.size()) throw std::runtime_error("sha256: digest failed");
    return out;
}

Hash256 double_sha256(ByteSpan data) {
    Hash256 first = sha256(data);
    return sha256(first);
}

}  // namespace anchorid
