#include "anchorid/ed25519.hpp"

#include "anchorid/group.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace anchorid {

namespace {

using PkeyPtr = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

PkeyPtr load_private(ByteSpan seed) {
    EVP_PKEY* p = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size());
    if (!p) throw std::runtime_error("ed25519: bad private key");
    return PkeyPtr(p, EVP_PKEY_free);
}

}  // namespace

SignKeypair ed25519_keygen(Rng& rng) {
    SignKeypair kp;
    kp.sk = rng.bytes(32);
    PkeyPtr key = load_private(kp.sk);
    size_t pk_len = 32;
    kp.pk.resize(pk_len);
    if (EVP_PKEY_get_raw_public_key(key.get(), kp.pk.data(), &pk_len) != 1 || pk_len != 32) {
        throw std::runtime_error("ed25519: public key derivation failed");
    }
    return kp;
}

Bytes ed25519_sign(const SignKeypair& key, ByteSpan message) {
    PkeyPtr pkey = load_private(key.sk);
    MdCtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx) throw std::bad_alloc();
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) {
        throw std::runtime_error("ed25519: sign init failed");
    }
    size_t sig_len = 64;
    Bytes sig(sig_len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &sig_len, message.data(), message.size()) != 1) {
        throw std::runtime_error("ed25519: sign failed");
    }
    sig.resize(sig_len);
    return sig;
}

bool ed25519_verify(ByteSpan pk, ByteSpan message, ByteSpan signature) {
    if (pk.size() != 32 || signature.size() != 64) return false;
    EVP_PKEY* raw = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pk.data(), pk.size());
    if (!raw) return false;
    PkeyPtr pkey(raw, EVP_PKEY_free);
    MdCtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx) return false;
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                            message.size()) == 1;
}

}  // namespace anchorid
