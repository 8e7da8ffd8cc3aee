#include "anchorid/bignum.hpp"

#include <openssl/bn.h>

#include <stdexcept>

namespace anchorid {

namespace {

struct CtxHolder {
    BN_CTX* c = BN_CTX_new();
    ~CtxHolder() { BN_CTX_free(c); }
};

BN_CTX* ctx() {
    thread_local CtxHolder holder;
    return holder.c;
}

void check(int ok, const char* what) {
    if (ok != 1) throw std::runtime_error(std::string("bignum: ") + what);
}

}  // namespace

BigNum::BigNum() : bn_(BN_new()) {
    if (!bn_) throw std::bad_alloc();
    BN_zero(bn_);
}

BigNum::BigNum(const BigNum& other) : bn_(BN_dup(other.bn_)) {
    if (!bn_) throw std::bad_alloc();
}

BigNum::BigNum(BigNum&& other) noexcept : bn_(other.bn_) {
    other.bn_ = nullptr;
}

BigNum& BigNum::operator=(const BigNum& other) {
    if (this != &other) check(BN_copy(bn_, other.bn_) != nullptr, "copy");
    return *this;
}

BigNum& BigNum::operator=(BigNum&& other) noexcept {
    if (this != &other) {
        if (bn_) BN_free(bn_);
        bn_ = other.bn_;
        other.bn_ = nullptr;
    }
    return *this;
}

BigNum::~BigNum() {
    if (bn_) BN_free(bn_);
}

BigNum BigNum::from_u64(uint64_t v) {
    BigNum r;
    check(BN_set_word(r.bn_, v), "set_word");
    return r;
}

BigNum BigNum::from_bytes_be(ByteSpan data) {
    BigNum r;
    check(BN_bin2bn(data.data(), static_cast<int>(data.size()), r.bn_) != nullptr, "bin2bn");
    return r;
}

std::optional<BigNum> BigNum::from_dec(std::string_view s) {
    BigNum r;
    std::string copy(s);
    if (BN_dec2bn(&r.bn_, copy.c_str()) == 0) return std::nullopt;
    if (BN_is_negative(r.bn_)) return std::nullopt;
    return r;
}

bool BigNum::is_zero() const {
    return BN_is_zero(bn_);
}

uint64_t BigNum::to_u64() const {
    BN_ULONG w = BN_get_word(bn_);
    return static_cast<uint64_t>(w);
}

size_t BigNum::byte_length() const {
    return static_cast<size_t>(BN_num_bytes(bn_));
}

Bytes BigNum::to_bytes_be(size_t width) const {
    Bytes out(width);
    if (BN_bn2binpad(bn_, out.data(), static_cast<int>(width)) < 0) {
        throw std::length_error("bignum: value wider than requested encoding");
    }
    return out;
}

std::string BigNum::to_dec() const {
    char* s = BN_bn2dec(bn_);
    if (!s) throw std::runtime_error("bignum: bn2dec");
    std::string out(s);
    OPENSSL_free(s);
    return out;
}

BigNum BigNum::add_mod(const BigNum& a, const BigNum& b, const BigNum& m) {
    BigNum r;
    check(BN_mod_add(r.bn_, a.bn_, b.bn_, m.bn_, ctx()), "mod_add");
    return r;
}

BigNum BigNum::sub_mod(const BigNum& a, const BigNum& b, const BigNum& m) {
    BigNum r;
    check(BN_mod_sub(r.bn_, a.bn_, b.bn_, m.bn_, ctx()), "mod_sub");
    return r;
}

BigNum BigNum::mul_mod(const BigNum& a, const BigNum& b, const BigNum& m) {
    BigNum r;
    check(BN_mod_mul(r.bn_, a.bn_, b.bn_, m.bn_, ctx()), "mod_mul");
    return r;
}

BigNum BigNum::neg_mod(const BigNum& a, const BigNum& m) {
    return sub_mod(BigNum(), a, m);
}

BigNum BigNum::inv_mod(const BigNum& a, const BigNum& m) {
    BigNum r;
    if (BN_mod_inverse(r.bn_, a.bn_, m.bn_, ctx()) == nullptr) {
        throw std::domain_error("bignum: not invertible");
    }
    return r;
}

BigNum BigNum::mod(const BigNum& a, const BigNum& m) {
    BigNum r;
    check(BN_nnmod(r.bn_, a.bn_, m.bn_, ctx()), "nnmod");
    return r;
}

std::strong_ordering BigNum::operator<=>(const BigNum& other) const {
    int c = BN_cmp(bn_, other.bn_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

bool BigNum::operator==(const BigNum& other) const {
    return BN_cmp(bn_, other.bn_) == 0;
}

}  // namespace anchorid
