#include "anchorid/group.hpp"

#include "anchorid/sha256.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>
#include <openssl/rand.h>

#include <mutex>

namespace anchorid {

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::from_u64(uint64_t v, const BigNum& q) {
    return Scalar(BigNum::mod(BigNum::from_u64(v), q));
}

Scalar Scalar::from_bignum(const BigNum& v, const BigNum& q) {
    return Scalar(BigNum::mod(v, q));
}

Scalar Scalar::from_bytes_mod(ByteSpan data, const BigNum& q) {
    return Scalar(BigNum::mod(BigNum::from_bytes_be(data), q));
}

std::optional<Scalar> Scalar::decode(ByteSpan data, const BigNum& q, size_t width) {
    if (data.size() != width) return std::nullopt;
    BigNum v = BigNum::from_bytes_be(data);
    if (v >= q) return std::nullopt;
    return Scalar(std::move(v));
}

Scalar sc_add(const Scalar& a, const Scalar& b, const BigNum& q) {
    return Scalar::from_bignum(BigNum::add_mod(a.value(), b.value(), q), q);
}

Scalar sc_sub(const Scalar& a, const Scalar& b, const BigNum& q) {
    return Scalar::from_bignum(BigNum::sub_mod(a.value(), b.value(), q), q);
}

Scalar sc_mul(const Scalar& a, const Scalar& b, const BigNum& q) {
    return Scalar::from_bignum(BigNum::mul_mod(a.value(), b.value(), q), q);
}

Scalar sc_neg(const Scalar& a, const BigNum& q) {
    return Scalar::from_bignum(BigNum::neg_mod(a.value(), q), q);
}

Scalar sc_inv(const Scalar& a, const BigNum& q) {
    return Scalar::from_bignum(BigNum::inv_mod(a.value(), q), q);
}

// ---------------------------------------------------------------------------
// Test backend: subgroup of order 23 in Z_47^*.

namespace {

constexpr uint64_t kTestP = 47;
constexpr uint64_t kTestQ = 23;

class TestGroup final : public Group {
public:
    TestGroup() : q_(BigNum::from_u64(kTestQ)) {}

    std::string_view name() const override { return "test"; }
    const BigNum& order() const override { return q_; }
    size_t scalar_width() const override { return 4; }
    size_t element_width() const override { return 4; }

    GroupElement identity() const override { return encode_residue(1); }

    GroupElement op(const GroupElement& a, const GroupElement& b) const override {
        return encode_residue(residue(a) * residue(b) % kTestP);
    }

    GroupElement inv(const GroupElement& a) const override {
        // x^(p-2) = x^-1 in Z_p^*
        uint64_t r = 1, base = residue(a);
        for (uint64_t e = kTestP - 2; e > 0; --e) r = r * base % kTestP;
        return encode_residue(r);
    }

    GroupElement pow(const GroupElement& a, const Scalar& e) const override {
        // exponent < 23: plain repeated multiplication
        uint64_t r = 1, base = residue(a);
        for (uint64_t i = 0, n = e.to_u64(); i < n; ++i) r = r * base % kTestP;
        return encode_residue(r);
    }

    std::optional<GroupElement> decode(ByteSpan data) const override {
        if (data.size() != 4) return std::nullopt;
        uint64_t v = 0;
        for (uint8_t b : data) v = (v << 8) | b;
        if (v == 0 || v >= kTestP) return std::nullopt;
        // subgroup membership: v^q == 1 mod p
        uint64_t r = 1;
        for (uint64_t i = 0; i < kTestQ; ++i) r = r * v % kTestP;
        if (r != 1) return std::nullopt;
        return encode_residue(v);
    }

    GroupElement generator(size_t j) const override {
        // (2, 4, 8, 16, ...): successive powers of 2 stay inside the order-23
        // subgroup and are non-identity for j < 22.
        if (j >= 22) throw Error("test group: generator index out of range");
        uint64_t r = 1;
        for (size_t i = 0; i <= j; ++i) r = r * 2 % kTestP;
        return encode_residue(r);
    }

private:
    static uint64_t residue(const GroupElement& a) {
        uint64_t v = 0;
        for (uint8_t b : a.enc) v = (v << 8) | b;
        return v;
    }

    static GroupElement encode_residue(uint64_t v) {
        GroupElement g;
        put_be32(g.enc, static_cast<uint32_t>(v));
        return g;
    }

    BigNum q_;
};

// ---------------------------------------------------------------------------
// secp256k1 backend over OpenSSL EC.

struct EcPointPtr {
    EC_POINT* p = nullptr;
    const EC_GROUP* g = nullptr;
    EcPointPtr(const EC_GROUP* grp) : p(EC_POINT_new(grp)), g(grp) {
        if (!p) throw std::bad_alloc();
    }
    EcPointPtr(const EcPointPtr&) = delete;
    ~EcPointPtr() {
        if (p) EC_POINT_free(p);
    }
};

class Secp256k1Group final : public Group {
public:
    Secp256k1Group() {
        grp_ = EC_GROUP_new_by_curve_name(NID_secp256k1);
        if (!grp_) throw Error("secp256k1: curve unavailable");
        ctx_ = BN_CTX_new();
        BIGNUM* ord = BN_new();
        if (!ctx_ || !ord || EC_GROUP_get_order(grp_, ord, ctx_) != 1) {
            throw Error("secp256k1: order unavailable");
        }
        Bytes ord_bytes(32);
        BN_bn2binpad(ord, ord_bytes.data(), 32);
        BN_free(ord);
        q_ = BigNum::from_bytes_be(ord_bytes);
    }

    ~Secp256k1Group() override {
        if (ctx_) BN_CTX_free(ctx_);
        if (grp_) EC_GROUP_free(grp_);
    }

    std::string_view name() const override { return "secp256k1"; }
    const BigNum& order() const override { return q_; }
    size_t scalar_width() const override { return 32; }
    size_t element_width() const override { return 33; }

    GroupElement identity() const override {
        // SEC1 has no fixed-width encoding for the point at infinity; the
        // all-zero string is reserved for it here.
        GroupElement g;
        g.enc.assign(33, 0x00);
        return g;
    }

    GroupElement op(const GroupElement& a, const GroupElement& b) const override {
        std::lock_guard lock(mu_);
        EcPointPtr pa(grp_), pb(grp_), r(grp_);
        load(a, pa);
        load(b, pb);
        if (EC_POINT_add(grp_, r.p, pa.p, pb.p, ctx_) != 1) throw Error("secp256k1: add failed");
        return store(r);
    }

    GroupElement inv(const GroupElement& a) const override {
        std::lock_guard lock(mu_);
        EcPointPtr pa(grp_);
        load(a, pa);
        if (EC_POINT_invert(grp_, pa.p, ctx_) != 1) throw Error("secp256k1: invert failed");
        return store(pa);
    }

    GroupElement pow(const GroupElement& a, const Scalar& e) const override {
        std::lock_guard lock(mu_);
        EcPointPtr pa(grp_), r(grp_);
        load(a, pa);
        Bytes eb = e.encode(32);
        BIGNUM* ebn = BN_bin2bn(eb.data(), 32, nullptr);
        int ok = EC_POINT_mul(grp_, r.p, nullptr, pa.p, ebn, ctx_);
        BN_free(ebn);
        if (ok != 1) throw Error("secp256k1: mul failed");
        return store(r);
    }

    std::optional<GroupElement> decode(ByteSpan data) const override {
        if (data.size() != 33) return std::nullopt;
        bool all_zero = true;
        for (uint8_t b : data)
            if (b) all_zero = false;
        if (all_zero) return identity();
        if (data[0] != 0x02 && data[0] != 0x03) return std::nullopt;
        std::lock_guard lock(mu_);
        EcPointPtr p(grp_);
        if (EC_POINT_oct2point(grp_, p.p, data.data(), data.size(), ctx_) != 1) {
            return std::nullopt;  // not on the curve; cofactor 1 makes on-curve sufficient
        }
        GroupElement g;
        g.enc.assign(data.begin(), data.end());
        return g;
    }

    GroupElement generator(size_t j) const override {
        // Nothing-up-my-sleeve basis: candidate x = SHA-256("dlrep-anchor/gen/<j>"
        // || be32(ctr)) with even-y prefix 0x02, incrementing ctr until the
        // x-coordinate lifts onto the curve.
        Bytes seed = to_bytes("dlrep-anchor/gen/");
        Bytes dec = to_bytes(std::to_string(j));
        seed.insert(seed.end(), dec.begin(), dec.end());
        for (uint32_t ctr = 0;; ++ctr) {
            Bytes attempt = seed;
            put_be32(attempt, ctr);
            Hash256 x = sha256(attempt);
            Bytes candidate;
            candidate.push_back(0x02);
            candidate.insert(candidate.end(), x.begin(), x.end());
            if (auto g = decode(candidate)) return *g;
        }
    }

private:
    void load(const GroupElement& a, EcPointPtr& out) const {
        bool all_zero = true;
        for (uint8_t b : a.enc)
            if (b) all_zero = false;
        if (all_zero) {
            if (EC_POINT_set_to_infinity(grp_, out.p) != 1) throw Error("secp256k1: infinity");
            return;
        }
        if (a.enc.size() != 33 ||
            EC_POINT_oct2point(grp_, out.p, a.enc.data(), a.enc.size(), ctx_) != 1) {
            throw Error("secp256k1: bad element encoding");
        }
    }

    GroupElement store(const EcPointPtr& p) const {
        if (EC_POINT_is_at_infinity(grp_, p.p)) return identity_nolock();
        GroupElement g;
        g.enc.resize(33);
        size_t len = EC_POINT_point2oct(grp_, p.p, POINT_CONVERSION_COMPRESSED, g.enc.data(), 33,
                                        ctx_);
        if (len != 33) throw Error("secp256k1: encode failed");
        return g;
    }

    static GroupElement identity_nolock() {
        GroupElement g;
        g.enc.assign(33, 0x00);
        return g;
    }

    EC_GROUP* grp_ = nullptr;
    BN_CTX* ctx_ = nullptr;
    mutable std::mutex mu_;  // guards the shared BN_CTX
    BigNum q_;
};

}  // namespace

std::shared_ptr<const Group> test_group() {
    static std::shared_ptr<const Group> g = std::make_shared<TestGroup>();
    return g;
}

std::shared_ptr<const Group> secp256k1_group() {
    static std::shared_ptr<const Group> g = std::make_shared<Secp256k1Group>();
    return g;
}

std::shared_ptr<const Group> make_group(Backend b) {
    return b == Backend::test ? test_group() : secp256k1_group();
}

std::optional<Backend> backend_from_name(std::string_view name) {
    if (name == "test") return Backend::test;
    if (name == "secp256k1") return Backend::secp256k1;
    return std::nullopt;
}

GroupParams make_params(Backend b, size_t attribute_count) {
    GroupParams params;
    params.group = make_group(b);
    params.generators.reserve(attribute_count + 1);
    for (size_t j = 0; j <= attribute_count; ++j) {
        GroupElement g = params.group->generator(j);
        if (params.group->is_identity(g)) throw Error("params: identity generator");
        params.generators.push_back(std::move(g));
    }
    if (params.generators.size() < 2) throw Error("params: need at least two generators");
    return params;
}

GroupElement multi_exp(const GroupParams& params, std::span<const Scalar> exponents) {
    if (exponents.size() != params.generators.size()) {
        throw ArityError("multi_exp: exponent count != generator count");
    }
    GroupElement acc = params.group->identity();
    for (size_t j = 0; j < exponents.size(); ++j) {
        acc = params.group->op(acc, params.group->pow(params.generators[j], exponents[j]));
    }
    return acc;
}

Scalar hash_to_scalar(ByteSpan data, const BigNum& q) {
    Hash256 h = sha256(data);
    return Scalar::from_bytes_mod(h, q);
}

// ---------------------------------------------------------------------------
// Rng

Rng Rng::seeded(uint64_t seed) {
    Bytes material = to_bytes("anchorid-rng/");
    put_be64(material, seed);
    Rng r;
    r.key_ = sha256(material);
    return r;
}

Rng Rng::seeded_bytes(ByteSpan key) {
    Rng r;
    r.key_ = sha256(key);
    return r;
}

Rng Rng::from_entropy() {
    Rng r;
    if (RAND_bytes(r.key_.data(), static_cast<int>(r.key_.size())) != 1) {
        throw Error("rng: no entropy source available");
    }
    return r;
}

void Rng::fill(std::span<uint8_t> out) {
    for (uint8_t& b : out) {
        if (pos_ == block_.size()) {
            Bytes material(key_.begin(), key_.end());
            put_be64(material, counter_++);
            block_ = sha256(material);
            pos_ = 0;
        }
        b = block_[pos_++];
    }
}

Bytes Rng::bytes(size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

uint64_t Rng::next_u64() {
    uint8_t buf[8];
    fill(buf);
    uint64_t v = 0;
    for (uint8_t b : buf) v = (v << 8) | b;
    return v;
}

Scalar random_scalar(Rng& rng, const BigNum& q) {
    const size_t width = q.byte_length();
    // mask the top byte down to q's bit length so rejection is cheap
    Bytes qb = q.to_bytes_be(width);
    uint8_t top = qb[0];
    uint8_t mask = 0xff;
    while ((mask >> 1) >= top) mask >>= 1;
    for (;;) {
        Bytes draw = rng.bytes(width);
        draw[0] &= mask;
        BigNum v = BigNum::from_bytes_be(draw);
        if (v < q) return Scalar::from_bignum(v, q);
    }
}

}  // namespace anchorid
