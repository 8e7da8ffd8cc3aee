#pragma once

#include "anchorid/bignum.hpp"
#include "anchorid/bytes.hpp"

#include <memory>
#include <stdexcept>
#include <string_view>

namespace anchorid {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wrong number of exponents, responses, attributes, ...
struct ArityError : Error {
    using Error::Error;
};

/// Exponent mod q. Always reduced: 0 <= value < q.
class Scalar {
public:
    Scalar() = default;  // zero

    static Scalar from_u64(uint64_t v, const BigNum& q);
    static Scalar from_bignum(const BigNum& v, const BigNum& q);  // reduces
    /// Big-endian bytes reduced mod q.
    static Scalar from_bytes_mod(ByteSpan data, const BigNum& q);
    /// Strict decode: exact width, value < q. Used on the wire.
    static std::optional<Scalar> decode(ByteSpan data, const BigNum& q, size_t width);

    const BigNum& value() const { return v_; }
    uint64_t to_u64() const { return v_.to_u64(); }
    bool is_zero() const { return v_.is_zero(); }
    Bytes encode(size_t width) const { return v_.to_bytes_be(width); }

    bool operator==(const Scalar& other) const { return v_ == other.v_; }
    std::strong_ordering operator<=>(const Scalar& other) const { return v_ <=> other.v_; }

private:
    explicit Scalar(BigNum v) : v_(std::move(v)) {}
    BigNum v_;
};

Scalar sc_add(const Scalar& a, const Scalar& b, const BigNum& q);
Scalar sc_sub(const Scalar& a, const Scalar& b, const BigNum& q);
Scalar sc_mul(const Scalar& a, const Scalar& b, const BigNum& q);
Scalar sc_neg(const Scalar& a, const BigNum& q);
Scalar sc_inv(const Scalar& a, const BigNum& q);  // throws std::domain_error on zero

/// Element of the ambient group in canonical encoded form. Canonical bytes make
/// equality, hashing, and wire transport direct; the backend interprets them.
struct GroupElement {
    Bytes enc;
    bool operator==(const GroupElement&) const = default;
    bool operator<(const GroupElement& o) const { return enc < o.enc; }
};

/// Prime-order group backend. Multiplicative notation throughout; the curve
/// backend maps it onto point addition.
class Group {
public:
    virtual ~Group() = default;

    virtual std::string_view name() const = 0;
    virtual const BigNum& order() const = 0;
    virtual size_t scalar_width() const = 0;
    virtual size_t element_width() const = 0;

    virtual GroupElement identity() const = 0;
    virtual GroupElement op(const GroupElement& a, const GroupElement& b) const = 0;
    virtual GroupElement inv(const GroupElement& a) const = 0;
    virtual GroupElement pow(const GroupElement& a, const Scalar& e) const = 0;

    /// Validates subgroup membership; rejects anything that is not a canonical
    /// encoding of a group element.
    virtual std::optional<GroupElement> decode(ByteSpan data) const = 0;

    /// Deterministic j-th generator for this backend.
    virtual GroupElement generator(size_t j) const = 0;

    bool is_identity(const GroupElement& a) const { return a == identity(); }
};

/// Order-23 subgroup of Z_47^*, generators 2, 4, 8, ... Small enough that every
/// test oracle can recompute results by hand.
std::shared_ptr<const Group> test_group();

/// secp256k1 with generators derived by try-and-increment from
/// "dlrep-anchor/gen/<j>" (see Secp256k1Group::generator).
std::shared_ptr<const Group> secp256k1_group();

enum class Backend { test, secp256k1 };

std::shared_ptr<const Group> make_group(Backend b);
std::optional<Backend> backend_from_name(std::string_view name);

/// A group plus its generator basis g_0..g_n. n is the attribute count; index 0
/// is the blinding slot.
struct GroupParams {
    std::shared_ptr<const Group> group;
    std::vector<GroupElement> generators;

    size_t n() const { return generators.size() - 1; }
    const BigNum& q() const { return group->order(); }
    size_t scalar_width() const { return group->scalar_width(); }
};

/// Basis g_0..g_n for `attribute_count` attributes (so n+1 generators).
GroupParams make_params(Backend b, size_t attribute_count);

/// Prod_j generators[j]^exponents[j]. Throws ArityError on length mismatch.
GroupElement multi_exp(const GroupParams& params, std::span<const Scalar> exponents);

/// SHA-256(data) as a big-endian integer reduced mod q.
Scalar hash_to_scalar(ByteSpan data, const BigNum& q);

/// SHA-256 counter DRBG. Seeded instances are fully reproducible; the entropy
/// constructor pulls the key from the OS.
class Rng {
public:
    static Rng seeded(uint64_t seed);
    static Rng seeded_bytes(ByteSpan key);
    static Rng from_entropy();

    void fill(std::span<uint8_t> out);
    Bytes bytes(size_t n);
    uint64_t next_u64();

private:
    Rng() = default;
    Hash256 key_{};
    uint64_t counter_ = 0;
    Hash256 block_{};
    size_t pos_ = sizeof(Hash256);
};

/// Uniform in [0, q) by rejection sampling.
Scalar random_scalar(Rng& rng, const BigNum& q);

}  // namespace anchorid
