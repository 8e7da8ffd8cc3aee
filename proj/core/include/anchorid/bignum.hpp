#pragma once

#include "anchorid/bytes.hpp"

#include <compare>
#include <cstdint>

typedef struct bignum_st BIGNUM;

namespace anchorid {

/// Value-semantic wrapper around an OpenSSL BIGNUM. Non-negative values only;
/// modular helpers reduce into [0, m).
class BigNum {
public:
    BigNum();
    BigNum(const BigNum& other);
    BigNum(BigNum&& other) noexcept;
    BigNum& operator=(const BigNum& other);
    BigNum& operator=(BigNum&& other) noexcept;
    ~BigNum();

    static BigNum from_u64(uint64_t v);
    static BigNum from_bytes_be(ByteSpan data);
    static std::optional<BigNum> from_dec(std::string_view s);

    bool is_zero() const;
    uint64_t to_u64() const;  // callers ensure the value fits
    size_t byte_length() const;

    /// Big-endian, left-padded to `width` bytes; throws if the value does not fit.
    Bytes to_bytes_be(size_t width) const;
    std::string to_dec() const;

    static BigNum add_mod(const BigNum& a, const BigNum& b, const BigNum& m);
    static BigNum sub_mod(const BigNum& a, const BigNum& b, const BigNum& m);
    static BigNum mul_mod(const BigNum& a, const BigNum& b, const BigNum& m);
    static BigNum neg_mod(const BigNum& a, const BigNum& m);
    /// Modular inverse; throws std::domain_error when gcd(a, m) != 1.
    static BigNum inv_mod(const BigNum& a, const BigNum& m);
    static BigNum mod(const BigNum& a, const BigNum& m);

    std::strong_ordering operator<=>(const BigNum& other) const;
    bool operator==(const BigNum& other) const;

    const BIGNUM* raw() const { return bn_; }

private:
    BIGNUM* bn_;
};

}  // namespace anchorid
