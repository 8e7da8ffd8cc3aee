#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anchorid {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;
using Hash256 = std::array<uint8_t, 32>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline Bytes to_bytes(const Hash256& h) {
    return Bytes(h.begin(), h.end());
}

inline std::optional<Hash256> to_hash256(ByteSpan b) {
    if (b.size() != 32) return std::nullopt;
    Hash256 h;
    std::copy(b.begin(), b.end(), h.begin());
    return h;
}

std::string hex_encode(ByteSpan data);
std::optional<Bytes> hex_decode(std::string_view hex);

// big-endian fixed-width integer encodings
void put_be16(Bytes& out, uint16_t v);
void put_be32(Bytes& out, uint32_t v);
void put_be64(Bytes& out, uint64_t v);

// little-endian, for the Bitcoin-compatible raw transaction layout
void put_le32(Bytes& out, uint32_t v);
void put_le64(Bytes& out, uint64_t v);

class ByteReader {
public:
    explicit ByteReader(ByteSpan data) : data_(data) {}

    bool empty() const { return pos_ >= data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

    std::optional<uint8_t> u8();
    std::optional<uint16_t> be16();
    std::optional<uint32_t> be32();
    std::optional<uint64_t> be64();
    std::optional<uint32_t> le32();
    std::optional<uint64_t> le64();
    std::optional<ByteSpan> take(size_t n);

private:
    ByteSpan data_;
    size_t pos_ = 0;
};

}  // namespace anchorid
