#include "anchorid/bytes.hpp"

namespace anchorid {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string hex_encode(ByteSpan data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::optional<Bytes> hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

void put_be16(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_be32(Bytes& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_be64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_le32(Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_le64(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

std::optional<uint8_t> ByteReader::u8() {
    if (remaining() < 1) return std::nullopt;
    return data_[pos_++];
}

std::optional<uint16_t> ByteReader::be16() {
    auto s = take(2);
    if (!s) return std::nullopt;
    return static_cast<uint16_t>(((*s)[0] << 8) | (*s)[1]);
}

std::optional<uint32_t> ByteReader::be32() {
    auto s = take(4);
    if (!s) return std::nullopt;
    uint32_t v = 0;
    for (uint8_t b : *s) v = (v << 8) | b;
    return v;
}

std::optional<uint64_t> ByteReader::be64() {
    auto s = take(8);
    if (!s) return std::nullopt;
    uint64_t v = 0;
    for (uint8_t b : *s) v = (v << 8) | b;
    return v;
}

std::optional<uint32_t> ByteReader::le32() {
    auto s = take(4);
    if (!s) return std::nullopt;
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | (*s)[i];
    return v;
}

std::optional<uint64_t> ByteReader::le64() {
    auto s = take(8);
    if (!s) return std::nullopt;
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | (*s)[i];
    return v;
}

std::optional<ByteSpan> ByteReader::take(size_t n) {
    if (remaining() < n) return std::nullopt;
    ByteSpan s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
}

}  // namespace anchorid
