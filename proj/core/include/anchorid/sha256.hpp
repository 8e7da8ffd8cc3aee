#pragma once

#include "anchorid/bytes.hpp"

namespace anchorid {

Hash256 sha256(ByteSpan data);
Hash256 sha256_concat(std::initializer_list<ByteSpan> parts);

/// Bitcoin-style double hash, used for transaction ids.
Hash256 double_sha256(ByteSpan data);

}  // namespace anchorid
