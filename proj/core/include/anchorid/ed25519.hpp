#pragma once

#include "anchorid/bytes.hpp"

namespace anchorid {

class Rng;

/// Ed25519 signing pair. The simulator uses it both for transaction spend
/// authorization and for the authenticated-channel endpoints.
struct SignKeypair {
    Bytes pk;  // 32 bytes
    Bytes sk;  // 32-byte seed
};

/// Deterministic when the Rng is seeded: the 32-byte seed is drawn from it.
SignKeypair ed25519_keygen(Rng& rng);

Bytes ed25519_sign(const SignKeypair& key, ByteSpan message);
bool ed25519_verify(ByteSpan pk, ByteSpan message, ByteSpan signature);

}  // namespace anchorid
