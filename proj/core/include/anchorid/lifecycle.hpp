#pragma once

#include "anchorid/dlrep.hpp"
#include "anchorid/sparse_merkle.hpp"

#include <iosfwd>

namespace anchorid {

/// Operation not valid for the record's state (revoked, wrong k, ...).
struct LifecycleError : Error {
    using Error::Error;
};

/// Everything the user must hold to authenticate. X_00 never leaves the user;
/// X_01 is the issuer-shared half of the blinding.
struct UserSecret {
    Scalar x00;
    Scalar x01;
    uint64_t k = 0;
    std::vector<Scalar> attributes;  // X_1..X_n
};

/// k-fold SHA-256 chain over the scalar: each step hashes the 32-byte
/// big-endian encoding and reduces mod q. H^0 is the value itself.
Scalar chain_value(const Scalar& x01, uint64_t k, const BigNum& q);

/// X_0^(k) = X_00 + H^k(X_01), computed offline by the user.
Scalar user_recompute_x0(const UserSecret& secret, uint64_t k, const BigNum& q);

struct UserInit {
    Scalar x00;
    GroupElement h00;              // g_0^{X_00}
    ProofTranscript wellformed;    // knowledge proof over the basis (g_0)
};

/// User-side start of enrollment: random X_00, h_00 = g_0^{X_00}, and a proof
/// that h_00 has that form (and not e.g. a*g_0^b).
UserInit user_init(const GroupParams& params, Rng& rng);

/// Single-generator sub-basis (g_0) used for the well-formedness proof.
GroupParams wellformedness_basis(const GroupParams& params);
bool verify_wellformedness(const GroupParams& params, const GroupElement& h00,
                           const ProofTranscript& t);

/// Issuer-side record. Only the chain value for the NEXT update is stored;
/// g0_x0 carries g_0^{X_0^(k)} forward so the update formula never needs the
/// spent chain values.
struct IssuerRecord {
    Bytes account;
    GroupElement h_current;
    GroupElement h00;
    GroupElement g0_x0;
    Scalar next_chain;  // H^{k+1}(X_01)
    uint64_t k = 0;
    std::map<size_t, Scalar> attributes;  // retained values; deletable per field
    Bytes metadata;
    bool revoked = false;
};

struct EnrollResult {
    Scalar x01;  // securely communicated to the user, then discarded by the issuer
    IssuerRecord record;
    GroupElement h;
};

/// Verifies the well-formedness transcript, draws X_01, and assembles
/// h = h_00 * g_0^{X_01} * prod g_j^{X_j}. Rejects invalid transcripts.
EnrollResult issuer_enroll(const GroupParams& params, ByteSpan account, const GroupElement& h00,
                           const ProofTranscript& wellformed, std::span<const Scalar> attributes,
                           ByteSpan metadata, Rng& rng);

/// k-th update: changed attribute values only (the issuer never needs the
/// unchanged ones). Advances the stored chain value and returns the new h.
/// k_target must be record.k + 1; an update that would reuse X_0 is refused.
GroupElement issuer_update(const GroupParams& params, IssuerRecord& record,
                           const std::map<size_t, Scalar>& changed_attributes, uint64_t k_target);

/// Tombstone the record: leaf content becomes the empty string. Returns the
/// tombstone leaf hash; idempotent (second call reports false).
struct RevokeResult {
    Hash256 tombstone;
    bool changed;
};
RevokeResult revoke(IssuerRecord& record);

/// Key-loss recovery: install a fresh X_00/X_01 pair through the update path.
/// Attributes survive; k restarts at 0 for the new chain. The caller asserts
/// that the user re-proved her identity out of band.
struct ReissueResult {
    Scalar x01;
    GroupElement h;
};
ReissueResult reissue_secret(const GroupParams& params, IssuerRecord& record,
                             const UserInit& fresh, bool reauthenticated, Rng& rng);

/// User-facing credential: where the identity lives in the tree and on the
/// chain. Secrets ride along in memory but are exported to a separate keystore.
struct IdentityCredential {
    Hash256 txid{};
    TreeIndex iota;
    MerkleBranch branch;
    GroupElement h;
    Bytes metadata;
    UserSecret secret;
};

void save_credential(std::ostream& out, const IdentityCredential& cred);
std::optional<IdentityCredential> load_credential(std::istream& in, const GroupParams& params);
void save_keystore(std::ostream& out, const UserSecret& secret, const GroupParams& params);
std::optional<UserSecret> load_keystore(std::istream& in, const GroupParams& params);

}  // namespace anchorid
