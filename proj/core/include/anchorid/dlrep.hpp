#pragma once

#include "anchorid/group.hpp"

#include <map>
#include <vector>

namespace anchorid {

/// Prover state consumed after its one allowed challenge.
struct SingleUseError : Error {
    using Error::Error;
};

/// Prover asked to prove a statement its secrets do not satisfy.
struct CannotProveError : Error {
    using Error::Error;
};

/// Statement policy violation (e.g. a relation or disclosure touching X_0).
struct PolicyError : Error {
    using Error::Error;
};

/// h = prod_j g_j^{X_j}. The owner keeps the representation (X_0..X_n); the
/// commitment itself is public.
struct DlrepCommitment {
    GroupElement h;
    bool operator==(const DlrepCommitment&) const = default;
};

DlrepCommitment commit(const GroupParams& params, std::span<const Scalar> secrets);

/// sum_j coeffs[j-1] * X_j = beta over attribute indices 1..n. X_0 has no
/// coefficient slot by construction.
struct LinearRelation {
    std::vector<Scalar> coeffs;
    Scalar beta;
    bool operator==(const LinearRelation&) const = default;
};

/// What a transcript demonstrates: knowledge of a representation, optionally
/// with revealed attributes and an AND of linear relations over the hidden
/// ones. Index 0 is never revealed and never appears in a relation.
struct Statement {
    std::map<size_t, Scalar> disclosed;  // attribute index -> revealed value
    std::vector<LinearRelation> relations;

    bool is_knowledge() const { return disclosed.empty() && relations.empty(); }
    bool operator==(const Statement&) const = default;

    /// Canonical bytes: tag, then big-endian length-prefixed fields. Binds the
    /// statement into challenges and wire messages.
    Bytes serialize(size_t scalar_width) const;
    static std::optional<Statement> parse(ByteSpan data, const BigNum& q, size_t scalar_width);
};

/// Validates index ranges and relation arity for a basis of n attributes.
/// Throws PolicyError when index 0 is referenced.
void check_statement(const Statement& st, size_t n);

/// Nonce commitment A with its secret nonces; consumed by exactly one challenge.
class ProofCommitmentState {
public:
    const GroupElement& commitment() const { return big_a_; }
    bool used() const { return used_; }

private:
    friend ProofCommitmentState prove_begin(const GroupParams&, const Statement&, Rng&);
    friend std::vector<Scalar> prove_respond(const GroupParams&, ProofCommitmentState&,
                                             const Statement&, const Scalar&,
                                             std::span<const Scalar>);

    std::map<size_t, Scalar> nonces_;  // over the full proof basis
    GroupElement big_a_;
    bool used_ = false;
};

struct ProofTranscript {
    GroupElement big_a;
    Scalar challenge;
    std::vector<Scalar> responses;  // ordered over the statement's free index set
    Statement statement;

    Bytes serialize(const GroupParams& params) const;
    static std::optional<ProofTranscript> parse(ByteSpan data, const GroupParams& params);
};

/// Prover step 1: fresh random nonces, A = prod g_j^{a_j} over the statement's
/// proof basis. Relation rows constrain the pivot nonces.
ProofCommitmentState prove_begin(const GroupParams& params, const Statement& statement, Rng& rng);

inline ProofCommitmentState prove_begin(const GroupParams& params, Rng& rng) {
    return prove_begin(params, Statement{}, rng);
}

/// Prover step 3: b_j = a_j + c*X_j over the free index set. Throws
/// SingleUseError on state reuse and CannotProveError when the secrets do not
/// satisfy the statement's relations.
std::vector<Scalar> prove_respond(const GroupParams& params, ProofCommitmentState& state,
                                  const Statement& statement, const Scalar& challenge,
                                  std::span<const Scalar> secrets);

struct VerifyResult {
    bool ok = false;
    std::string reason;
    explicit operator bool() const { return ok; }
};

/// Verifier step 4 for any statement shape: recompute constrained responses,
/// fold revealed attributes out of h, check prod g_j^{b_j} * h'^{-c} == A.
VerifyResult verify_transcript(const GroupParams& params, const GroupElement& h,
                               const Statement& expected, const ProofTranscript& t);

VerifyResult verify_knowledge(const GroupParams& params, const GroupElement& h,
                              const ProofTranscript& t);
VerifyResult verify_disclosure(const GroupParams& params, const GroupElement& h,
                               const std::map<size_t, Scalar>& disclosed,
                               const ProofTranscript& t);
VerifyResult verify_linear(const GroupParams& params, const GroupElement& h,
                           const std::vector<LinearRelation>& relations,
                           const ProofTranscript& t);

/// Non-normative transcript mode for self-tests and audit dumps: the challenge
/// is derived as H(encode(h) || encode(A) || session_id || statement bytes)
/// instead of being chosen interactively.
Scalar transcript_challenge(const GroupParams& params, const GroupElement& h,
                            const GroupElement& big_a, ByteSpan session_id,
                            const Statement& statement);
ProofTranscript prove_transcript_mode(const GroupParams& params, const GroupElement& h,
                                      const Statement& statement, std::span<const Scalar> secrets,
                                      ByteSpan session_id, Rng& rng);
VerifyResult verify_transcript_mode(const GroupParams& params, const GroupElement& h,
                                    ByteSpan session_id, const ProofTranscript& t);

/// Zero-knowledge witness: sample responses, set A = prod g^{b} * h^{-c}. The
/// result passes verification with no knowledge of the representation.
ProofTranscript simulate_transcript(const GroupParams& params, const GroupElement& h,
                                    const Scalar& challenge, Rng& rng);

/// Special-soundness extractor (test oracle): two accepting knowledge
/// transcripts with equal A and distinct challenges yield the representation.
/// Throws std::domain_error when the challenges coincide.
std::vector<Scalar> extract_witness(const GroupParams& params, const ProofTranscript& t1,
                                    const ProofTranscript& t2);

/// Dictionary-attack demonstrator for blinding reuse: when h and h' share X_0,
/// h/h' = prod_{j>=1} g_j^{delta_j} exposes the attribute deltas. Returns the
/// first candidate delta vector that matches, if any.
std::optional<std::vector<Scalar>> blinding_reuse_attack(
    const GroupParams& params, const GroupElement& h, const GroupElement& h_prime,
    std::span<const std::vector<Scalar>> candidate_deltas);

}  // namespace anchorid
