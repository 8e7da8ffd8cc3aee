#include "anchorid/dlrep.hpp"

#include "anchorid/sha256.hpp"

#include <algorithm>
#include <set>

namespace anchorid {

DlrepCommitment commit(const GroupParams& params, std::span<const Scalar> secrets) {
    return DlrepCommitment{multi_exp(params, secrets)};
}

void check_statement(const Statement& st, size_t n) {
    for (const auto& [j, value] : st.disclosed) {
        (void)value;
        if (j == 0) throw PolicyError("statement: X_0 is secret and never revealed");
        if (j > n) throw ArityError("statement: disclosed index out of range");
    }
    for (const LinearRelation& rel : st.relations) {
        if (rel.coeffs.size() != n) {
            throw ArityError("statement: relation coefficient count != n");
        }
    }
}

Bytes Statement::serialize(size_t scalar_width) const {
    Bytes out;
    out.push_back(0x01);
    put_be16(out, static_cast<uint16_t>(disclosed.size()));
    for (const auto& [j, value] : disclosed) {
        put_be16(out, static_cast<uint16_t>(j));
        Bytes enc = value.encode(scalar_width);
        out.insert(out.end(), enc.begin(), enc.end());
    }
    put_be16(out, static_cast<uint16_t>(relations.size()));
    for (const LinearRelation& rel : relations) {
        put_be16(out, static_cast<uint16_t>(rel.coeffs.size()));
        for (const Scalar& c : rel.coeffs) {
            Bytes enc = c.encode(scalar_width);
            out.insert(out.end(), enc.begin(), enc.end());
        }
        Bytes enc = rel.beta.encode(scalar_width);
        out.insert(out.end(), enc.begin(), enc.end());
    }
    return out;
}

std::optional<Statement> Statement::parse(ByteSpan data, const BigNum& q, size_t scalar_width) {
    ByteReader r(data);
    auto tag = r.u8();
    if (!tag || *tag != 0x01) return std::nullopt;
    Statement st;
    auto n_disclosed = r.be16();
    if (!n_disclosed) return std::nullopt;
    for (uint16_t i = 0; i < *n_disclosed; ++i) {
        auto j = r.be16();
        auto raw = r.take(scalar_width);
        if (!j || !raw) return std::nullopt;
        auto value = Scalar::decode(*raw, q, scalar_width);
        if (!value) return std::nullopt;
        st.disclosed.emplace(*j, *value);
    }
    auto n_rel = r.be16();
    if (!n_rel) return std::nullopt;
    for (uint16_t i = 0; i < *n_rel; ++i) {
        auto n_coeff = r.be16();
        if (!n_coeff) return std::nullopt;
        LinearRelation rel;
        for (uint16_t k = 0; k < *n_coeff; ++k) {
            auto raw = r.take(scalar_width);
            if (!raw) return std::nullopt;
            auto c = Scalar::decode(*raw, q, scalar_width);
            if (!c) return std::nullopt;
            rel.coeffs.push_back(*c);
        }
        auto raw = r.take(scalar_width);
        if (!raw) return std::nullopt;
        auto beta = Scalar::decode(*raw, q, scalar_width);
        if (!beta) return std::nullopt;
        rel.beta = *beta;
        st.relations.push_back(std::move(rel));
    }
    if (!r.empty()) return std::nullopt;
    return st;
}

namespace {

// Reduced row after Gauss-Jordan: the pivot variable over the free variables,
// X_p + sum coeffs[f]*X_f = rhs.
struct ReducedRow {
    size_t pivot = 0;
    std::map<size_t, Scalar> coeffs;
    Scalar rhs;
};

struct RelationSystem {
    std::vector<ReducedRow> rows;
    bool inconsistent = false;
    std::vector<size_t> basis;     // proof basis: {0} + undisclosed attributes
    std::vector<size_t> free_set;  // basis minus pivots, ascending
};

RelationSystem reduce_relations(const GroupParams& params, const Statement& st) {
    const BigNum& q = params.q();
    const size_t n = params.n();
    RelationSystem sys;

    sys.basis.push_back(0);
    for (size_t j = 1; j <= n; ++j) {
        if (!st.disclosed.contains(j)) sys.basis.push_back(j);
    }

    // seed rows, substituting disclosed values into the right-hand side
    struct WorkRow {
        std::map<size_t, Scalar> coeffs;
        Scalar rhs;
        bool done = false;
        size_t pivot = 0;
    };
    std::vector<WorkRow> work;
    for (const LinearRelation& rel : st.relations) {
        WorkRow row;
        row.rhs = rel.beta;
        for (size_t j = 1; j <= n; ++j) {
            const Scalar& alpha = rel.coeffs[j - 1];
            if (alpha.is_zero()) continue;
            auto it = st.disclosed.find(j);
            if (it != st.disclosed.end()) {
                row.rhs = sc_sub(row.rhs, sc_mul(alpha, it->second, q), q);
            } else {
                row.coeffs.emplace(j, alpha);
            }
        }
        work.push_back(std::move(row));
    }

    // Gauss-Jordan over ascending attribute columns
    for (size_t col = 1; col <= n; ++col) {
        WorkRow* pivot_row = nullptr;
        for (WorkRow& row : work) {
            if (!row.done && row.coeffs.contains(col)) {
                pivot_row = &row;
                break;
            }
        }
        if (!pivot_row) continue;
        Scalar inv = sc_inv(pivot_row->coeffs.at(col), q);
        for (auto& [j, c] : pivot_row->coeffs) c = sc_mul(c, inv, q);
        pivot_row->rhs = sc_mul(pivot_row->rhs, inv, q);
        pivot_row->done = true;
        pivot_row->pivot = col;
        for (WorkRow& row : work) {
            if (&row == pivot_row) continue;
            auto it = row.coeffs.find(col);
            if (it == row.coeffs.end()) continue;
            Scalar factor = it->second;
            row.coeffs.erase(it);
            for (const auto& [j, c] : pivot_row->coeffs) {
                if (j == col) continue;
                auto [slot, inserted] = row.coeffs.try_emplace(j, Scalar{});
                (void)inserted;
                slot->second = sc_sub(slot->second, sc_mul(factor, c, q), q);
                if (slot->second.is_zero()) row.coeffs.erase(slot);
            }
            row.rhs = sc_sub(row.rhs, sc_mul(factor, pivot_row->rhs, q), q);
        }
    }

    std::set<size_t> pivots;
    for (WorkRow& row : work) {
        if (row.done) {
            ReducedRow out;
            out.pivot = row.pivot;
            out.rhs = row.rhs;
            for (const auto& [j, c] : row.coeffs) {
                if (j != row.pivot) out.coeffs.emplace(j, c);
            }
            pivots.insert(row.pivot);
            sys.rows.push_back(std::move(out));
        } else if (!row.rhs.is_zero()) {
            sys.inconsistent = true;  // row reduced to 0 = rhs with rhs != 0
        }
    }

    for (size_t j : sys.basis) {
        if (!pivots.contains(j)) sys.free_set.push_back(j);
    }
    return sys;
}

GroupElement basis_exp(const GroupParams& params, const std::map<size_t, Scalar>& exponents) {
    GroupElement acc = params.group->identity();
    for (const auto& [j, e] : exponents) {
        acc = params.group->op(acc, params.group->pow(params.generators[j], e));
    }
    return acc;
}

}  // namespace

ProofCommitmentState prove_begin(const GroupParams& params, const Statement& statement, Rng& rng) {
    check_statement(statement, params.n());
    RelationSystem sys = reduce_relations(params, statement);
    if (sys.inconsistent) throw CannotProveError("prove: relation set is inconsistent");

    ProofCommitmentState state;
    const BigNum& q = params.q();
    for (size_t j : sys.free_set) state.nonces_.emplace(j, random_scalar(rng, q));
    // pivot nonces solve sum alpha_j a_j = 0 so the verifier can recompute the
    // constrained responses from c*beta alone
    for (const ReducedRow& row : sys.rows) {
        Scalar a;
        for (const auto& [j, c] : row.coeffs) {
            a = sc_sub(a, sc_mul(c, state.nonces_.at(j), q), q);
        }
        state.nonces_.emplace(row.pivot, a);
    }
    state.big_a_ = basis_exp(params, state.nonces_);
    return state;
}

std::vector<Scalar> prove_respond(const GroupParams& params, ProofCommitmentState& state,
                                  const Statement& statement, const Scalar& challenge,
                                  std::span<const Scalar> secrets) {
    if (state.used_) throw SingleUseError("prove: nonce state already consumed");
    if (secrets.size() != params.n() + 1) throw ArityError("prove: secret count != n+1");
    check_statement(statement, params.n());
    const BigNum& q = params.q();

    // satisfiability gate on the prover's own attribute values
    for (const LinearRelation& rel : statement.relations) {
        Scalar sum;
        for (size_t j = 1; j <= params.n(); ++j) {
            sum = sc_add(sum, sc_mul(rel.coeffs[j - 1], secrets[j], q), q);
        }
        if (!(sum == rel.beta)) {
            throw CannotProveError("prove: secrets do not satisfy a relation");
        }
    }

    RelationSystem sys = reduce_relations(params, statement);
    if (sys.inconsistent) throw CannotProveError("prove: relation set is inconsistent");

    state.used_ = true;
    std::vector<Scalar> responses;
    responses.reserve(sys.free_set.size());
    for (size_t j : sys.free_set) {
        responses.push_back(sc_add(state.nonces_.at(j), sc_mul(challenge, secrets[j], q), q));
    }
    return responses;
}

VerifyResult verify_transcript(const GroupParams& params, const GroupElement& h,
                               const Statement& expected, const ProofTranscript& t) {
    if (!(t.statement == expected)) return {false, "statement does not match requirement"};
    try {
        check_statement(t.statement, params.n());
    } catch (const Error& e) {
        return {false, e.what()};
    }
    const BigNum& q = params.q();
    if (t.challenge.value() >= q) return {false, "challenge out of range"};
    if (!params.group->decode(t.big_a.enc).has_value()) return {false, "A is not a group element"};

    RelationSystem sys = reduce_relations(params, t.statement);
    if (sys.inconsistent) return {false, "relations are unsatisfiable"};
    if (t.responses.size() != sys.free_set.size()) return {false, "response count mismatch"};

    std::map<size_t, Scalar> b;
    for (size_t i = 0; i < sys.free_set.size(); ++i) {
        if (t.responses[i].value() >= q) return {false, "response out of range"};
        b.emplace(sys.free_set[i], t.responses[i]);
    }
    // constrained responses: b_p = c*rhs - sum coeffs[f]*b_f
    for (auto it = sys.rows.rbegin(); it != sys.rows.rend(); ++it) {
        Scalar bp = sc_mul(t.challenge, it->rhs, q);
        for (const auto& [j, c] : it->coeffs) {
            bp = sc_sub(bp, sc_mul(c, b.at(j), q), q);
        }
        b.emplace(it->pivot, bp);
    }

    // fold revealed attributes out of h
    GroupElement h_eff = h;
    for (const auto& [j, value] : t.statement.disclosed) {
        GroupElement gx = params.group->pow(params.generators[j], value);
        h_eff = params.group->op(h_eff, params.group->inv(gx));
    }

    GroupElement lhs = basis_exp(params, b);
    GroupElement hc = params.group->pow(h_eff, t.challenge);
    lhs = params.group->op(lhs, params.group->inv(hc));
    if (!(lhs == t.big_a)) return {false, "verification equation failed"};
    return {true, ""};
}

VerifyResult verify_knowledge(const GroupParams& params, const GroupElement& h,
                              const ProofTranscript& t) {
    return verify_transcript(params, h, Statement{}, t);
}

VerifyResult verify_disclosure(const GroupParams& params, const GroupElement& h,
                               const std::map<size_t, Scalar>& disclosed,
                               const ProofTranscript& t) {
    Statement expected;
    expected.disclosed = disclosed;
    return verify_transcript(params, h, expected, t);
}

VerifyResult verify_linear(const GroupParams& params, const GroupElement& h,
                           const std::vector<LinearRelation>& relations,
                           const ProofTranscript& t) {
    Statement expected;
    expected.relations = relations;
    return verify_transcript(params, h, expected, t);
}

Bytes ProofTranscript::serialize(const GroupParams& params) const {
    const size_t width = params.scalar_width();
    Bytes out;
    out.push_back(0x54);
    out.insert(out.end(), big_a.enc.begin(), big_a.enc.end());
    Bytes c = challenge.encode(width);
    out.insert(out.end(), c.begin(), c.end());
    put_be16(out, static_cast<uint16_t>(responses.size()));
    for (const Scalar& b : responses) {
        Bytes enc = b.encode(width);
        out.insert(out.end(), enc.begin(), enc.end());
    }
    Bytes st = statement.serialize(width);
    out.insert(out.end(), st.begin(), st.end());
    return out;
}

std::optional<ProofTranscript> ProofTranscript::parse(ByteSpan data, const GroupParams& params) {
    const size_t width = params.scalar_width();
    const size_t ew = params.group->element_width();
    ByteReader r(data);
    auto tag = r.u8();
    if (!tag || *tag != 0x54) return std::nullopt;
    auto a_raw = r.take(ew);
    if (!a_raw) return std::nullopt;
    auto a = params.group->decode(*a_raw);
    if (!a) return std::nullopt;
    auto c_raw = r.take(width);
    if (!c_raw) return std::nullopt;
    auto c = Scalar::decode(*c_raw, params.q(), width);
    if (!c) return std::nullopt;
    auto count = r.be16();
    if (!count) return std::nullopt;
    ProofTranscript t;
    t.big_a = *a;
    t.challenge = *c;
    for (uint16_t i = 0; i < *count; ++i) {
        auto b_raw = r.take(width);
        if (!b_raw) return std::nullopt;
        auto b = Scalar::decode(*b_raw, params.q(), width);
        if (!b) return std::nullopt;
        t.responses.push_back(*b);
    }
    auto rest = r.take(r.remaining());
    if (!rest) return std::nullopt;
    auto st = Statement::parse(*rest, params.q(), width);
    if (!st) return std::nullopt;
    t.statement = std::move(*st);
    return t;
}

Scalar transcript_challenge(const GroupParams& params, const GroupElement& h,
                            const GroupElement& big_a, ByteSpan session_id,
                            const Statement& statement) {
    Bytes material;
    material.insert(material.end(), h.enc.begin(), h.enc.end());
    material.insert(material.end(), big_a.enc.begin(), big_a.enc.end());
    material.insert(material.end(), session_id.begin(), session_id.end());
    Bytes st = statement.serialize(params.scalar_width());
    material.insert(material.end(), st.begin(), st.end());
    return hash_to_scalar(material, params.q());
}

ProofTranscript prove_transcript_mode(const GroupParams& params, const GroupElement& h,
                                      const Statement& statement, std::span<const Scalar> secrets,
                                      ByteSpan session_id, Rng& rng) {
    ProofCommitmentState state = prove_begin(params, statement, rng);
    Scalar c = transcript_challenge(params, h, state.commitment(), session_id, statement);
    ProofTranscript t;
    t.big_a = state.commitment();
    t.challenge = c;
    t.responses = prove_respond(params, state, statement, c, secrets);
    t.statement = statement;
    return t;
}

VerifyResult verify_transcript_mode(const GroupParams& params, const GroupElement& h,
                                    ByteSpan session_id, const ProofTranscript& t) {
    Scalar expected = transcript_challenge(params, h, t.big_a, session_id, t.statement);
    if (!(expected == t.challenge)) return {false, "challenge does not rebind to transcript"};
    return verify_transcript(params, h, t.statement, t);
}

ProofTranscript simulate_transcript(const GroupParams& params, const GroupElement& h,
                                    const Scalar& challenge, Rng& rng) {
    const BigNum& q = params.q();
    ProofTranscript t;
    t.challenge = challenge;
    std::vector<Scalar> b;
    b.reserve(params.n() + 1);
    for (size_t j = 0; j <= params.n(); ++j) b.push_back(random_scalar(rng, q));
    t.responses = b;
    GroupElement gb = multi_exp(params, b);
    GroupElement hc = params.group->pow(h, challenge);
    t.big_a = params.group->op(gb, params.group->inv(hc));
    return t;
}

std::vector<Scalar> extract_witness(const GroupParams& params, const ProofTranscript& t1,
                                    const ProofTranscript& t2) {
    if (!(t1.big_a == t2.big_a)) throw Error("extract: transcripts use different A");
    if (t1.challenge == t2.challenge) {
        throw std::domain_error("extract: challenges are equal");
    }
    if (t1.responses.size() != params.n() + 1 || t2.responses.size() != params.n() + 1) {
        throw ArityError("extract: knowledge transcripts required");
    }
    const BigNum& q = params.q();
    Scalar dc_inv = sc_inv(sc_sub(t1.challenge, t2.challenge, q), q);
    std::vector<Scalar> secrets;
    secrets.reserve(params.n() + 1);
    for (size_t j = 0; j <= params.n(); ++j) {
        secrets.push_back(sc_mul(sc_sub(t1.responses[j], t2.responses[j], q), dc_inv, q));
    }
    return secrets;
}

std::optional<std::vector<Scalar>> blinding_reuse_attack(
    const GroupParams& params, const GroupElement& h, const GroupElement& h_prime,
    std::span<const std::vector<Scalar>> candidate_deltas) {
    GroupElement target = params.group->op(h, params.group->inv(h_prime));
    for (const std::vector<Scalar>& delta : candidate_deltas) {
        if (delta.size() != params.n()) throw ArityError("attack: delta count != n");
        GroupElement acc = params.group->identity();
        for (size_t j = 1; j <= params.n(); ++j) {
            acc = params.group->op(acc, params.group->pow(params.generators[j], delta[j - 1]));
        }
        if (acc == target) return delta;
    }
    return std::nullopt;
}

}  // namespace anchorid
