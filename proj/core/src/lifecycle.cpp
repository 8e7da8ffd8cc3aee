#include "anchorid/lifecycle.hpp"

#include "anchorid/sha256.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace anchorid {

namespace {
constexpr size_t kChainEncodingWidth = 32;
const char* const kWellformedContext = "anchorid/enroll-wellformed";
}  // namespace

Scalar chain_value(const Scalar& x01, uint64_t k, const BigNum& q) {
    Scalar v = x01;
    for (uint64_t i = 0; i < k; ++i) {
        Hash256 digest = sha256(v.encode(kChainEncodingWidth));
        v = Scalar::from_bytes_mod(digest, q);
    }
    return v;
}

Scalar user_recompute_x0(const UserSecret& secret, uint64_t k, const BigNum& q) {
    return sc_add(secret.x00, chain_value(secret.x01, k, q), q);
}

GroupParams wellformedness_basis(const GroupParams& params) {
    GroupParams basis;
    basis.group = params.group;
    basis.generators = {params.generators[0]};
    return basis;
}

UserInit user_init(const GroupParams& params, Rng& rng) {
    UserInit init;
    init.x00 = random_scalar(rng, params.q());
    GroupParams basis = wellformedness_basis(params);
    init.h00 = basis.group->pow(basis.generators[0], init.x00);
    std::vector<Scalar> witness = {init.x00};
    init.wellformed = prove_transcript_mode(basis, init.h00, Statement{}, witness,
                                            to_bytes(kWellformedContext), rng);
    return init;
}

bool verify_wellformedness(const GroupParams& params, const GroupElement& h00,
                           const ProofTranscript& t) {
    GroupParams basis = wellformedness_basis(params);
    return verify_transcript_mode(basis, h00, to_bytes(kWellformedContext), t).ok;
}

EnrollResult issuer_enroll(const GroupParams& params, ByteSpan account, const GroupElement& h00,
                           const ProofTranscript& wellformed, std::span<const Scalar> attributes,
                           ByteSpan metadata, Rng& rng) {
    if (attributes.size() != params.n()) throw ArityError("enroll: attribute count != n");
    if (metadata.size() > kMaxMetadata) throw Error("enroll: metadata over 1024 bytes");
    if (!verify_wellformedness(params, h00, wellformed)) {
        throw LifecycleError("enroll: h00 well-formedness proof rejected");
    }
    const BigNum& q = params.q();

    EnrollResult out;
    out.x01 = random_scalar(rng, q);

    const Group& g = *params.group;
    GroupElement g0_x0 = g.op(h00, g.pow(params.generators[0], out.x01));  // g_0^{X_00 + X_01}
    GroupElement h = g0_x0;
    for (size_t j = 1; j <= params.n(); ++j) {
        h = g.op(h, g.pow(params.generators[j], attributes[j - 1]));
    }
    out.h = h;

    IssuerRecord& rec = out.record;
    rec.account.assign(account.begin(), account.end());
    rec.h_current = h;
    rec.h00 = h00;
    rec.g0_x0 = g0_x0;
    rec.next_chain = chain_value(out.x01, 1, q);  // ready for the first update
    rec.k = 0;
    for (size_t j = 1; j <= params.n(); ++j) rec.attributes.emplace(j, attributes[j - 1]);
    rec.metadata.assign(metadata.begin(), metadata.end());
    return out;
}

GroupElement issuer_update(const GroupParams& params, IssuerRecord& record,
                           const std::map<size_t, Scalar>& changed_attributes, uint64_t k_target) {
    if (record.revoked) throw LifecycleError("update: record is revoked");
    if (k_target == record.k) {
        throw LifecycleError("update: refusing to republish with the same X_0");
    }
    if (k_target != record.k + 1) {
        throw LifecycleError("update: k must advance by exactly one");
    }
    const Group& g = *params.group;
    const BigNum& q = params.q();

    // g_0^{X_0^(k)} = h_00 * g_0^{H^k(X_01)}
    GroupElement g0_x0_new = g.op(record.h00, g.pow(params.generators[0], record.next_chain));
    GroupElement h = g.op(record.h_current, g.op(g0_x0_new, g.inv(record.g0_x0)));
    for (const auto& [j, value] : changed_attributes) {
        if (j == 0 || j > params.n()) throw ArityError("update: attribute index out of range");
        auto old = record.attributes.find(j);
        if (old == record.attributes.end()) {
            throw LifecycleError("update: no retained value for changed attribute");
        }
        Scalar delta = sc_sub(value, old->second, q);
        h = g.op(h, g.pow(params.generators[j], delta));
        old->second = value;
    }

    record.h_current = h;
    record.g0_x0 = g0_x0_new;
    // advance the single stored chain value: H^{k+2}(X_01) for the update after this one
    Hash256 digest = sha256(record.next_chain.encode(kChainEncodingWidth));
    record.next_chain = Scalar::from_bytes_mod(digest, q);
    record.k = k_target;
    return h;
}

RevokeResult revoke(IssuerRecord& record) {
    RevokeResult out;
    out.tombstone = leaf_hash(std::nullopt, {});
    out.changed = !record.revoked;
    record.revoked = true;
    return out;
}

ReissueResult reissue_secret(const GroupParams& params, IssuerRecord& record,
                             const UserInit& fresh, bool reauthenticated, Rng& rng) {
    if (record.revoked) throw LifecycleError("reissue: record is revoked");
    if (!reauthenticated) throw LifecycleError("reissue: user must re-prove identity in person");
    if (!verify_wellformedness(params, fresh.h00, fresh.wellformed)) {
        throw LifecycleError("reissue: h00 well-formedness proof rejected");
    }
    const Group& g = *params.group;
    const BigNum& q = params.q();

    ReissueResult out;
    out.x01 = random_scalar(rng, q);
    GroupElement g0_x0_new = g.op(fresh.h00, g.pow(params.generators[0], out.x01));
    // swap the blinding through the update path; attributes stay in place
    out.h = g.op(record.h_current, g.op(g0_x0_new, g.inv(record.g0_x0)));

    record.h_current = out.h;
    record.h00 = fresh.h00;
    record.g0_x0 = g0_x0_new;
    record.next_chain = chain_value(out.x01, 1, q);
    record.k = 0;
    return out;
}

// ---------------------------------------------------------------------------
// credential / keystore files

void save_credential(std::ostream& out, const IdentityCredential& cred) {
    out << "anchorid-credential v1\n";
    out << "txid " << hex_encode(cred.txid) << "\n";
    out << "iota " << cred.iota.hex() << "\n";
    out << "h " << hex_encode(cred.h.enc) << "\n";
    out << "metadata " << hex_encode(cred.metadata) << "\n";
    out << "k " << cred.secret.k << "\n";
    out << "branch";
    for (const auto& s : cred.branch.siblings) {
        out << " " << s.depth << ":" << hex_encode(s.hash);
    }
    out << "\n";
}

std::optional<IdentityCredential> load_credential(std::istream& in, const GroupParams& params) {
    std::string line;
    if (!std::getline(in, line) || line != "anchorid-credential v1") return std::nullopt;
    IdentityCredential cred;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "txid") {
            std::string hexv;
            ls >> hexv;
            auto raw = hex_decode(hexv);
            if (!raw) return std::nullopt;
            auto h = to_hash256(*raw);
            if (!h) return std::nullopt;
            cred.txid = *h;
        } else if (kind == "iota") {
            std::string hexv;
            ls >> hexv;
            auto iota = TreeIndex::from_hex(hexv);
            if (!iota) return std::nullopt;
            cred.iota = *iota;
        } else if (kind == "h") {
            std::string hexv;
            ls >> hexv;
            auto raw = hex_decode(hexv);
            if (!raw) return std::nullopt;
            auto elem = params.group->decode(*raw);
            if (!elem) return std::nullopt;
            cred.h = *elem;
        } else if (kind == "metadata") {
            std::string hexv;
            ls >> hexv;
            auto raw = hex_decode(hexv);
            if (!raw && !hexv.empty()) return std::nullopt;
            if (raw) cred.metadata = *raw;
        } else if (kind == "k") {
            ls >> cred.secret.k;
        } else if (kind == "branch") {
            std::string entry;
            while (ls >> entry) {
                auto colon = entry.find(':');
                if (colon == std::string::npos) return std::nullopt;
                uint16_t depth = static_cast<uint16_t>(std::stoul(entry.substr(0, colon)));
                auto raw = hex_decode(entry.substr(colon + 1));
                if (!raw) return std::nullopt;
                auto h = to_hash256(*raw);
                if (!h) return std::nullopt;
                cred.branch.siblings.push_back({depth, *h});
            }
        } else {
            return std::nullopt;
        }
    }
    return cred;
}

void save_keystore(std::ostream& out, const UserSecret& secret, const GroupParams& params) {
    const size_t w = params.scalar_width();
    out << "anchorid-keystore v1\n";
    out << "x00 " << hex_encode(secret.x00.encode(w)) << "\n";
    out << "x01 " << hex_encode(secret.x01.encode(w)) << "\n";
    out << "k " << secret.k << "\n";
    out << "attributes";
    for (const Scalar& a : secret.attributes) out << " " << hex_encode(a.encode(w));
    out << "\n";
}

std::optional<UserSecret> load_keystore(std::istream& in, const GroupParams& params) {
    std::string line;
    if (!std::getline(in, line) || line != "anchorid-keystore v1") return std::nullopt;
    const size_t w = params.scalar_width();
    UserSecret secret;
    auto read_scalar = [&](const std::string& hexv) -> std::optional<Scalar> {
        auto raw = hex_decode(hexv);
        if (!raw) return std::nullopt;
        return Scalar::decode(*raw, params.q(), w);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "x00" || kind == "x01") {
            std::string hexv;
            ls >> hexv;
            auto s = read_scalar(hexv);
            if (!s) return std::nullopt;
            (kind == "x00" ? secret.x00 : secret.x01) = *s;
        } else if (kind == "k") {
            ls >> secret.k;
        } else if (kind == "attributes") {
            std::string hexv;
            while (ls >> hexv) {
                auto s = read_scalar(hexv);
                if (!s) return std::nullopt;
                secret.attributes.push_back(*s);
            }
        } else {
            return std::nullopt;
        }
    }
    return secret;
}

}  // namespace anchorid
