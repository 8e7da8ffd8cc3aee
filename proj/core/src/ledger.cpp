#include "anchorid/ledger.hpp"

#include "anchorid/sha256.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace anchorid {

namespace {

constexpr uint32_t kTxVersion = 2;
constexpr size_t kSigScriptSlot = 107;  // push(72-byte DER sig) + push(33-byte pubkey) analogue
constexpr uint32_t kSequenceFinal = 0xffffffff;

void put_varint(Bytes& out, uint64_t v) {
    if (v < 0xfd) {
        out.push_back(static_cast<uint8_t>(v));
    } else if (v <= 0xffff) {
        out.push_back(0xfd);
        out.push_back(static_cast<uint8_t>(v));
        out.push_back(static_cast<uint8_t>(v >> 8));
    } else {
        out.push_back(0xfe);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
}

std::optional<uint64_t> read_varint(ByteReader& r) {
    auto first = r.u8();
    if (!first) return std::nullopt;
    if (*first < 0xfd) return *first;
    if (*first == 0xfd) {
        auto lo = r.u8();
        auto hi = r.u8();
        if (!lo || !hi) return std::nullopt;
        return static_cast<uint64_t>(*lo) | (static_cast<uint64_t>(*hi) << 8);
    }
    if (*first == 0xfe) return r.le32();
    return r.le64();
}

}  // namespace

Bytes address_of(ByteSpan pubkey) {
    Hash256 h = sha256(pubkey);
    return Bytes(h.begin(), h.begin() + 20);
}

Bytes encode_raw_tx_internal(const SimTransaction& tx, bool blank_scripts) {
    Bytes out;
    put_le32(out, kTxVersion);
    put_varint(out, tx.inputs.size());
    for (const TxInput& in : tx.inputs) {
        out.insert(out.end(), in.prev.txid.begin(), in.prev.txid.end());
        put_le32(out, in.prev.vout);
        if (blank_scripts) {
            put_varint(out, 0);
        } else {
            // fixed-size slot: signature || pubkey || zero padding
            put_varint(out, kSigScriptSlot);
            Bytes script(kSigScriptSlot, 0x00);
            std::copy(in.signature.begin(), in.signature.end(), script.begin());
            std::copy(in.pubkey.begin(), in.pubkey.end(), script.begin() + 64);
            out.insert(out.end(), script.begin(), script.end());
        }
        put_le32(out, kSequenceFinal);
    }
    put_varint(out, tx.outputs.size());
    for (const TxOutput& o : tx.outputs) {
        put_le64(out, static_cast<uint64_t>(o.amount));
        if (o.kind == OutputKind::pay_to_address) {
            // OP_DUP OP_HASH160 push20 <addr> OP_EQUALVERIFY OP_CHECKSIG
            put_varint(out, 25);
            out.push_back(0x76);
            out.push_back(0xa9);
            out.push_back(0x14);
            out.insert(out.end(), o.address.begin(), o.address.end());
            out.push_back(0x88);
            out.push_back(0xac);
        } else {
            // OP_RETURN push<len> <payload>
            put_varint(out, o.payload.size() + 2);
            out.push_back(0x6a);
            out.push_back(static_cast<uint8_t>(o.payload.size()));
            out.insert(out.end(), o.payload.begin(), o.payload.end());
        }
    }
    put_le32(out, 0);  // locktime
    return out;
}

Bytes encode_raw_tx(const SimTransaction& tx) {
    return encode_raw_tx_internal(tx, false);
}

std::optional<SimTransaction> decode_raw_tx(ByteSpan raw) {
    ByteReader r(raw);
    auto version = r.le32();
    if (!version || *version != kTxVersion) return std::nullopt;
    auto n_in = read_varint(r);
    if (!n_in) return std::nullopt;
    SimTransaction tx;
    for (uint64_t i = 0; i < *n_in; ++i) {
        TxInput in;
        auto txid = r.take(32);
        auto vout = txid ? r.le32() : std::nullopt;
        if (!txid || !vout) return std::nullopt;
        std::copy(txid->begin(), txid->end(), in.prev.txid.begin());
        in.prev.vout = *vout;
        auto script_len = read_varint(r);
        if (!script_len) return std::nullopt;
        auto script = r.take(*script_len);
        if (!script) return std::nullopt;
        if (*script_len == kSigScriptSlot) {
            in.signature.assign(script->begin(), script->begin() + 64);
            in.pubkey.assign(script->begin() + 64, script->begin() + 96);
        } else if (*script_len != 0) {
            return std::nullopt;
        }
        if (!r.le32()) return std::nullopt;  // sequence
        tx.inputs.push_back(std::move(in));
    }
    auto n_out = read_varint(r);
    if (!n_out) return std::nullopt;
    for (uint64_t i = 0; i < *n_out; ++i) {
        TxOutput o;
        auto amount = r.le64();
        auto script_len = amount ? read_varint(r) : std::nullopt;
        if (!amount || !script_len) return std::nullopt;
        auto script = r.take(*script_len);
        if (!script) return std::nullopt;
        o.amount = static_cast<int64_t>(*amount);
        if (*script_len == 25 && (*script)[0] == 0x76) {
            o.kind = OutputKind::pay_to_address;
            o.address.assign(script->begin() + 3, script->begin() + 23);
        } else if (*script_len >= 2 && (*script)[0] == 0x6a) {
            o.kind = OutputKind::data;
            size_t len = (*script)[1];
            if (len + 2 != *script_len) return std::nullopt;
            o.payload.assign(script->begin() + 2, script->end());
        } else {
            return std::nullopt;
        }
        tx.outputs.push_back(std::move(o));
    }
    if (!r.le32() || !r.empty()) return std::nullopt;
    return tx;
}

Hash256 txid_of(const SimTransaction& tx) {
    return double_sha256(encode_raw_tx(tx));
}

Hash256 sighash_of(const SimTransaction& tx) {
    return double_sha256(encode_raw_tx_internal(tx, true));
}

void sign_inputs(SimTransaction& tx, const SignKeypair& key) {
    Hash256 preimage = sighash_of(tx);
    Bytes sig = ed25519_sign(key, preimage);
    for (TxInput& in : tx.inputs) {
        in.pubkey = key.pk;
        in.signature = sig;
    }
}

SimTransaction build_enroll_tx(const Outpoint& prev, int64_t prev_amount, const SignKeypair& key,
                               const Hash256& r, const Hash256& cm, int64_t fee_sat,
                               int64_t dust_sat) {
    int64_t change = prev_amount - fee_sat;
    if (change < dust_sat) throw Error("enroll tx: change would fall under the dust threshold");

    SimTransaction tx;
    TxInput in;
    in.prev = prev;
    tx.inputs.push_back(in);

    TxOutput anchor;
    anchor.kind = OutputKind::pay_to_address;
    anchor.address = address_of(key.pk);
    anchor.amount = change;
    tx.outputs.push_back(std::move(anchor));

    TxOutput data;
    data.kind = OutputKind::data;
    data.amount = 0;
    data.payload.insert(data.payload.end(), r.begin(), r.end());
    data.payload.insert(data.payload.end(), cm.begin(), cm.end());
    if (data.payload.size() != kAnchorPayload) throw Error("enroll tx: payload must be 64 bytes");
    tx.outputs.push_back(std::move(data));

    sign_inputs(tx, key);
    return tx;
}

// ---------------------------------------------------------------------------
// Ledger

Hash256 Ledger::fund(const Bytes& address, int64_t amount) {
    if (amount <= 0) throw Error("fund: amount must be positive");
    SimTransaction tx;
    TxOutput o;
    o.kind = OutputKind::pay_to_address;
    o.address = address;
    o.amount = amount;
    tx.outputs.push_back(std::move(o));
    Hash256 txid = txid_of(tx);
    funded_total_ += amount;
    accept(tx, txid);
    return txid;
}

SubmitResult Ledger::validate(const SimTransaction& tx, bool allow_fork) const {
    SubmitResult res;
    if (tx.inputs.empty()) {
        res.reason = "no inputs";
        return res;
    }
    size_t data_outputs = 0;
    int64_t out_total = 0;
    for (const TxOutput& o : tx.outputs) {
        if (o.kind == OutputKind::data) {
            ++data_outputs;
            if (o.amount != 0) {
                res.reason = "data output must carry zero amount";
                return res;
            }
            if (o.payload.size() > kMaxDataPayload) {
                res.reason = "data payload over 80 bytes";
                return res;
            }
        } else {
            if (o.address.size() != 20) {
                res.reason = "address must be 20 bytes";
                return res;
            }
            if (o.amount < cfg_.dust) {
                res.reason = "output below dust threshold";
                return res;
            }
        }
        out_total += o.amount;
    }
    (void)data_outputs;

    std::set<Outpoint> seen;
    int64_t in_total = 0;
    bool spends_spent = false;
    std::string conflict;
    Hash256 sighash = sighash_of(tx);
    for (const TxInput& in : tx.inputs) {
        if (!seen.insert(in.prev).second) {
            res.reason = "duplicate outpoint within transaction";
            return res;
        }
        auto it = utxo_.find(in.prev);
        if (it == utxo_.end()) {
            // distinguish an already-spent output from an unknown one
            if (spender_.contains(in.prev)) {
                spends_spent = true;
                conflict = hex_encode(in.prev.txid) + ":" + std::to_string(in.prev.vout);
                auto orig = tx_index_.find(in.prev.txid);
                if (orig == tx_index_.end() || in.prev.vout >= orig->second.outputs.size()) {
                    res.reason = "conflicting outpoint unavailable";
                    return res;
                }
                const TxOutput& spent = orig->second.outputs[in.prev.vout];
                if (address_of(in.pubkey) != spent.address ||
                    !ed25519_verify(in.pubkey, sighash, in.signature)) {
                    res.reason = "spend authorization invalid";
                    return res;
                }
                in_total += spent.amount;
                continue;
            }
            res.reason = "unknown outpoint " + hex_encode(in.prev.txid) + ":" +
                         std::to_string(in.prev.vout);
            return res;
        }
        if (it->second.kind == OutputKind::data) {
            res.reason = "data outputs are unspendable";
            return res;
        }
        if (address_of(in.pubkey) != it->second.address ||
            !ed25519_verify(in.pubkey, sighash, in.signature)) {
            res.reason = "spend authorization invalid";
            return res;
        }
        in_total += it->second.amount;
    }
    if (spends_spent) {
        if (!allow_fork) {
            res.reason = "double spend of " + conflict;
            return res;
        }
        res.forked = true;
    }
    if (in_total < out_total) {
        res.reason = "outputs exceed inputs (negative fee)";
        return res;
    }
    res.accepted = true;
    res.txid = txid_of(tx);
    return res;
}

SubmitResult Ledger::submit(const SimTransaction& tx) {
    SubmitResult res = validate(tx, fork_mode_);
    if (!res.accepted) return res;
    if (res.forked) {
        fork_txs_.emplace_back(res.txid, tx);
        for (const TxInput& in : tx.inputs) {
            if (spender_.contains(in.prev)) fork_spender_[in.prev] = res.txid;
        }
        tx_index_[res.txid] = tx;
        return res;
    }
    int64_t in_total = 0;
    for (const TxInput& in : tx.inputs) in_total += utxo_.at(in.prev).amount;
    int64_t out_total = 0;
    for (const TxOutput& o : tx.outputs) out_total += o.amount;
    fees_total_ += in_total - out_total;
    accept(tx, res.txid);
    return res;
}

void Ledger::accept(const SimTransaction& tx, const Hash256& txid) {
    for (const TxInput& in : tx.inputs) {
        utxo_.erase(in.prev);
        spender_[in.prev] = txid;
    }
    for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
        if (tx.outputs[i].kind == OutputKind::pay_to_address) {
            utxo_[Outpoint{txid, i}] = tx.outputs[i];
        }
    }
    tx_index_[txid] = tx;
    pending_.push_back(tx);
    pending_txids_.push_back(txid);
}

void Ledger::seal_block() {
    Block b;
    b.txs = std::move(pending_);
    b.txids = std::move(pending_txids_);
    pending_.clear();
    pending_txids_.clear();
    blocks_.push_back(std::move(b));
}

std::optional<TxOutput> Ledger::utxo(const Outpoint& op) const {
    auto it = utxo_.find(op);
    if (it == utxo_.end()) return std::nullopt;
    return it->second;
}

std::optional<SimTransaction> Ledger::transaction(const Hash256& txid) const {
    auto it = tx_index_.find(txid);
    if (it == tx_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<uint32_t> Ledger::confirmations(const Hash256& txid) const {
    for (size_t h = 0; h < blocks_.size(); ++h) {
        for (const Hash256& id : blocks_[h].txids) {
            if (id == txid) return static_cast<uint32_t>(blocks_.size() - h);
        }
    }
    for (const Hash256& id : pending_txids_) {
        if (id == txid) return 0;
    }
    return std::nullopt;
}

bool Ledger::is_enroll_shape(const SimTransaction& tx) const {
    return tx.outputs.size() == 2 && tx.outputs[0].kind == OutputKind::pay_to_address &&
           tx.outputs[1].kind == OutputKind::data &&
           tx.outputs[1].payload.size() == kAnchorPayload;
}

FollowResult Ledger::follow_chain(const Hash256& enroll_txid) const {
    FollowResult res;
    auto it = tx_index_.find(enroll_txid);
    if (it == tx_index_.end()) {
        res.status = FollowResult::Status::unknown_txid;
        res.detail = "txid not found";
        return res;
    }
    if (!is_enroll_shape(it->second)) {
        res.status = FollowResult::Status::not_enroll;
        res.detail = "transaction is not an anchoring transaction";
        return res;
    }

    // count backward to the genesis anchor to learn the absolute epoch
    uint64_t epoch = 1;
    const SimTransaction* cur = &it->second;
    while (!cur->inputs.empty()) {
        auto prev = tx_index_.find(cur->inputs[0].prev.txid);
        if (prev == tx_index_.end() || !is_enroll_shape(prev->second)) break;
        ++epoch;
        cur = &prev->second;
    }

    // walk spend edges forward to the unspent head
    Hash256 cur_id = enroll_txid;
    const SimTransaction* cur_tx = &it->second;
    bool fork_seen = false;
    for (;;) {
        Outpoint anchor{cur_id, 0};
        if (fork_spender_.contains(anchor)) fork_seen = true;
        auto spender = spender_.find(anchor);
        if (spender == spender_.end()) break;  // unspent: this is the head
        auto next = tx_index_.find(spender->second);
        if (next == tx_index_.end()) {
            res.status = FollowResult::Status::broken_chain;
            res.detail = "spender transaction missing";
            return res;
        }
        if (!is_enroll_shape(next->second) ||
            next->second.outputs[0].address != cur_tx->outputs[0].address) {
            res.status = FollowResult::Status::broken_chain;
            res.detail = "anchor output spent by a non-anchoring transaction";
            return res;
        }
        cur_id = spender->second;
        cur_tx = &next->second;
        ++epoch;
    }

    if (fork_seen) {
        res.status = FollowResult::Status::fork;
        res.detail = "two competing spenders visible";
        return res;
    }

    const Bytes& payload = cur_tx->outputs[1].payload;
    res.status = FollowResult::Status::head;
    res.head.txid = cur_id;
    std::copy(payload.begin(), payload.begin() + 32, res.head.r.begin());
    std::copy(payload.begin() + 32, payload.end(), res.head.cm.begin());
    res.head.t = epoch;
    return res;
}

CmCheck Ledger::verify_cm_history(const Hash256& genesis_txid) const {
    CmCheck out;
    auto it = tx_index_.find(genesis_txid);
    if (it == tx_index_.end()) {
        out.detail = "genesis txid not found";
        return out;
    }
    if (!is_enroll_shape(it->second)) {
        out.detail = "genesis is not an anchoring transaction";
        return out;
    }
    if (!it->second.inputs.empty()) {
        auto prev = tx_index_.find(it->second.inputs[0].prev.txid);
        if (prev != tx_index_.end() && is_enroll_shape(prev->second)) {
            out.detail = "not the first anchoring transaction of the chain";
            return out;
        }
    }

    Hash256 cur_id = genesis_txid;
    const SimTransaction* cur_tx = &it->second;
    Hash256 expected_cm{};
    for (uint64_t epoch = 1;; ++epoch) {
        const Bytes& payload = cur_tx->outputs[1].payload;
        if (payload.size() != kAnchorPayload) {
            out.bad_epoch = epoch;
            out.detail = "malformed anchor payload";
            return out;
        }
        Hash256 r{}, published_cm{};
        std::copy(payload.begin(), payload.begin() + 32, r.begin());
        std::copy(payload.begin() + 32, payload.end(), published_cm.begin());
        expected_cm = epoch == 1 ? r : sha256_concat({ByteSpan(expected_cm), ByteSpan(r)});
        if (published_cm != expected_cm) {
            out.bad_epoch = epoch;
            out.detail = "cm does not bind the published history";
            return out;
        }
        auto spender = spender_.find(Outpoint{cur_id, 0});
        if (spender == spender_.end()) break;
        auto next = tx_index_.find(spender->second);
        if (next == tx_index_.end() || !is_enroll_shape(next->second)) {
            out.bad_epoch = epoch;
            out.detail = "chain broken after this epoch";
            return out;
        }
        cur_id = spender->second;
        cur_tx = &next->second;
    }
    out.ok = true;
    return out;
}

void Ledger::resolve_fork() {
    fork_txs_.clear();
    fork_spender_.clear();
}

Ledger Ledger::forge_copy(uint64_t block_height, size_t tx_index, const SimTransaction& tx) const {
    Ledger copy = *this;
    if (block_height >= copy.blocks_.size() ||
        tx_index >= copy.blocks_[block_height].txs.size()) {
        throw Error("forge_copy: no such transaction");
    }
    Hash256 original_id = copy.blocks_[block_height].txids[tx_index];
    copy.blocks_[block_height].txs[tx_index] = tx;
    copy.tx_index_[original_id] = tx;  // the forged history keeps the old txid label
    return copy;
}

int64_t Ledger::utxo_total() const {
    int64_t total = 0;
    for (const auto& [op, out] : utxo_) total += out.amount;
    return total;
}

void Ledger::save(std::ostream& out) const {
    out << "anchorid-ledger v1\n";
    for (size_t h = 0; h < blocks_.size(); ++h) {
        out << "block " << h << "\n";
        for (const SimTransaction& tx : blocks_[h].txs) {
            out << "tx " << hex_encode(encode_raw_tx(tx)) << "\n";
        }
    }
    if (!pending_.empty()) {
        out << "pending\n";
        for (const SimTransaction& tx : pending_) {
            out << "tx " << hex_encode(encode_raw_tx(tx)) << "\n";
        }
    }
}

std::optional<Ledger> Ledger::load(std::istream& in, LedgerConfig cfg) {
    std::string line;
    if (!std::getline(in, line) || line != "anchorid-ledger v1") return std::nullopt;
    Ledger ledger(cfg);
    bool in_pending = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "block") {
            if (in_pending) return std::nullopt;
            if (!ledger.pending_.empty() || ledger.blocks_.size() > 0 || true) {
                // first "block" line opens block 0; subsequent ones seal
            }
            uint64_t declared = 0;
            ls >> declared;
            if (declared != ledger.blocks_.size()) return std::nullopt;
            if (declared > 0 || !ledger.pending_.empty()) {
                // seal the block collected so far
            }
            if (declared > 0) ledger.seal_block();
        } else if (kind == "pending") {
            ledger.seal_block();
            in_pending = true;
        } else if (kind == "tx") {
            std::string hexv;
            ls >> hexv;
            auto raw = hex_decode(hexv);
            if (!raw) return std::nullopt;
            auto tx = decode_raw_tx(*raw);
            if (!tx) return std::nullopt;
            if (tx->inputs.empty()) {
                int64_t amount = 0;
                for (const TxOutput& o : tx->outputs) amount += o.amount;
                if (tx->outputs.size() != 1 || tx->outputs[0].kind != OutputKind::pay_to_address) {
                    return std::nullopt;
                }
                ledger.fund(tx->outputs[0].address, amount);
            } else {
                SubmitResult res = ledger.submit(*tx);
                if (!res.accepted) return std::nullopt;
            }
        } else {
            return std::nullopt;
        }
    }
    if (!in_pending && (!ledger.pending_.empty() || !ledger.blocks_.empty())) {
        ledger.seal_block();
    }
    return ledger;
}

}  // namespace anchorid
