#pragma once

#include "anchorid/ed25519.hpp"
#include "anchorid/group.hpp"

#include <iosfwd>
#include <map>

namespace anchorid {

struct Outpoint {
    Hash256 txid{};
    uint32_t vout = 0;
    auto operator<=>(const Outpoint&) const = default;
};

enum class OutputKind : uint8_t { pay_to_address = 0, data = 1 };

/// Data outputs carry zero satoshi and at most 80 payload bytes; standard
/// outputs pay at least the dust threshold to a 20-byte address.
struct TxOutput {
    OutputKind kind = OutputKind::pay_to_address;
    Bytes address;   // 20 bytes for pay_to_address
    Bytes payload;   // for data outputs
    int64_t amount = 0;
    bool operator==(const TxOutput&) const = default;
};

struct TxInput {
    Outpoint prev;
    Bytes pubkey;     // 32-byte ed25519 key whose hash is the spent address
    Bytes signature;  // 64 bytes over the sighash
    bool operator==(const TxInput&) const = default;
};

struct SimTransaction {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    bool operator==(const SimTransaction&) const = default;
};

/// 20-byte address: truncated SHA-256 of the public key (P2PKH stand-in).
Bytes address_of(ByteSpan pubkey);

constexpr size_t kMaxDataPayload = 80;
constexpr size_t kAnchorPayload = 64;  // r || cm

/// Bitcoin-compatible raw layout: LE version, varint counts, 36-byte outpoints,
/// a fixed 107-byte signature-script slot per input (signature || pubkey ||
/// padding), 25-byte P2PKH scripts, OP_RETURN push for data outputs, LE
/// locktime. Length is deterministic per shape; the canonical single-input
/// anchor transaction encodes to 267 bytes.
Bytes encode_raw_tx(const SimTransaction& tx);
std::optional<SimTransaction> decode_raw_tx(ByteSpan raw);

/// Double SHA-256 of the raw encoding.
Hash256 txid_of(const SimTransaction& tx);

/// Raw encoding with all signature-script slots blanked, then double hashed;
/// this is what spend authorizations sign.
Hash256 sighash_of(const SimTransaction& tx);

void sign_inputs(SimTransaction& tx, const SignKeypair& key);

/// One anchoring step: spends the previous anchor outpoint, pays the remainder
/// back to the issuer address, and publishes OP_RETURN(r || cm).
/// Throws Error when r/cm are not 32 bytes each or the change would fall under
/// the dust threshold.
SimTransaction build_enroll_tx(const Outpoint& prev, int64_t prev_amount, const SignKeypair& key,
                               const Hash256& r, const Hash256& cm, int64_t fee_sat,
                               int64_t dust_sat);

struct SubmitResult {
    bool accepted = false;
    Hash256 txid{};
    std::string reason;
    bool forked = false;  // accepted onto the fork branch, not the main chain
    explicit operator bool() const { return accepted; }
};

struct EnrollChainHead {
    Hash256 txid{};
    Hash256 r{};
    Hash256 cm{};
    uint64_t t = 0;  // chain length from genesis through the head
};

struct FollowResult {
    enum class Status { head, unknown_txid, not_enroll, broken_chain, fork };
    Status status = Status::unknown_txid;
    EnrollChainHead head;
    std::string detail;
    bool ok() const { return status == Status::head; }
};

struct CmCheck {
    bool ok = false;
    uint64_t bad_epoch = 0;  // 1-based epoch of the first mismatch
    std::string detail;
};

struct Block {
    std::vector<SimTransaction> txs;
    std::vector<Hash256> txids;
};

struct LedgerConfig {
    int64_t dust = 500;
    uint32_t confirm_depth = 1;
};

/// Append-only simulated chain: a UTXO set, logical one-block-per-tick sealing,
/// and a fork toggle that lets a second spender of an outpoint coexist so fork
/// handling is testable.
class Ledger {
public:
    explicit Ledger(LedgerConfig cfg = {}) : cfg_(cfg) {}

    const LedgerConfig& config() const { return cfg_; }

    /// Faucet: a zero-input transaction paying `amount` to `address`.
    Hash256 fund(const Bytes& address, int64_t amount);

    SubmitResult submit(const SimTransaction& tx);
    void seal_block();

    uint64_t height() const { return blocks_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<SimTransaction>& pending() const { return pending_; }
    std::optional<TxOutput> utxo(const Outpoint& op) const;
    std::optional<SimTransaction> transaction(const Hash256& txid) const;

    /// Confirmations of the block holding txid: pending = 0, tip block = 1.
    std::optional<uint32_t> confirmations(const Hash256& txid) const;

    FollowResult follow_chain(const Hash256& enroll_txid) const;
    CmCheck verify_cm_history(const Hash256& genesis_txid) const;

    void set_fork_mode(bool on) { fork_mode_ = on; }
    bool fork_mode() const { return fork_mode_; }
    /// Two competing unspent heads are visible.
    bool fork_visible() const { return !fork_txs_.empty(); }
    /// Drop the orphaned branch; the main chain wins.
    void resolve_fork();

    /// Tampered copy for audit tests: replaces a sealed transaction's bytes
    /// while keeping its original txid label, the way an equivocating history
    /// would be presented.
    Ledger forge_copy(uint64_t block_height, size_t tx_index, const SimTransaction& tx) const;

    // conservation bookkeeping
    int64_t funded_total() const { return funded_total_; }
    int64_t fees_total() const { return fees_total_; }
    int64_t utxo_total() const;

    void save(std::ostream& out) const;
    static std::optional<Ledger> load(std::istream& in, LedgerConfig cfg = {});

private:
    SubmitResult validate(const SimTransaction& tx, bool allow_fork) const;
    void accept(const SimTransaction& tx, const Hash256& txid);
    bool is_enroll_shape(const SimTransaction& tx) const;

    LedgerConfig cfg_;
    std::vector<Block> blocks_;
    std::vector<SimTransaction> pending_;
    std::vector<Hash256> pending_txids_;
    std::map<Outpoint, TxOutput> utxo_;
    std::map<Outpoint, Hash256> spender_;  // who spent which outpoint (main chain)
    std::map<Hash256, SimTransaction> tx_index_;
    bool fork_mode_ = false;
    std::vector<std::pair<Hash256, SimTransaction>> fork_txs_;
    std::map<Outpoint, Hash256> fork_spender_;
    int64_t funded_total_ = 0;
    int64_t fees_total_ = 0;
};

}  // namespace anchorid
