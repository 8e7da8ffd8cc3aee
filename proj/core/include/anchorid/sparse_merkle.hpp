#pragma once

#include "anchorid/group.hpp"

#include <iosfwd>
#include <map>

namespace anchorid {

/// Fixed 256-bit position in the virtual tree; bit i picks the branch at depth
/// i (0 = left). An account keeps its index for life.
struct TreeIndex {
    Hash256 bits{};

    static TreeIndex from_account(ByteSpan account_number);
    static std::optional<TreeIndex> from_hex(std::string_view hex);

    int bit(size_t depth) const { return (bits[depth / 8] >> (7 - depth % 8)) & 1; }
    std::string hex() const;

    auto operator<=>(const TreeIndex&) const = default;
};

/// Leaf = SHA-256(0x00 || encode(h) || be32(len(metadata)) || metadata).
/// A revoked identity keeps its slot with an empty h encoding (tombstone);
/// that differs from a never-occupied leaf, which is the all-zero default.
/// Throws Error for metadata over 1024 bytes.
Hash256 leaf_hash(const std::optional<GroupElement>& h, ByteSpan metadata);

inline constexpr size_t kTreeDepth = 256;
inline constexpr size_t kMaxMetadata = 1024;

/// D[256] = 32 zero bytes, D[d] = SHA-256(0x01 || D[d+1] || D[d+1]). Index d is
/// the hash of an empty subtree whose root sits at depth d.
const std::array<Hash256, kTreeDepth + 1>& default_hashes();

/// Authentication path compressed to its non-default siblings. `depth` is the
/// sibling's depth (1..256), entries strictly ascending.
struct MerkleBranch {
    struct Sibling {
        uint16_t depth;
        Hash256 hash;
        bool operator==(const Sibling&) const = default;
    };
    std::vector<Sibling> siblings;
    bool operator==(const MerkleBranch&) const = default;
};

/// Fold from the leaf to the root along iota, filling omitted depths with the
/// default hash. Rejects non-ascending or out-of-range sibling depths.
bool verify_branch(const Hash256& root, const TreeIndex& iota, const Hash256& leaf,
                   const MerkleBranch& branch);

/// 2^256-leaf virtual tree storing only non-default nodes. Writing the default
/// leaf value clears a slot back to never-occupied.
class SparseTree {
public:
    const Hash256& root() const;
    void upsert(const TreeIndex& iota, const Hash256& leaf);
    Hash256 leaf(const TreeIndex& iota) const;
    MerkleBranch branch(const TreeIndex& iota) const;
    const std::map<TreeIndex, Hash256>& leaves() const { return leaves_; }

private:
    struct NodeKey {
        uint16_t depth;
        Hash256 prefix;  // bits beyond `depth` zeroed
        auto operator<=>(const NodeKey&) const = default;
    };
    static NodeKey key_at(const TreeIndex& iota, size_t depth);
    Hash256 node_at(const NodeKey& k) const;
    void set_node(const NodeKey& k, const Hash256& value);

    std::map<NodeKey, Hash256> nodes_;
    std::map<TreeIndex, Hash256> leaves_;
};

/// Running commitment over published roots: cm_1 = r_1, cm_t = H(cm_{t-1}, r_t).
struct CommitmentChain {
    Hash256 cm{};
    uint64_t t = 0;
    bool operator==(const CommitmentChain&) const = default;
};

CommitmentChain advance_cm(const CommitmentChain& chain, const Hash256& root);

/// Snapshot file: header, epoch/root/cm lines, then one occupied leaf per line.
void save_tree_snapshot(std::ostream& out, const SparseTree& tree, const CommitmentChain& chain);
struct TreeSnapshot {
    SparseTree tree;
    CommitmentChain chain;
};
std::optional<TreeSnapshot> load_tree_snapshot(std::istream& in);

}  // namespace anchorid
