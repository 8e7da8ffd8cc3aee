#include "anchorid/sparse_merkle.hpp"

#include "anchorid/sha256.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace anchorid {

namespace {

constexpr uint8_t kLeafTag = 0x00;
constexpr uint8_t kNodeTag = 0x01;

Hash256 node_hash(const Hash256& left, const Hash256& right) {
    const uint8_t tag[1] = {kNodeTag};
    return sha256_concat({ByteSpan(tag, 1), ByteSpan(left), ByteSpan(right)});
}

}  // namespace

TreeIndex TreeIndex::from_account(ByteSpan account_number) {
    return TreeIndex{sha256(account_number)};
}

std::optional<TreeIndex> TreeIndex::from_hex(std::string_view hex) {
    auto raw = hex_decode(hex);
    if (!raw || raw->size() != 32) return std::nullopt;
    TreeIndex idx;
    std::copy(raw->begin(), raw->end(), idx.bits.begin());
    return idx;
}

std::string TreeIndex::hex() const {
    return hex_encode(bits);
}

Hash256 leaf_hash(const std::optional<GroupElement>& h, ByteSpan metadata) {
    if (metadata.size() > kMaxMetadata) throw Error("leaf_hash: metadata over 1024 bytes");
    Bytes material;
    material.push_back(kLeafTag);
    if (h) material.insert(material.end(), h->enc.begin(), h->enc.end());
    put_be32(material, static_cast<uint32_t>(metadata.size()));
    material.insert(material.end(), metadata.begin(), metadata.end());
    return sha256(material);
}

const std::array<Hash256, kTreeDepth + 1>& default_hashes() {
    static const std::array<Hash256, kTreeDepth + 1> table = [] {
        std::array<Hash256, kTreeDepth + 1> t{};
        t[kTreeDepth] = Hash256{};  // empty leaf
        for (size_t d = kTreeDepth; d-- > 0;) {
            t[d] = node_hash(t[d + 1], t[d + 1]);
        }
        return t;
    }();
    return table;
}

bool verify_branch(const Hash256& root, const TreeIndex& iota, const Hash256& leaf,
                   const MerkleBranch& branch) {
    const auto& defaults = default_hashes();
    uint16_t prev_depth = 0;
    for (const auto& s : branch.siblings) {
        if (s.depth < 1 || s.depth > kTreeDepth) return false;
        if (s.depth <= prev_depth) return false;  // strictly ascending
        prev_depth = s.depth;
    }
    // walk upward; provided siblings are consumed from the back
    size_t next = branch.siblings.size();
    Hash256 cur = leaf;
    for (size_t d = kTreeDepth; d >= 1; --d) {
        Hash256 sibling = defaults[d];
        if (next > 0 && branch.siblings[next - 1].depth == d) {
            sibling = branch.siblings[next - 1].hash;
            --next;
        }
        if (iota.bit(d - 1) == 0) {
            cur = node_hash(cur, sibling);
        } else {
            cur = node_hash(sibling, cur);
        }
    }
    return next == 0 && cur == root;
}

SparseTree::NodeKey SparseTree::key_at(const TreeIndex& iota, size_t depth) {
    NodeKey k;
    k.depth = static_cast<uint16_t>(depth);
    size_t full = depth / 8;
    std::copy(iota.bits.begin(), iota.bits.begin() + full, k.prefix.begin());
    if (depth % 8 != 0) {
        uint8_t mask = static_cast<uint8_t>(0xff << (8 - depth % 8));
        k.prefix[full] = iota.bits[full] & mask;
    }
    return k;
}

Hash256 SparseTree::node_at(const NodeKey& k) const {
    auto it = nodes_.find(k);
    if (it != nodes_.end()) return it->second;
    return default_hashes()[k.depth];
}

void SparseTree::set_node(const NodeKey& k, const Hash256& value) {
    if (value == default_hashes()[k.depth]) {
        nodes_.erase(k);
    } else {
        nodes_[k] = value;
    }
}

const Hash256& SparseTree::root() const {
    static const Hash256 empty_root = default_hashes()[0];
    auto it = nodes_.find(NodeKey{0, Hash256{}});
    return it != nodes_.end() ? it->second : empty_root;
}

Hash256 SparseTree::leaf(const TreeIndex& iota) const {
    auto it = leaves_.find(iota);
    return it != leaves_.end() ? it->second : default_hashes()[kTreeDepth];
}

void SparseTree::upsert(const TreeIndex& iota, const Hash256& leaf) {
    if (leaf == default_hashes()[kTreeDepth]) {
        leaves_.erase(iota);
    } else {
        leaves_[iota] = leaf;
    }
    set_node(key_at(iota, kTreeDepth), leaf);
    Hash256 cur = leaf;
    for (size_t d = kTreeDepth; d >= 1; --d) {
        NodeKey sibling_key = key_at(iota, d);
        // flip the last path bit to address the sibling
        size_t bit_pos = d - 1;
        sibling_key.prefix[bit_pos / 8] ^= static_cast<uint8_t>(0x80 >> (bit_pos % 8));
        Hash256 sibling = node_at(sibling_key);
        if (iota.bit(d - 1) == 0) {
            cur = node_hash(cur, sibling);
        } else {
            cur = node_hash(sibling, cur);
        }
        set_node(key_at(iota, d - 1), cur);
    }
}

MerkleBranch SparseTree::branch(const TreeIndex& iota) const {
    MerkleBranch b;
    const auto& defaults = default_hashes();
    for (size_t d = 1; d <= kTreeDepth; ++d) {
        NodeKey sibling_key = key_at(iota, d);
        size_t bit_pos = d - 1;
        sibling_key.prefix[bit_pos / 8] ^= static_cast<uint8_t>(0x80 >> (bit_pos % 8));
        auto it = nodes_.find(sibling_key);
        if (it != nodes_.end() && it->second != defaults[d]) {
            b.siblings.push_back({static_cast<uint16_t>(d), it->second});
        }
    }
    return b;
}

CommitmentChain advance_cm(const CommitmentChain& chain, const Hash256& root) {
    CommitmentChain next;
    next.t = chain.t + 1;
    if (chain.t == 0) {
        next.cm = root;  // cm_1 = r_1
    } else {
        next.cm = sha256_concat({ByteSpan(chain.cm), ByteSpan(root)});
    }
    return next;
}

void save_tree_snapshot(std::ostream& out, const SparseTree& tree, const CommitmentChain& chain) {
    out << "anchorid-tree v1\n";
    out << "epoch " << chain.t << "\n";
    out << "root " << hex_encode(tree.root()) << "\n";
    out << "cm " << hex_encode(chain.cm) << "\n";
    for (const auto& [iota, leaf] : tree.leaves()) {
        out << "leaf " << iota.hex() << " " << hex_encode(leaf) << "\n";
    }
}

std::optional<TreeSnapshot> load_tree_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "anchorid-tree v1") return std::nullopt;
    TreeSnapshot snap;
    std::string declared_root, declared_cm;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "epoch") {
            ls >> snap.chain.t;
        } else if (kind == "root") {
            ls >> declared_root;
        } else if (kind == "cm") {
            ls >> declared_cm;
            auto raw = hex_decode(declared_cm);
            if (!raw) return std::nullopt;
            auto h = to_hash256(*raw);
            if (!h) return std::nullopt;
            snap.chain.cm = *h;
        } else if (kind == "leaf") {
            std::string iota_hex, leaf_hex;
            ls >> iota_hex >> leaf_hex;
            auto iota = TreeIndex::from_hex(iota_hex);
            auto raw = hex_decode(leaf_hex);
            if (!iota || !raw) return std::nullopt;
            auto h = to_hash256(*raw);
            if (!h) return std::nullopt;
            snap.tree.upsert(*iota, *h);
        } else {
            return std::nullopt;
        }
    }
    if (hex_encode(snap.tree.root()) != declared_root) return std::nullopt;
    return snap;
}

}  // namespace anchorid
