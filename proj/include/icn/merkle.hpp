#pragma once

#include "icn/digest.hpp"

#include <nlohmann/json.hpp>

#include <string_view>
#include <vector>

namespace icn {

// Leaves and interior nodes are domain separated: H(0x00 || data) for a
// leaf, H(0x01 || left || right) for an interior node. A node without a
// sibling on its level is carried up unchanged.

Digest merkle_leaf_hash(std::string_view data);
Digest merkle_node_hash(const Digest& left, const Digest& right);

/// Which side of the running hash the sibling sits on.
enum class Side { Left, Right };

struct ProofStep {
    Digest sibling{};
    Side side = Side::Right;
};

struct MerkleProof {
    Digest leaf_hash{};
    std::vector<ProofStep> path;
    Digest root{};

    /// Root recomputed from leaf_hash through path.
    Digest fold() const;

    nlohmann::json to_json() const;
    static MerkleProof from_json(const nlohmann::json& doc);
};

class MerkleTree {
public:
    explicit MerkleTree(const std::vector<std::string>& leaves);

    const Digest& root() const { return levels_.back().front(); }
    std::size_t leaf_count() const { return levels_.front().size(); }
    MerkleProof proof(std::size_t leaf) const;

private:
    std::vector<std::vector<Digest>> levels_;
};

}  // namespace icn
