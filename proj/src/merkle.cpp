#include "icn/merkle.hpp"

#include "icn/types.hpp"

namespace icn {

using nlohmann::json;

Digest merkle_leaf_hash(std::string_view data)
{
    std::string buf;
    buf.reserve(data.size() + 1);
    buf.push_back('\x00');
    buf.append(data);
    return sha256(buf);
}

Digest merkle_node_hash(const Digest& left, const Digest& right)
{
    std::array<std::uint8_t, 65> buf{};
    buf[0] = 0x01;
    std::copy(left.begin(), left.end(), buf.begin() + 1);
    std::copy(right.begin(), right.end(), buf.begin() + 33);
    return sha256(std::span<const std::uint8_t>(buf));
}

Digest MerkleProof::fold() const
{
    Digest acc = leaf_hash;
    for (const auto& step : path)
        acc = step.side == Side::Left ? merkle_node_hash(step.sibling, acc)
                                      : merkle_node_hash(acc, step.sibling);
    return acc;
}

json MerkleProof::to_json() const
{
    json steps = json::array();
    for (const auto& s : path)
        steps.push_back({{"sibling", to_hex(s.sibling)}, {"side", s.side == Side::Left ? "left" : "right"}});
    return {{"leaf_hash", to_hex(leaf_hash)}, {"path", steps}, {"root", to_hex(root)}};
}

MerkleProof MerkleProof::from_json(const json& doc)
{
    MerkleProof p;
    p.leaf_hash = digest_from_hex(doc.at("leaf_hash").get<std::string>());
    p.root = digest_from_hex(doc.at("root").get<std::string>());
    for (const auto& s : doc.at("path")) {
        auto side = s.at("side").get<std::string>();
        if (side != "left" && side != "right")
            fail(Errc::ParseError, "proof side must be left or right");
        p.path.push_back({digest_from_hex(s.at("sibling").get<std::string>()),
                          side == "left" ? Side::Left : Side::Right});
    }
    return p;
}

MerkleTree::MerkleTree(const std::vector<std::string>& leaves)
{
    if (leaves.empty())
        fail(Errc::InvalidParameters, "merkle tree needs at least one leaf");
    std::vector<Digest> level;
    level.reserve(leaves.size());
    for (const auto& leaf : leaves)
        level.push_back(merkle_leaf_hash(leaf));
    levels_.push_back(std::move(level));
    while (levels_.back().size() > 1) {
        const auto& below = levels_.back();
        std::vector<Digest> up;
        up.reserve((below.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < below.size(); i += 2)
            up.push_back(merkle_node_hash(below[i], below[i + 1]));
        if (below.size() % 2 == 1)
            up.push_back(below.back());
        levels_.push_back(std::move(up));
    }
}

MerkleProof MerkleTree::proof(std::size_t leaf) const
{
    if (leaf >= leaf_count())
        fail(Errc::InvalidParameters, "leaf index out of range");
    MerkleProof p;
    p.leaf_hash = levels_.front()[leaf];
    p.root = root();
    std::size_t idx = leaf;
    for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
        const auto& nodes = levels_[lvl];
        std::size_t sibling = idx ^ 1U;
        if (sibling < nodes.size())
            p.path.push_back({nodes[sibling], idx % 2 == 0 ? Side::Right : Side::Left});
        idx /= 2;
    }
    return p;
}

}  // namespace icn
