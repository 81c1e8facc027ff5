#pragma once

#include "icn/digest.hpp"
#include "icn/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace icn {

using LockId = std::uint64_t;
using StakeId = std::uint64_t;
using AnchorId = std::uint64_t;

struct CollateralLock {
    LockId id = 0;
    AccountId owner;
    NodeId node;
    TokenAmount amount;
    Epoch locked_until = 0;
};

struct StakePosition {
    StakeId id = 0;
    AccountId staker;
    NodeId node;
    TokenAmount amount;
};

/// Stakeable pass carrying a time-locked value sink. While staked the sink
/// counts as security for its node and decays into rewards for the owner.
struct NftPass {
    NftId id;
    AccountId owner;
    TokenAmount sink_value;
    TokenAmount initial_sink;
    std::uint64_t timelock_epochs = 1;
    std::optional<NodeId> staked_to;
    /// Held at parts-per-million resolution.
    Ratio decay_multiplier = Ratio::one();
    // Fractional decay owed but not yet paid, in units of 1/(timelock * 10^6).
    std::uint64_t decay_carry = 0;
};

struct ProofAnchor {
    AnchorId id = 0;
    Epoch epoch = 0;
    SubjectId subject;
    Digest root{};
    AccountId submitter;
};

struct SlashOutcome {
    NodeId node;
    Ratio severity;
    std::map<LockId, TokenAmount> lock_burns;
    std::map<StakeId, TokenAmount> stake_burns;
    std::optional<NftId> accelerated_nft;
    /// Sink forfeited by the accelerated pass: one decay step at the new rate.
    TokenAmount nft_burn;
    TokenAmount total_burned;
};

struct DecayPayout {
    NftId nft;
    AccountId owner;
    TokenAmount amount;
};

struct EpochSummary {
    Epoch new_epoch = 0;
    std::vector<DecayPayout> payouts;
    std::vector<LockId> expired_locks;
};

/// In-memory coordination state machine: balances, collateral, stakes, NFT
/// passes and the append-only proof anchor log.
///
/// Conservation identity, checked by conservation_holds():
///   balances + locks + stakes + sinks + burned - emitted == genesis supply
class Ledger {
public:
    Ledger() = default;
    /// Genesis supply is the sum of the initial balances.
    explicit Ledger(const std::map<AccountId, TokenAmount>& genesis_balances);

    Epoch current_epoch() const noexcept { return epoch_; }

    void open_account(const AccountId& id);
    bool has_account(const AccountId& id) const { return balances_.contains(id); }
    TokenAmount balance(const AccountId& id) const;

    void transfer(const AccountId& from, const AccountId& to, TokenAmount amount);

    CollateralLock lock_collateral(const AccountId& owner, const NodeId& node, TokenAmount amount,
                                   Epoch until);
    /// Returns the released amount to the lock owner.
    TokenAmount release_collateral(LockId lock);

    /// Caller is responsible for checking that the node is active.
    StakePosition stake(const AccountId& staker, const NodeId& node, TokenAmount amount);
    /// Returns every stake and the staked NFT on `node` to their owners.
    void unstake_all(const NodeId& node);

    SlashOutcome slash(const NodeId& node, const Ratio& severity);

    NftPass mint_nft(const AccountId& owner, TokenAmount initial_sink, std::uint64_t timelock_epochs,
                     std::optional<NftId> id = std::nullopt);
    const NftPass& stake_nft(const NftId& pass, const NodeId& node);

    EpochSummary advance_epoch();

    void authorize_submitter(const AccountId& account);
    bool is_authorized_submitter(const AccountId& account) const
    {
        return submitters_.contains(account);
    }
    AnchorId record_proof_anchor(const AccountId& submitter, const SubjectId& subject, Epoch epoch,
                                 const Digest& root);
    const ProofAnchor& anchor(AnchorId id) const;
    const std::vector<ProofAnchor>& anchors() const noexcept { return anchors_; }

    /// New tokens entering circulation (bootstrap emission).
    void emit(const AccountId& to, TokenAmount amount);
    void burn(const AccountId& from, TokenAmount amount);

    // Queries.
    TokenAmount collateral_of(const NodeId& node) const;
    TokenAmount stake_of(const NodeId& node) const;
    /// Token collateral, token stakes and the staked NFT sink.
    TokenAmount security_of(const NodeId& node) const;
    bool has_positions(const NodeId& node) const;
    std::optional<NftId> staked_nft(const NodeId& node) const;
    const NftPass& nft(const NftId& id) const;
    /// 0 unless the pass is staked.
    TokenAmount nft_security(const NftId& id) const;

    const std::map<AccountId, TokenAmount>& balances() const noexcept { return balances_; }
    const std::map<LockId, CollateralLock>& locks() const noexcept { return locks_; }
    const std::map<StakeId, StakePosition>& stakes() const noexcept { return stakes_; }
    const std::map<NftId, NftPass>& nfts() const noexcept { return nfts_; }

    TokenAmount genesis_supply() const noexcept { return genesis_supply_; }
    TokenAmount burned_total() const noexcept { return burned_; }
    TokenAmount emitted_total() const noexcept { return emitted_; }

    /// balances + locks + stakes + sinks + burned, which must equal
    /// genesis + emitted.
    TokenAmount accounted_total() const;
    bool conservation_holds() const;

    nlohmann::json to_json() const;
    static Ledger from_json(const nlohmann::json& doc);

private:
    TokenAmount& balance_ref(const AccountId& id);
    std::uint64_t decay_step(NftPass& pass) const;

    Epoch epoch_ = 0;
    TokenAmount genesis_supply_;
    TokenAmount burned_;
    TokenAmount emitted_;
    std::map<AccountId, TokenAmount> balances_;
    std::map<LockId, CollateralLock> locks_;
    std::map<StakeId, StakePosition> stakes_;
    std::map<NftId, NftPass> nfts_;
    std::map<NodeId, NftId> node_nft_;
    std::set<AccountId> submitters_;
    std::vector<ProofAnchor> anchors_;
    std::set<std::tuple<Epoch, SubjectId, AccountId>> anchor_keys_;
    LockId next_lock_ = 1;
    StakeId next_stake_ = 1;
    std::uint64_t next_nft_ = 1;
};

}  // namespace icn
