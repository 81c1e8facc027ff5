#include "icn/ledger.hpp"

#include "icn/json_io.hpp"

#include <limits>

namespace icn {

namespace jio = json_io;
using nlohmann::json;

namespace {

using u128 = unsigned __int128;
constexpr std::uint64_t kPpm = 1'000'000;
constexpr std::uint64_t kMaxMultiplierPpm = kPpm << 30;

std::uint64_t multiplier_ppm(const Ratio& m) { return m.ceil_mul(kPpm); }

}  // namespace

Ledger::Ledger(const std::map<AccountId, TokenAmount>& genesis_balances)
{
    for (const auto& [id, amount] : genesis_balances) {
        balances_[id] = amount;
        genesis_supply_ += amount;
    }
}

void Ledger::open_account(const AccountId& id)
{
    balances_.try_emplace(id);
}

TokenAmount Ledger::balance(const AccountId& id) const
{
    auto it = balances_.find(id);
    if (it == balances_.end())
        fail(Errc::UnknownAccount, id);
    return it->second;
}

TokenAmount& Ledger::balance_ref(const AccountId& id)
{
    auto it = balances_.find(id);
    if (it == balances_.end())
        fail(Errc::UnknownAccount, id);
    return it->second;
}

void Ledger::transfer(const AccountId& from, const AccountId& to, TokenAmount amount)
{
    auto& src = balance_ref(from);
    auto& dst = balance_ref(to);
    if (src < amount)
        fail(Errc::InsufficientBalance, from);
    src -= amount;
    dst += amount;
}

CollateralLock Ledger::lock_collateral(const AccountId& owner, const NodeId& node,
                                       TokenAmount amount, Epoch until)
{
    auto& bal = balance_ref(owner);
    if (amount.is_zero())
        fail(Errc::InvalidAmount, "collateral lock of zero");
    if (until <= epoch_)
        fail(Errc::InvalidDuration, "lock must end after the current epoch");
    if (bal < amount)
        fail(Errc::InsufficientBalance, owner);
    bal -= amount;
    CollateralLock lock{next_lock_++, owner, node, amount, until};
    locks_.emplace(lock.id, lock);
    return lock;
}

TokenAmount Ledger::release_collateral(LockId id)
{
    auto it = locks_.find(id);
    if (it == locks_.end())
        fail(Errc::UnknownLock, std::to_string(id));
    if (epoch_ < it->second.locked_until)
        fail(Errc::StillLocked, "lock " + std::to_string(id) + " held until epoch "
                                    + std::to_string(it->second.locked_until));
    TokenAmount amount = it->second.amount;
    balance_ref(it->second.owner) += amount;
    locks_.erase(it);
    return amount;
}

StakePosition Ledger::stake(const AccountId& staker, const NodeId& node, TokenAmount amount)
{
    auto& bal = balance_ref(staker);
    if (amount.is_zero())
        fail(Errc::InvalidAmount, "stake of zero");
    if (bal < amount)
        fail(Errc::InsufficientBalance, staker);
    bal -= amount;
    StakePosition pos{next_stake_++, staker, node, amount};
    stakes_.emplace(pos.id, pos);
    return pos;
}

void Ledger::unstake_all(const NodeId& node)
{
    for (auto it = stakes_.begin(); it != stakes_.end();) {
        if (it->second.node == node) {
            balance_ref(it->second.staker) += it->second.amount;
            it = stakes_.erase(it);
        } else {
            ++it;
        }
    }
    if (auto it = node_nft_.find(node); it != node_nft_.end()) {
        nfts_.at(it->second).staked_to.reset();
        node_nft_.erase(it);
    }
}

SlashOutcome Ledger::slash(const NodeId& node, const Ratio& severity)
{
    if (!severity.in_unit_interval())
        fail(Errc::SeverityOutOfRange, severity.to_string());
    if (!has_positions(node))
        fail(Errc::UnknownNode, "no positions on " + node);

    SlashOutcome out;
    out.node = node;
    out.severity = severity;
    for (auto& [id, lock] : locks_) {
        if (lock.node != node)
            continue;
        TokenAmount cut(severity.floor_mul(lock.amount.value()));
        lock.amount -= cut;
        out.lock_burns[id] = cut;
        out.total_burned += cut;
    }
    for (auto& [id, pos] : stakes_) {
        if (pos.node != node)
            continue;
        TokenAmount cut(severity.floor_mul(pos.amount.value()));
        pos.amount -= cut;
        out.stake_burns[id] = cut;
        out.total_burned += cut;
    }
    if (auto it = node_nft_.find(node); it != node_nft_.end() && !severity.is_zero()) {
        auto& pass = nfts_.at(it->second);
        u128 grown = static_cast<u128>(multiplier_ppm(pass.decay_multiplier))
                     * (static_cast<u128>(severity.den()) + severity.num());
        u128 ppm = (grown + severity.den() - 1) / severity.den();
        pass.decay_multiplier = Ratio(ppm > kMaxMultiplierPpm ? kMaxMultiplierPpm
                                                              : static_cast<std::uint64_t>(ppm),
                                      kPpm);
        TokenAmount forfeit(decay_step(pass));
        pass.sink_value -= forfeit;
        out.nft_burn = forfeit;
        out.total_burned += forfeit;
        out.accelerated_nft = pass.id;
        if (pass.sink_value.is_zero()) {
            node_nft_.erase(it);
            pass.staked_to.reset();
        }
    }
    burned_ += out.total_burned;
    return out;
}

NftPass Ledger::mint_nft(const AccountId& owner, TokenAmount initial_sink,
                         std::uint64_t timelock_epochs, std::optional<NftId> id)
{
    auto& bal = balance_ref(owner);
    if (initial_sink.is_zero() || timelock_epochs == 0)
        fail(Errc::InvalidParameters, "pass needs a positive sink and timelock");
    NftId pass_id = id ? *id : "nft-" + std::to_string(next_nft_);
    if (nfts_.contains(pass_id))
        fail(Errc::DuplicateId, pass_id);
    if (bal < initial_sink)
        fail(Errc::InsufficientBalance, owner);
    ++next_nft_;
    bal -= initial_sink;
    NftPass pass;
    pass.id = pass_id;
    pass.owner = owner;
    pass.sink_value = initial_sink;
    pass.initial_sink = initial_sink;
    pass.timelock_epochs = timelock_epochs;
    nfts_.emplace(pass_id, pass);
    return pass;
}

const NftPass& Ledger::stake_nft(const NftId& id, const NodeId& node)
{
    auto it = nfts_.find(id);
    if (it == nfts_.end())
        fail(Errc::UnknownNft, id);
    auto& pass = it->second;
    if (pass.staked_to)
        fail(Errc::AlreadyStaked, id);
    if (pass.sink_value.is_zero())
        fail(Errc::FullyDecayed, id);
    if (node_nft_.contains(node))
        fail(Errc::NodeOccupied, node);
    pass.staked_to = node;
    node_nft_[node] = id;
    return pass;
}

std::uint64_t Ledger::decay_step(NftPass& pass) const
{
    u128 unit = static_cast<u128>(pass.timelock_epochs) * kPpm;
    u128 owed = static_cast<u128>(multiplier_ppm(pass.decay_multiplier)) * pass.initial_sink.value()
                + pass.decay_carry;
    u128 step = owed / unit;
    if (step >= pass.sink_value.value()) {
        pass.decay_carry = 0;
        return pass.sink_value.value();
    }
    pass.decay_carry = static_cast<std::uint64_t>(owed % unit);
    return static_cast<std::uint64_t>(step);
}

EpochSummary Ledger::advance_epoch()
{
    EpochSummary summary;
    ++epoch_;
    summary.new_epoch = epoch_;
    for (auto& [id, pass] : nfts_) {
        if (!pass.staked_to || pass.sink_value.is_zero())
            continue;
        TokenAmount step(decay_step(pass));
        pass.sink_value -= step;
        balance_ref(pass.owner) += step;
        summary.payouts.push_back({id, pass.owner, step});
        if (pass.sink_value.is_zero()) {
            node_nft_.erase(*pass.staked_to);
            pass.staked_to.reset();
        }
    }
    for (const auto& [id, lock] : locks_)
        if (lock.locked_until == epoch_)
            summary.expired_locks.push_back(id);
    return summary;
}

void Ledger::authorize_submitter(const AccountId& account)
{
    open_account(account);
    submitters_.insert(account);
}

AnchorId Ledger::record_proof_anchor(const AccountId& submitter, const SubjectId& subject,
                                     Epoch epoch, const Digest& root)
{
    if (!submitters_.contains(submitter))
        fail(Errc::UnauthorizedSubmitter, submitter);
    auto key = std::make_tuple(epoch, subject, submitter);
    if (anchor_keys_.contains(key))
        fail(Errc::DuplicateAnchor, subject + "@" + std::to_string(epoch));
    anchor_keys_.insert(key);
    ProofAnchor anchor{anchors_.size(), epoch, subject, root, submitter};
    anchors_.push_back(anchor);
    return anchor.id;
}

const ProofAnchor& Ledger::anchor(AnchorId id) const
{
    if (id >= anchors_.size())
        fail(Errc::UnknownAnchor, std::to_string(id));
    return anchors_[id];
}

void Ledger::emit(const AccountId& to, TokenAmount amount)
{
    auto& bal = balance_ref(to);
    emitted_ += amount;
    bal += amount;
}

void Ledger::burn(const AccountId& from, TokenAmount amount)
{
    auto& bal = balance_ref(from);
    if (bal < amount)
        fail(Errc::InsufficientBalance, from);
    bal -= amount;
    burned_ += amount;
}

TokenAmount Ledger::collateral_of(const NodeId& node) const
{
    TokenAmount total;
    for (const auto& [id, lock] : locks_)
        if (lock.node == node)
            total += lock.amount;
    return total;
}

TokenAmount Ledger::stake_of(const NodeId& node) const
{
    TokenAmount total;
    for (const auto& [id, pos] : stakes_)
        if (pos.node == node)
            total += pos.amount;
    return total;
}

TokenAmount Ledger::security_of(const NodeId& node) const
{
    TokenAmount total = collateral_of(node) + stake_of(node);
    if (auto nft = staked_nft(node))
        total += nfts_.at(*nft).sink_value;
    return total;
}

bool Ledger::has_positions(const NodeId& node) const
{
    for (const auto& [id, lock] : locks_)
        if (lock.node == node)
            return true;
    for (const auto& [id, pos] : stakes_)
        if (pos.node == node)
            return true;
    return node_nft_.contains(node);
}

std::optional<NftId> Ledger::staked_nft(const NodeId& node) const
{
    if (auto it = node_nft_.find(node); it != node_nft_.end())
        return it->second;
    return std::nullopt;
}

const NftPass& Ledger::nft(const NftId& id) const
{
    auto it = nfts_.find(id);
    if (it == nfts_.end())
        fail(Errc::UnknownNft, id);
    return it->second;
}

TokenAmount Ledger::nft_security(const NftId& id) const
{
    const auto& pass = nft(id);
    return pass.staked_to ? pass.sink_value : TokenAmount{};
}

TokenAmount Ledger::accounted_total() const
{
    TokenAmount total = burned_;
    for (const auto& [id, bal] : balances_)
        total += bal;
    for (const auto& [id, lock] : locks_)
        total += lock.amount;
    for (const auto& [id, pos] : stakes_)
        total += pos.amount;
    for (const auto& [id, pass] : nfts_)
        total += pass.sink_value;
    return total;
}

bool Ledger::conservation_holds() const
{
    return accounted_total() == genesis_supply_ + emitted_;
}

json Ledger::to_json() const
{
    json doc;
    doc["epoch"] = jio::u64(epoch_);
    doc["genesis_supply"] = jio::amount(genesis_supply_);
    doc["burned_total"] = jio::amount(burned_);
    doc["emitted_total"] = jio::amount(emitted_);
    doc["next_lock"] = jio::u64(next_lock_);
    doc["next_stake"] = jio::u64(next_stake_);
    doc["next_nft"] = jio::u64(next_nft_);

    json balances = json::object();
    for (const auto& [id, bal] : balances_)
        balances[id] = jio::amount(bal);
    doc["balances"] = balances;

    json locks = json::array();
    for (const auto& [id, lock] : locks_)
        locks.push_back({{"id", jio::u64(id)},
                         {"owner", lock.owner},
                         {"node", lock.node},
                         {"amount", jio::amount(lock.amount)},
                         {"locked_until", jio::u64(lock.locked_until)}});
    doc["locks"] = locks;

    json stakes = json::array();
    for (const auto& [id, pos] : stakes_)
        stakes.push_back({{"id", jio::u64(id)},
                          {"staker", pos.staker},
                          {"node", pos.node},
                          {"amount", jio::amount(pos.amount)}});
    doc["stakes"] = stakes;

    json nfts = json::array();
    for (const auto& [id, pass] : nfts_) {
        json p = {{"id", id},
                  {"owner", pass.owner},
                  {"sink_value", jio::amount(pass.sink_value)},
                  {"initial_sink", jio::amount(pass.initial_sink)},
                  {"timelock_epochs", jio::u64(pass.timelock_epochs)},
                  {"decay_multiplier", jio::ratio(pass.decay_multiplier)},
                  {"decay_carry", jio::u64(pass.decay_carry)},
                  {"staked_to", pass.staked_to ? json(*pass.staked_to) : json(nullptr)}};
        nfts.push_back(p);
    }
    doc["nfts"] = nfts;

    doc["submitters"] = json(std::vector<std::string>(submitters_.begin(), submitters_.end()));

    json anchors = json::array();
    for (const auto& a : anchors_)
        anchors.push_back({{"id", jio::u64(a.id)},
                           {"epoch", jio::u64(a.epoch)},
                           {"subject", a.subject},
                           {"root", to_hex(a.root)},
                           {"submitter", a.submitter}});
    doc["anchors"] = anchors;
    return doc;
}

Ledger Ledger::from_json(const json& doc)
{
    Ledger l;
    l.epoch_ = jio::read_u64(doc.at("epoch"));
    l.genesis_supply_ = jio::read_amount(doc.at("genesis_supply"));
    l.burned_ = jio::read_amount(doc.at("burned_total"));
    l.emitted_ = jio::read_amount(doc.at("emitted_total"));
    l.next_lock_ = jio::read_u64(doc.at("next_lock"));
    l.next_stake_ = jio::read_u64(doc.at("next_stake"));
    l.next_nft_ = jio::read_u64(doc.at("next_nft"));
    for (const auto& [id, bal] : doc.at("balances").items())
        l.balances_[id] = jio::read_amount(bal);
    for (const auto& j : doc.at("locks")) {
        CollateralLock lock{jio::read_u64(j.at("id")), j.at("owner"), j.at("node"),
                            jio::read_amount(j.at("amount")), jio::read_u64(j.at("locked_until"))};
        l.locks_.emplace(lock.id, lock);
    }
    for (const auto& j : doc.at("stakes")) {
        StakePosition pos{jio::read_u64(j.at("id")), j.at("staker"), j.at("node"),
                          jio::read_amount(j.at("amount"))};
        l.stakes_.emplace(pos.id, pos);
    }
    for (const auto& j : doc.at("nfts")) {
        NftPass pass;
        pass.id = j.at("id");
        pass.owner = j.at("owner");
        pass.sink_value = jio::read_amount(j.at("sink_value"));
        pass.initial_sink = jio::read_amount(j.at("initial_sink"));
        pass.timelock_epochs = jio::read_u64(j.at("timelock_epochs"));
        pass.decay_multiplier = jio::read_ratio(j.at("decay_multiplier"));
        pass.decay_carry = jio::read_u64(j.at("decay_carry"));
        if (!j.at("staked_to").is_null()) {
            pass.staked_to = j.at("staked_to").get<std::string>();
            l.node_nft_[*pass.staked_to] = pass.id;
        }
        l.nfts_.emplace(pass.id, pass);
    }
    for (const auto& s : doc.at("submitters"))
        l.submitters_.insert(s.get<std::string>());
    for (const auto& j : doc.at("anchors")) {
        ProofAnchor a{jio::read_u64(j.at("id")), jio::read_u64(j.at("epoch")), j.at("subject"),
                      digest_from_hex(j.at("root").get<std::string>()), j.at("submitter")};
        l.anchor_keys_.insert({a.epoch, a.subject, a.submitter});
        l.anchors_.push_back(a);
    }
    return l;
}

}  // namespace icn
