#include "meshchain/ledger.hpp"

#include <algorithm>

#include "meshchain/errors.hpp"

namespace meshchain {

void TxProposal::encode(ByteWriter& w) const {
    w.str(tx_id);
    w.str(client_id);
    w.str(chaincode_id);
    w.str(function);
    w.count(args.size());
    for (const auto& a : args) w.bytes(a);
    w.f64(submit_time);
}

TxProposal TxProposal::decode(ByteReader& r) {
    TxProposal p;
    p.tx_id = r.str();
    p.client_id = r.str();
    p.chaincode_id = r.str();
    p.function = r.str();
    size_t n = r.count();
    p.args.reserve(n);
    for (size_t i = 0; i < n; ++i) p.args.push_back(r.bytes());
    p.submit_time = r.f64();
    return p;
}

void ReadWriteSet::encode(ByteWriter& w) const {
    w.count(reads.size());
    for (const auto& [key, version] : reads) {
        w.str(key);
        w.u64(version);
    }
    w.count(writes.size());
    for (const auto& [key, value] : writes) {
        w.str(key);
        w.bytes(value);
    }
}

ReadWriteSet ReadWriteSet::decode(ByteReader& r) {
    ReadWriteSet rw;
    size_t nr = r.count();
    rw.reads.reserve(nr);
    for (size_t i = 0; i < nr; ++i) {
        std::string key = r.str();
        uint64_t version = r.u64();
        rw.reads.emplace_back(std::move(key), version);
    }
    size_t nw = r.count();
    rw.writes.reserve(nw);
    for (size_t i = 0; i < nw; ++i) {
        std::string key = r.str();
        Bytes value = r.bytes();
        rw.writes.emplace_back(std::move(key), std::move(value));
    }
    return rw;
}

Bytes ReadWriteSet::canonical() const {
    ByteWriter w;
    encode(w);
    return w.take();
}

Digest rwset_digest(const ReadWriteSet& rwset) { return sha256(rwset.canonical()); }

void Endorsement::encode(ByteWriter& w) const {
    w.str(endorser_id);
    w.digest(response_digest);
}

Endorsement Endorsement::decode(ByteReader& r) {
    Endorsement e;
    e.endorser_id = r.str();
    e.response_digest = r.digest();
    return e;
}

void Transaction::encode(ByteWriter& w) const {
    proposal.encode(w);
    rwset.encode(w);
    w.count(endorsements.size());
    for (const auto& e : endorsements) e.encode(w);
}

Transaction Transaction::decode(ByteReader& r) {
    Transaction tx;
    tx.proposal = TxProposal::decode(r);
    tx.rwset = ReadWriteSet::decode(r);
    size_t n = r.count();
    tx.endorsements.reserve(n);
    for (size_t i = 0; i < n; ++i) tx.endorsements.push_back(Endorsement::decode(r));
    return tx;
}

Bytes Block::canonical_content() const {
    ByteWriter w;
    w.u64(number);
    w.digest(prev_hash);
    w.count(txs.size());
    for (const auto& tx : txs) tx.encode(w);
    return w.take();
}

Bytes Block::canonical_full() const {
    ByteWriter w;
    Bytes content = canonical_content();
    w.bytes(content);
    w.count(validity.size());
    for (bool v : validity) w.u8(v ? 1 : 0);
    w.digest(block_hash);
    return w.take();
}

Block Block::decode_full(ByteReader& r) {
    Bytes content = r.bytes();
    ByteReader cr(content);
    Block b;
    b.number = cr.u64();
    b.prev_hash = cr.digest();
    size_t n = cr.count();
    b.txs.reserve(n);
    for (size_t i = 0; i < n; ++i) b.txs.push_back(Transaction::decode(cr));
    if (!cr.done()) throw SimError("block decode: trailing content bytes");
    size_t nv = r.count();
    b.validity.reserve(nv);
    for (size_t i = 0; i < nv; ++i) {
        const uint8_t flag = r.u8();
        if (flag > 1) throw SimError("block decode: bad validity flag");
        b.validity.push_back(flag == 1);
    }
    b.block_hash = r.digest();
    return b;
}

uint64_t WorldState::version_of(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.version;
}

const Bytes* WorldState::value_of(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second.value;
}

void WorldState::apply_write(const std::string& key, const Bytes& value) {
    auto& entry = entries[key];
    entry.value = value;
    entry.version += 1;
}

Digest Ledger::tip_hash() const {
    return blocks.empty() ? zero_digest() : blocks.back().block_hash;
}

Bytes Ledger::canonical() const {
    ByteWriter w;
    w.count(blocks.size());
    for (const auto& b : blocks) w.bytes(b.canonical_full());
    return w.take();
}

Ledger Ledger::decode(const Bytes& data) {
    ByteReader r(data);
    Ledger ledger;
    const size_t n = r.count();
    ledger.blocks.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        Bytes one = r.bytes();
        ByteReader br(one);
        Block b = Block::decode_full(br);
        if (!br.done()) throw SimError("ledger decode: trailing block bytes");
        if (b.validity.size() != b.txs.size()) {
            throw SimError("ledger decode: validity flag count mismatch");
        }
        for (size_t t = 0; t < b.txs.size(); ++t) {
            if (!b.validity[t]) continue;
            for (const auto& [key, value] : b.txs[t].rwset.writes) {
                ledger.state.apply_write(key, value);
            }
        }
        ledger.blocks.push_back(std::move(b));
    }
    if (!r.done()) throw SimError("ledger decode: trailing bytes");
    return ledger;
}

Digest hash_block(uint64_t number, const Digest& prev_hash, const std::vector<Transaction>& txs) {
    Block b;
    b.number = number;
    b.prev_hash = prev_hash;
    b.txs = txs;
    return sha256(b.canonical_content());
}

Block make_block(uint64_t number, const Digest& prev_hash, std::vector<Transaction> txs) {
    Block b;
    b.number = number;
    b.prev_hash = prev_hash;
    b.txs = std::move(txs);
    b.block_hash = sha256(b.canonical_content());
    return b;
}

bool evaluate_policy(const EndorsementPolicy& policy, const std::vector<Endorsement>& endorsements) {
    if (endorsements.empty()) return false;
    const Digest& first = endorsements.front().response_digest;
    std::set<std::string> members;
    for (const auto& e : endorsements) {
        if (e.response_digest != first) return false;
        if (policy.endorser_set.count(e.endorser_id)) members.insert(e.endorser_id);
    }
    return int(members.size()) >= policy.required_k;
}

std::vector<bool> mvcc_validate(const WorldState& state, const Block& block,
                                const EndorsementPolicy& policy) {
    WorldState working = state;
    std::vector<bool> flags;
    flags.reserve(block.txs.size());
    for (const auto& tx : block.txs) {
        bool valid = evaluate_policy(policy, tx.endorsements);
        if (valid) {
            const Digest expected = rwset_digest(tx.rwset);
            for (const auto& e : tx.endorsements) {
                if (e.response_digest != expected) {
                    valid = false;
                    break;
                }
            }
        }
        if (valid) {
            for (const auto& [key, version] : tx.rwset.reads) {
                if (working.version_of(key) != version) {
                    valid = false;
                    break;
                }
            }
        }
        if (valid) {
            for (const auto& [key, value] : tx.rwset.writes) working.apply_write(key, value);
        }
        flags.push_back(valid);
    }
    return flags;
}

void commit_block(Ledger& ledger, Block block) {
    if (block.prev_hash != ledger.tip_hash()) {
        throw SimError("commit_block: prev_hash does not match ledger tip");
    }
    if (block.validity.size() != block.txs.size()) {
        throw SimError("commit_block: validity flags not computed");
    }
    for (size_t i = 0; i < block.txs.size(); ++i) {
        if (!block.validity[i]) continue;
        for (const auto& [key, value] : block.txs[i].rwset.writes) {
            ledger.state.apply_write(key, value);
        }
    }
    ledger.blocks.push_back(std::move(block));
}

namespace {

bool verify_chain_impl(const Ledger& ledger, const EndorsementPolicy* policy) {
    Digest prev = zero_digest();
    WorldState replayed;
    for (size_t i = 0; i < ledger.blocks.size(); ++i) {
        const Block& b = ledger.blocks[i];
        if (b.number != i) return false;
        if (b.prev_hash != prev) return false;
        if (sha256(b.canonical_content()) != b.block_hash) return false;
        if (b.validity.size() != b.txs.size()) return false;
        if (policy) {
            std::vector<bool> derived = mvcc_validate(replayed, b, *policy);
            if (derived != b.validity) return false;
        }
        for (size_t t = 0; t < b.txs.size(); ++t) {
            if (!b.validity[t]) continue;
            for (const auto& [key, value] : b.txs[t].rwset.writes) {
                replayed.apply_write(key, value);
            }
        }
        prev = b.block_hash;
    }
    return replayed == ledger.state;
}

}  // namespace

bool verify_chain(const Ledger& ledger) { return verify_chain_impl(ledger, nullptr); }

bool verify_chain(const Ledger& ledger, const EndorsementPolicy& policy) {
    return verify_chain_impl(ledger, &policy);
}

}  // namespace meshchain
