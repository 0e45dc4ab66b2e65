#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meshchain/bytes.hpp"

namespace meshchain {

struct TxProposal {
    std::string tx_id;
    std::string client_id;
    std::string chaincode_id;
    std::string function;
    std::vector<Bytes> args;
    double submit_time = 0.0;

    void encode(ByteWriter& w) const;
    static TxProposal decode(ByteReader& r);
};

struct ReadWriteSet {
    // Reads carry the version observed in the state at simulation time;
    // version 0 means the key was absent.
    std::vector<std::pair<std::string, uint64_t>> reads;
    std::vector<std::pair<std::string, Bytes>> writes;

    void encode(ByteWriter& w) const;
    static ReadWriteSet decode(ByteReader& r);
    Bytes canonical() const;
};

Digest rwset_digest(const ReadWriteSet& rwset);

struct Endorsement {
    std::string endorser_id;
    Digest response_digest{};

    void encode(ByteWriter& w) const;
    static Endorsement decode(ByteReader& r);
};

struct EndorsementPolicy {
    std::set<std::string> endorser_set;
    int required_k = 1;
};

struct Transaction {
    TxProposal proposal;
    ReadWriteSet rwset;
    std::vector<Endorsement> endorsements;

    void encode(ByteWriter& w) const;
    static Transaction decode(ByteReader& r);
};

struct Block {
    uint64_t number = 0;
    Digest prev_hash{};
    std::vector<Transaction> txs;
    std::vector<bool> validity;  // set at commit, not covered by block_hash
    Digest block_hash{};

    // Serialization of the hashed content (number, prev_hash, txs).
    Bytes canonical_content() const;
    // Full serialization including validity flags and the stored hash.
    Bytes canonical_full() const;
    static Block decode_full(ByteReader& r);
};

struct StateEntry {
    Bytes value;
    uint64_t version = 0;

    bool operator==(const StateEntry&) const = default;
};

struct WorldState {
    std::map<std::string, StateEntry> entries;

    // Version of a key, 0 when absent.
    uint64_t version_of(const std::string& key) const;
    const Bytes* value_of(const std::string& key) const;
    void apply_write(const std::string& key, const Bytes& value);

    bool operator==(const WorldState&) const = default;
};

struct Ledger {
    std::vector<Block> blocks;
    WorldState state;

    Digest tip_hash() const;
    Bytes canonical() const;
    // Inverse of canonical(); the state is rebuilt from the stored
    // validity flags. Throws SimError on malformed input.
    static Ledger decode(const Bytes& data);
};

Digest hash_block(uint64_t number, const Digest& prev_hash, const std::vector<Transaction>& txs);

// Builds an unvalidated block chained onto prev_hash.
Block make_block(uint64_t number, const Digest& prev_hash, std::vector<Transaction> txs);

// True iff at least required_k endorsements from distinct members of the
// endorser set are present and every endorsement digest is identical.
bool evaluate_policy(const EndorsementPolicy& policy, const std::vector<Endorsement>& endorsements);

// Positional validity flags: a tx is valid iff its endorsements satisfy
// the policy, the endorsement digest matches its read/write set, and
// every read version matches the state as updated by earlier valid txs
// of the same block.
std::vector<bool> mvcc_validate(const WorldState& state, const Block& block,
                                const EndorsementPolicy& policy);

// Appends a validated block and applies the writes of its valid txs.
// Throws SimError on a hash-chain mismatch.
void commit_block(Ledger& ledger, Block block);

// Integrity check: stored hashes recompute, prev_hash links hold,
// genesis links to the zero digest, block numbers are sequential, and
// the state equals the fold of all flagged-valid writes. When a policy
// is supplied the validity flags are re-derived and compared as well.
bool verify_chain(const Ledger& ledger);
bool verify_chain(const Ledger& ledger, const EndorsementPolicy& policy);

}  // namespace meshchain
