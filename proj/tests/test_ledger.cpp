#include <doctest.h>

#include "meshchain/errors.hpp"
#include "meshchain/ledger.hpp"

using namespace meshchain;

namespace {

EndorsementPolicy one_of_e1() { return EndorsementPolicy{{"e1"}, 1}; }

Transaction make_tx(const std::string& id, ReadWriteSet rwset,
                    const std::vector<std::string>& endorsers = {"e1"}) {
    Transaction tx;
    tx.proposal.tx_id = id;
    tx.proposal.client_id = "c0";
    tx.proposal.chaincode_id = "compensation";
    tx.proposal.function = "record";
    tx.rwset = std::move(rwset);
    const Digest d = rwset_digest(tx.rwset);
    for (const auto& e : endorsers) tx.endorsements.push_back(Endorsement{e, d});
    return tx;
}

ReadWriteSet write_only(const std::string& key, uint8_t v) {
    ReadWriteSet rw;
    rw.writes.emplace_back(key, Bytes{v});
    return rw;
}

// Ledger of 1 + n_blocks blocks, one single-write tx per block.
Ledger build_ledger(size_t n_blocks) {
    Ledger ledger;
    commit_block(ledger, make_block(0, zero_digest(), {}));
    const EndorsementPolicy policy = one_of_e1();
    for (size_t i = 1; i <= n_blocks; ++i) {
        ReadWriteSet rw;
        rw.reads.emplace_back("k" + std::to_string(i % 3),
                              ledger.state.version_of("k" + std::to_string(i % 3)));
        rw.writes.emplace_back("k" + std::to_string(i % 3), Bytes{uint8_t(i)});
        Block b = make_block(i, ledger.tip_hash(), {make_tx("t" + std::to_string(i), rw)});
        b.validity = mvcc_validate(ledger.state, b, policy);
        commit_block(ledger, std::move(b));
    }
    return ledger;
}

}  // namespace

TEST_CASE("genesis block digest is frozen") {
    const Block g = make_block(0, zero_digest(), {});
    CHECK(to_hex(g.block_hash) ==
          "85759b3811ff7dc47b03792ac85317be51431a3f9e01dcafce317ed736a391b0");
}

TEST_CASE("block hash is deterministic and input-sensitive") {
    Transaction tx = make_tx("t1", write_only("k", 1));
    const Digest h1 = hash_block(3, zero_digest(), {tx});
    const Digest h2 = hash_block(3, zero_digest(), {tx});
    CHECK(h1 == h2);

    Transaction tweaked = tx;
    tweaked.proposal.args.push_back(Bytes{0x00});
    CHECK(hash_block(3, zero_digest(), {tweaked}) != h1);
    CHECK(hash_block(4, zero_digest(), {tx}) != h1);
}

TEST_CASE("endorsement policy counts distinct matching members") {
    const Digest d = rwset_digest(write_only("k", 1));
    Digest other = d;
    other[0] ^= 1;

    EndorsementPolicy policy{{"e1", "e2", "e3"}, 2};
    CHECK(evaluate_policy(EndorsementPolicy{{"e1"}, 1}, {Endorsement{"e1", d}}));
    CHECK_FALSE(evaluate_policy(policy, {Endorsement{"e1", d}, Endorsement{"e2", other}}));
    CHECK_FALSE(evaluate_policy(policy, {Endorsement{"e1", d}, Endorsement{"zz", d}}));
    CHECK_FALSE(evaluate_policy(policy, {Endorsement{"e1", d}, Endorsement{"e1", d}}));
    CHECK(evaluate_policy(policy, {Endorsement{"e1", d}, Endorsement{"e2", d}}));
    CHECK_FALSE(evaluate_policy(policy, {}));
}

TEST_CASE("mvcc accepts read-free txs") {
    WorldState state;
    Block b = make_block(1, zero_digest(), {make_tx("t1", write_only("k", 1))});
    CHECK(mvcc_validate(state, b, one_of_e1()) == std::vector<bool>{true});
}

TEST_CASE("mvcc invalidates the second of two conflicting txs in one block") {
    WorldState state;
    state.apply_write("K", Bytes{9});
    REQUIRE(state.version_of("K") == 1);

    ReadWriteSet rw;
    rw.reads.emplace_back("K", 1);
    rw.writes.emplace_back("K", Bytes{2});
    Block b = make_block(1, zero_digest(), {make_tx("a", rw), make_tx("b", rw)});
    CHECK(mvcc_validate(state, b, one_of_e1()) == std::vector<bool>{true, false});
}

TEST_CASE("mvcc invalidates stale reads from earlier blocks") {
    WorldState state;
    state.apply_write("K", Bytes{1});
    state.apply_write("K", Bytes{2});

    ReadWriteSet rw;
    rw.reads.emplace_back("K", 1);
    rw.writes.emplace_back("K", Bytes{3});
    Block b = make_block(1, zero_digest(), {make_tx("t", rw)});
    CHECK(mvcc_validate(state, b, one_of_e1()) == std::vector<bool>{false});
}

TEST_CASE("mvcc rejects policy failures regardless of reads") {
    WorldState state;
    Block b = make_block(1, zero_digest(), {make_tx("t", write_only("k", 1), {"intruder"})});
    CHECK(mvcc_validate(state, b, one_of_e1()) == std::vector<bool>{false});
}

TEST_CASE("commit applies only valid writes and bumps versions by one") {
    Ledger ledger;
    commit_block(ledger, make_block(0, zero_digest(), {}));

    ReadWriteSet rw;
    rw.reads.emplace_back("K", 0);
    rw.writes.emplace_back("K", Bytes{1});
    Block b = make_block(1, ledger.tip_hash(), {make_tx("a", rw), make_tx("b", rw)});
    b.validity = mvcc_validate(ledger.state, b, one_of_e1());
    commit_block(ledger, std::move(b));

    CHECK(ledger.state.version_of("K") == 1);
    CHECK(*ledger.state.value_of("K") == Bytes{1});
    CHECK(ledger.blocks.size() == 2);
}

TEST_CASE("commit refuses a broken hash chain") {
    Ledger ledger;
    commit_block(ledger, make_block(0, zero_digest(), {}));
    Digest wrong = ledger.tip_hash();
    wrong[5] ^= 0xff;
    Block b = make_block(1, wrong, {});
    CHECK_THROWS_AS(commit_block(ledger, std::move(b)), SimError);
}

TEST_CASE("empty block leaves state untouched") {
    Ledger ledger = build_ledger(3);
    const WorldState before = ledger.state;
    Block b = make_block(ledger.blocks.size(), ledger.tip_hash(), {});
    commit_block(ledger, std::move(b));
    CHECK(ledger.state == before);
}

TEST_CASE("final version of a key equals its valid write count") {
    Ledger ledger;
    commit_block(ledger, make_block(0, zero_digest(), {}));
    for (int i = 0; i < 100; ++i) {
        ReadWriteSet rw;
        rw.reads.emplace_back("K", ledger.state.version_of("K"));
        rw.writes.emplace_back("K", Bytes{uint8_t(i)});
        Block b = make_block(uint64_t(i + 1), ledger.tip_hash(),
                             {make_tx("t" + std::to_string(i), rw)});
        b.validity = mvcc_validate(ledger.state, b, one_of_e1());
        commit_block(ledger, std::move(b));
    }
    CHECK(ledger.state.version_of("K") == 100);
}

TEST_CASE("verify_chain holds for freshly built ledgers") {
    CHECK(verify_chain(build_ledger(0)));
    CHECK(verify_chain(build_ledger(10)));
    CHECK(verify_chain(build_ledger(10), one_of_e1()));
}

TEST_CASE("verify_chain catches in-memory tampering") {
    Ledger ledger = build_ledger(5);
    SUBCASE("tx args changed") {
        ledger.blocks[3].txs[0].proposal.args.push_back(Bytes{1});
        CHECK_FALSE(verify_chain(ledger));
    }
    SUBCASE("block number changed") {
        ledger.blocks[2].number = 7;
        CHECK_FALSE(verify_chain(ledger));
    }
    SUBCASE("prev link swapped") {
        ledger.blocks[4].prev_hash = ledger.blocks[1].block_hash;
        CHECK_FALSE(verify_chain(ledger));
    }
    SUBCASE("validity flag flipped") {
        ledger.blocks[3].validity[0] = false;
        CHECK_FALSE(verify_chain(ledger, one_of_e1()));
    }
    SUBCASE("endorsement forged") {
        ledger.blocks[3].txs[0].endorsements[0].endorser_id = "mallory";
        CHECK_FALSE(verify_chain(ledger, one_of_e1()));
    }
}

TEST_CASE("transactions round-trip through canonical bytes") {
    ReadWriteSet rw;
    rw.reads.emplace_back("alpha", 3);
    rw.writes.emplace_back("beta", Bytes{1, 2, 3});
    Transaction tx = make_tx("t9", rw, {"e1", "e2"});
    tx.proposal.args = {Bytes{'x'}, Bytes{}};
    tx.proposal.submit_time = 1.25;

    ByteWriter w;
    tx.encode(w);
    ByteReader r(w.data());
    Transaction back = Transaction::decode(r);
    CHECK(r.done());

    ByteWriter w2;
    back.encode(w2);
    CHECK(w.data() == w2.data());
}

TEST_CASE("ledger round-trips through canonical bytes") {
    const Ledger ledger = build_ledger(10);
    const Bytes bytes = ledger.canonical();
    const Ledger back = Ledger::decode(bytes);
    CHECK(back.canonical() == bytes);
    CHECK(back.blocks.size() == ledger.blocks.size());
    CHECK(back.state == ledger.state);
    CHECK(verify_chain(back, one_of_e1()));
}

TEST_CASE("decoding rejects trailing garbage and bad validity flags") {
    const Ledger ledger = build_ledger(2);
    Bytes bytes = ledger.canonical();

    Bytes extended = bytes;
    extended.push_back(0x00);
    CHECK_THROWS_AS(Ledger::decode(extended), std::runtime_error);

    Bytes cut(bytes.begin(), bytes.end() - 1);
    CHECK_THROWS_AS(Ledger::decode(cut), std::runtime_error);
}
