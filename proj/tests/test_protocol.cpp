#include <doctest.h>

#include <string>
#include <vector>

#include "meshchain/chaincode.hpp"
#include "meshchain/errors.hpp"
#include "meshchain/kernel.hpp"
#include "meshchain/protocol.hpp"

using namespace meshchain;

namespace {

// Complete graph over the given ids: fast uniform lab-style links.
NetworkGraph complete(const std::vector<std::string>& ids, double cap = 100e6,
                      double lat = 0.0002) {
    std::vector<MeshNode> nodes;
    for (const auto& id : ids) nodes.push_back(MeshNode{id, false});
    std::vector<MeshLink> links;
    for (NodeIndex a = 0; a < ids.size(); ++a) {
        for (NodeIndex b = a + 1; b < ids.size(); ++b) {
            links.push_back(MeshLink{a, b, cap, lat, 0.0});
        }
    }
    return NetworkGraph(std::move(nodes), std::move(links));
}

RoleAssignment lab_roles(size_t n_endorsers = 1) {
    RoleAssignment roles;
    roles.client = "c0";
    roles.orderer = "o0";
    for (size_t i = 0; i < n_endorsers; ++i) roles.endorsers.push_back("e" + std::to_string(i));
    roles.committers = roles.endorsers;
    roles.committers.push_back("m0");
    roles.reference_committer = "m0";
    return roles;
}

std::vector<std::string> lab_ids(size_t n_endorsers = 1) {
    std::vector<std::string> ids{"c0", "o0", "m0"};
    for (size_t i = 0; i < n_endorsers; ++i) ids.push_back("e" + std::to_string(i));
    return ids;
}

EndorsementPolicy policy_of(const RoleAssignment& roles, int k = 1) {
    EndorsementPolicy policy;
    for (const auto& e : roles.endorsers) policy.endorser_set.insert(e);
    policy.required_k = k;
    return policy;
}

TxProposal record_proposal(const std::string& tx_id, const std::string& participant) {
    TxProposal p;
    p.tx_id = tx_id;
    p.chaincode_id = "compensation";
    p.function = "record";
    for (const std::string& a :
         {participant, std::string("contribution"), std::string("5"), std::string("1000000"),
          std::string("P")}) {
        p.args.emplace_back(a.begin(), a.end());
    }
    return p;
}

double hop(const NetworkGraph& g, const std::string& a, const std::string& b, uint64_t bytes) {
    return transfer_time(g, route(g, g.require(a), g.require(b)), bytes);
}

}  // namespace

TEST_CASE("single transaction walks the seven steps on schedule") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    CpuProfile profile;  // 0.3 / 0.13 / 0.05 / 0.01
    MessageSizes sizes;
    OrdererConfig orderer{1, 2.0};
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), profile, sizes, orderer,
                          default_registry());
    kernel.schedule(0.0, [&] { engine.propose(record_proposal("tx0", "alice")); });
    kernel.run();

    REQUIRE(engine.records().size() == 1);
    const TxRecord& r = engine.records()[0];
    CHECK(r.outcome == kOutcomeValid);
    REQUIRE(r.t_endorsed.has_value());
    REQUIRE(r.t_submitted.has_value());
    REQUIRE(r.t_committed.has_value());
    REQUIRE(r.t_notified.has_value());

    const double t_endorsed = hop(g, "c0", "e0", sizes.proposal_bytes) + profile.cost_endorse +
                              hop(g, "e0", "c0", sizes.response_bytes) +
                              profile.cost_client_per_response;
    const double t_submitted = t_endorsed + hop(g, "c0", "o0", sizes.submission_bytes);
    const double t_committed =
        t_submitted + hop(g, "o0", "m0", sizes.block_bytes(1)) + profile.cost_validate_per_tx;
    const double t_notified = t_committed + hop(g, "m0", "c0", sizes.notification_bytes);

    CHECK(r.t_proposed == 0.0);
    CHECK(*r.t_endorsed == doctest::Approx(t_endorsed).epsilon(1e-12));
    CHECK(*r.t_submitted == doctest::Approx(t_submitted).epsilon(1e-12));
    CHECK(*r.t_committed == doctest::Approx(t_committed).epsilon(1e-12));
    CHECK(*r.t_notified == doctest::Approx(t_notified).epsilon(1e-12));
    CHECK(engine.blocks_cut() == 1);
}

TEST_CASE("timestamps never decrease along the flow") {
    NetworkGraph g = complete(lab_ids(2));
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles(2);
    OrdererConfig orderer{3, 0.5};
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          orderer, default_registry());
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 7; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i)));
        }
    });
    kernel.run();

    REQUIRE(engine.records().size() == 7);
    for (const TxRecord& r : engine.records()) {
        CHECK(r.terminal());
        REQUIRE(r.t_committed.has_value());
        CHECK(r.t_proposed <= *r.t_endorsed);
        CHECK(*r.t_endorsed <= *r.t_submitted);
        CHECK(*r.t_submitted <= *r.t_committed);
        CHECK(*r.t_committed <= *r.t_notified);
    }
}

TEST_CASE("every proposal reaches exactly one terminal outcome") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{4, 1.0}, default_registry());
    int terminals = 0;
    engine.on_terminal([&](const TxRecord&) { terminals += 1; });
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 9; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i)));
        }
    });
    kernel.run();

    CHECK(terminals == 9);
    uint64_t valid = 0, invalid = 0, rejected = 0;
    for (const TxRecord& r : engine.records()) {
        valid += r.outcome == kOutcomeValid;
        invalid += r.outcome == kOutcomeInvalid;
        rejected += r.outcome == kOutcomeRejected;
    }
    CHECK(valid + invalid + rejected == 9);
    CHECK(valid == 9);
}

TEST_CASE("duplicate tx ids are refused at proposal time") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{}, default_registry());
    kernel.schedule(0.0, [&] {
        engine.propose(record_proposal("dup", "a"));
        CHECK_THROWS_AS(engine.propose(record_proposal("dup", "b")), ConfigError);
    });
    kernel.run();
}

TEST_CASE("policy endorsers must hold the endorser role") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    EndorsementPolicy policy{{"m0"}, 1};
    CHECK_THROWS_AS(ProtocolEngine(kernel, g, roles, policy, CpuProfile{}, MessageSizes{},
                                   OrdererConfig{}, default_registry()),
                    ConfigError);
}

TEST_CASE("unknown chaincode ends in rejection at the client") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{}, default_registry());
    kernel.schedule(0.0, [&] {
        TxProposal p = record_proposal("bad", "a");
        p.chaincode_id = "missing";
        engine.propose(p);
    });
    kernel.run();
    REQUIRE(engine.records().size() == 1);
    CHECK(engine.records()[0].outcome == kOutcomeRejected);
    CHECK_FALSE(engine.records()[0].t_submitted.has_value());
    CHECK(engine.blocks_cut() == 0);
}

TEST_CASE("endorsement timeout rejects the transaction") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    CpuProfile slow;
    slow.cost_endorse = 60.0;
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), slow, MessageSizes{},
                          OrdererConfig{}, default_registry(), 1.0);
    kernel.schedule(0.0, [&] { engine.propose(record_proposal("slow", "a")); });
    kernel.run();
    REQUIRE(engine.records().size() == 1);
    const TxRecord& r = engine.records()[0];
    CHECK(r.outcome == kOutcomeRejected);
    CHECK(*r.t_notified == doctest::Approx(1.0));
}

TEST_CASE("queries complete locally without touching the orderer") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{}, default_registry());
    kernel.schedule(0.0, [&] {
        TxProposal q;
        q.tx_id = "q0";
        q.chaincode_id = "compensation";
        q.function = "query_balance";
        q.args = {Bytes{'a'}, Bytes{'P'}};
        engine.propose(q);
    });
    kernel.run();
    REQUIRE(engine.records().size() == 1);
    const TxRecord& r = engine.records()[0];
    CHECK(r.outcome == kOutcomeValid);
    CHECK(r.t_endorsed.has_value());
    CHECK_FALSE(r.t_submitted.has_value());
    CHECK_FALSE(r.t_committed.has_value());
    CHECK(engine.blocks_cut() == 0);
    CHECK(engine.reference_ledger().blocks.empty());
}

TEST_CASE("a full pending queue cuts a block at the size limit") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{10, 1000.0}, default_registry());
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 10; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i)));
        }
    });
    kernel.run();
    CHECK(engine.blocks_cut() == 1);
    const Ledger& ledger = engine.reference_ledger();
    REQUIRE(ledger.blocks.size() == 1);
    CHECK(ledger.blocks[0].txs.size() == 10);
}

TEST_CASE("a quiet orderer cuts the partial batch at the timeout") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    OrdererConfig orderer{100, 2.0};
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          orderer, default_registry());
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 5; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i)));
        }
    });
    kernel.run();
    CHECK(engine.blocks_cut() == 1);
    const Ledger& ledger = engine.reference_ledger();
    REQUIRE(ledger.blocks.size() == 1);
    CHECK(ledger.blocks[0].txs.size() == 5);

    // The block waits out the timeout from the oldest submission.
    const TxRecord& first = engine.records()[0];
    REQUIRE(first.t_committed.has_value());
    CHECK(*first.t_committed > *first.t_submitted + orderer.batch_timeout);
}

TEST_CASE("same-instant arrivals order lexicographically in the block") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    CpuProfile zero;
    zero.cost_endorse = 0.0;
    zero.cost_validate_per_tx = 0.0;
    zero.cost_order_per_tx = 0.0;
    zero.cost_client_per_response = 0.0;
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), zero, MessageSizes{},
                          OrdererConfig{2, 2.0}, default_registry());
    kernel.schedule(0.0, [&] {
        engine.propose(record_proposal("tz", "a"));
        engine.propose(record_proposal("ta", "b"));
    });
    kernel.run();
    const Ledger& ledger = engine.reference_ledger();
    REQUIRE(ledger.blocks.size() == 1);
    REQUIRE(ledger.blocks[0].txs.size() == 2);
    CHECK(ledger.blocks[0].txs[0].proposal.tx_id == "ta");
    CHECK(ledger.blocks[0].txs[1].proposal.tx_id == "tz");
}

TEST_CASE("conflicting parallel records split into valid and invalid") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{2, 2.0}, default_registry());
    kernel.schedule(0.0, [&] {
        engine.propose(record_proposal("tx0", "same"));
        engine.propose(record_proposal("tx1", "same"));
    });
    kernel.run();

    uint64_t valid = 0, invalid = 0;
    for (const TxRecord& r : engine.records()) {
        valid += r.outcome == kOutcomeValid;
        invalid += r.outcome == kOutcomeInvalid;
    }
    CHECK(valid == 1);
    CHECK(invalid == 1);

    const Ledger& ledger = engine.reference_ledger();
    CHECK(ledger.state.version_of("seq/P/same") == 1);
}

TEST_CASE("all replicas agree byte for byte and verify") {
    NetworkGraph g = complete(lab_ids(2));
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles(2);
    const EndorsementPolicy policy = policy_of(roles, 2);
    ProtocolEngine engine(kernel, g, roles, policy, CpuProfile{}, MessageSizes{},
                          OrdererConfig{3, 1.0}, default_registry());
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 8; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i % 3)));
        }
    });
    kernel.run();

    const Bytes reference = engine.reference_ledger().canonical();
    for (const auto& id : roles.committers) {
        CHECK(engine.replica(id).canonical() == reference);
    }
    CHECK(verify_chain(engine.reference_ledger(), policy));
    CHECK(engine.reference_ledger().blocks.size() >= 2);
}

TEST_CASE("a 2-of-2 policy still commits when both endorsers agree") {
    NetworkGraph g = complete(lab_ids(2));
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles(2);
    ProtocolEngine engine(kernel, g, roles, policy_of(roles, 2), CpuProfile{}, MessageSizes{},
                          OrdererConfig{1, 1.0}, default_registry());
    kernel.schedule(0.0, [&] { engine.propose(record_proposal("tx0", "a")); });
    kernel.run();
    REQUIRE(engine.records().size() == 1);
    CHECK(engine.records()[0].outcome == kOutcomeValid);
}

TEST_CASE("flush_pending force-cuts a waiting batch") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), CpuProfile{}, MessageSizes{},
                          OrdererConfig{100, 1e9}, default_registry());
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 3; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i)));
        }
    });
    kernel.run(10.0);
    CHECK(engine.blocks_cut() == 0);
    engine.flush_pending();
    kernel.run();
    CHECK(engine.blocks_cut() == 1);
    for (const TxRecord& r : engine.records()) CHECK(r.outcome == kOutcomeValid);
}

TEST_CASE("per-endorser load serializes on the cpu queue") {
    NetworkGraph g = complete(lab_ids());
    SimKernel kernel(g.node_count());
    RoleAssignment roles = lab_roles();
    CpuProfile profile;
    // The default endorse timeout would reject the tail of the queue.
    ProtocolEngine engine(kernel, g, roles, policy_of(roles), profile, MessageSizes{},
                          OrdererConfig{100, 2.0}, default_registry(), 1e9);
    kernel.schedule(0.0, [&] {
        for (int i = 0; i < 100; ++i) {
            engine.propose(record_proposal("tx" + std::to_string(i), "p" + std::to_string(i)));
        }
    });
    kernel.run();
    // 100 proposals on one endorser: the last endorsement completes at
    // least 99 service times after the first.
    std::vector<double> endorsed;
    for (const TxRecord& r : engine.records()) {
        REQUIRE(r.t_endorsed.has_value());
        endorsed.push_back(*r.t_endorsed);
    }
    CHECK(endorsed.back() - endorsed.front() >=
          doctest::Approx(99 * profile.cost_endorse).epsilon(1e-9));
}
