#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "meshchain/ledger.hpp"

namespace meshchain {

// Outcome of simulating a chaincode function against a state snapshot.
// A failed simulation becomes an endorsement rejection, not an exception.
struct SimulationResult {
    std::optional<ReadWriteSet> rwset;
    std::string error;

    bool ok() const { return rwset.has_value(); }

    static SimulationResult success(ReadWriteSet rw) {
        return SimulationResult{std::move(rw), {}};
    }
    static SimulationResult failure(std::string msg) {
        return SimulationResult{std::nullopt, std::move(msg)};
    }
};

using ChaincodeFn =
    std::function<SimulationResult(const WorldState& state, const TxProposal& proposal)>;

class ChaincodeRegistry {
public:
    void add(const std::string& chaincode_id, ChaincodeFn fn);
    bool has(const std::string& chaincode_id) const;

    // Runs the named chaincode read-only against the snapshot. Unknown
    // chaincode ids fail the simulation.
    SimulationResult simulate(const WorldState& state, const TxProposal& proposal) const;

private:
    std::map<std::string, ChaincodeFn> chaincodes_;
};

// Registry with the bundled compensation chaincode installed.
const ChaincodeRegistry& default_registry();

SimulationResult simulate_chaincode(const WorldState& state, const TxProposal& proposal);

}  // namespace meshchain
