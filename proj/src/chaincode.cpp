#include "meshchain/chaincode.hpp"

#include "meshchain/compensation.hpp"

namespace meshchain {

void ChaincodeRegistry::add(const std::string& chaincode_id, ChaincodeFn fn) {
    chaincodes_[chaincode_id] = std::move(fn);
}

bool ChaincodeRegistry::has(const std::string& chaincode_id) const {
    return chaincodes_.count(chaincode_id) > 0;
}

SimulationResult ChaincodeRegistry::simulate(const WorldState& state,
                                             const TxProposal& proposal) const {
    auto it = chaincodes_.find(proposal.chaincode_id);
    if (it == chaincodes_.end()) {
        return SimulationResult::failure("unknown chaincode: " + proposal.chaincode_id);
    }
    return it->second(state, proposal);
}

const ChaincodeRegistry& default_registry() {
    static const ChaincodeRegistry registry = [] {
        ChaincodeRegistry r;
        r.add("compensation", compensation_chaincode);
        return r;
    }();
    return registry;
}

SimulationResult simulate_chaincode(const WorldState& state, const TxProposal& proposal) {
    return default_registry().simulate(state, proposal);
}

}  // namespace meshchain
