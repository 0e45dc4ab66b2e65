#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meshchain/chaincode.hpp"
#include "meshchain/ledger.hpp"

namespace meshchain {

// Currency amounts are integer micro-units so that zero-sum balances
// hold as exact equalities.
using Micro = int64_t;
constexpr Micro kMicroPerUnit = 1'000'000;

std::string micro_to_string(Micro amount);

enum class RecordKind : uint8_t { Contribution = 0, Consumption = 1 };

struct ResourceRecord {
    std::string participant;
    RecordKind kind = RecordKind::Contribution;
    uint64_t quantity = 0;
    Micro unit_value = 0;  // micro-currency per unit
    std::string period;

    Bytes encode() const;
    static ResourceRecord decode(const Bytes& bytes);
};

struct BalanceSheet {
    std::string period;
    std::map<std::string, Micro> balances;
};

struct Transfer {
    std::string payer;
    std::string payee;
    Micro amount = 0;
};

struct Settlement {
    std::vector<Transfer> transfers;
};

// The bundled chaincode. Functions:
//   record(participant, kind, quantity, unit_value_micro, period)
//     appends rec/<period>/<participant>/<seq> and bumps the seq key;
//     the seq read makes concurrent records by one participant conflict
//     under MVCC.
//   query_balance(participant, period)
//     read-only; empty write set.
SimulationResult compensation_chaincode(const WorldState& state, const TxProposal& proposal);

// Collects the valid committed records of one accounting period.
std::vector<ResourceRecord> collect_records(const Ledger& ledger, const std::string& period);

// Zero-sum balances: each participant's consumption share of the total
// contributed value is charged against what it contributed. Shares are
// apportioned by largest remainder so the sheet sums to zero exactly.
BalanceSheet compute_balances(const Ledger& ledger, const std::string& period);
BalanceSheet compute_balances(const std::vector<ResourceRecord>& records,
                              const std::string& period);

// Greedy settlement: repeatedly match the largest debtor with the
// largest creditor (ties by id). At most P-1 transfers; applying them
// zeroes the sheet.
Settlement settle(const BalanceSheet& sheet);

}  // namespace meshchain
