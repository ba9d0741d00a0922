#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridecon/calendar.hpp"
#include "gridecon/money.hpp"

namespace gridecon::econ {

struct UnknownAccount : std::runtime_error {
    explicit UnknownAccount(const std::string& id)
        : std::runtime_error("unknown account: " + id) {}
};

struct InsufficientFunds : std::runtime_error {
    Money needed;
    Money available;
    InsufficientFunds(const std::string& id, Money need, Money have)
        : std::runtime_error("insufficient funds in " + id + ": need " +
                             std::to_string(need.units) + ", have " +
                             std::to_string(have.units)),
          needed(need),
          available(have) {}
};

// Double-entry book for the whole simulation. Balances never go negative;
// transfers conserve the total; units enter only through explicit mint
// (provisioning) entries, which the journal records against the reserved
// account id "*mint*".
class Ledger {
public:
    struct Entry {
        SimTime at = 0;
        std::string from;
        std::string to;
        Money amount;
        std::string memo;
    };

    void open_account(const std::string& id);
    bool has_account(const std::string& id) const { return accounts_.contains(id); }
    Money balance(const std::string& id) const;

    // Provisioning: creates units in `to`. Opens the account if needed.
    void mint(const std::string& to, Money amount, SimTime t, const std::string& memo = "");

    // Atomic transfer; throws UnknownAccount or InsufficientFunds with the
    // ledger left bit-identical. Returns the journal receipt index.
    std::uint64_t transfer(const std::string& from, const std::string& to, Money amount,
                           SimTime t, const std::string& memo = "");

    Money total() const;
    const std::vector<Entry>& journal() const { return journal_; }
    const std::map<std::string, Money>& accounts() const { return accounts_; }

private:
    std::map<std::string, Money> accounts_;
    std::vector<Entry> journal_;
};

inline constexpr const char* kMintAccount = "*mint*";

}  // namespace gridecon::econ
