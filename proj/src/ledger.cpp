#include "gridecon/ledger.hpp"

namespace gridecon::econ {

void Ledger::open_account(const std::string& id) {
    accounts_.try_emplace(id, Money{0});
}

Money Ledger::balance(const std::string& id) const {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw UnknownAccount(id);
    return it->second;
}

void Ledger::mint(const std::string& to, Money amount, SimTime t, const std::string& memo) {
    if (amount.units < 0) throw std::invalid_argument("mint: negative amount");
    auto [it, inserted] = accounts_.try_emplace(to, Money{0});
    it->second += amount;
    journal_.push_back({t, kMintAccount, to, amount, memo});
}

std::uint64_t Ledger::transfer(const std::string& from, const std::string& to, Money amount,
                               SimTime t, const std::string& memo) {
    if (amount.units < 0) throw std::invalid_argument("transfer: negative amount");
    auto src = accounts_.find(from);
    if (src == accounts_.end()) throw UnknownAccount(from);
    auto dst = accounts_.find(to);
    if (dst == accounts_.end()) throw UnknownAccount(to);
    if (src->second < amount) throw InsufficientFunds(from, amount, src->second);
    src->second -= amount;
    dst->second += amount;
    journal_.push_back({t, from, to, amount, memo});
    return journal_.size() - 1;
}

Money Ledger::total() const {
    Money sum{0};
    for (const auto& [id, bal] : accounts_) sum += bal;
    return sum;
}

}  // namespace gridecon::econ
