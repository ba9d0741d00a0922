#include "gridecon/dataecon.hpp"

#include <algorithm>
#include <stdexcept>

#include "gridecon/bargain.hpp"
#include "gridecon/tender.hpp"

namespace gridecon::data {

void SiteCapacity::validate() const {
    if (max_mb_per_day < 0)
        throw std::invalid_argument("site capacity cannot be negative");
}

void TokenTariff::validate() const {
    if (peak_tokens_per_mb < 0 || offpeak_tokens_per_mb < 0)
        throw std::invalid_argument("token tariffs cannot be negative");
    calendar.validate();
}

Money provision_tokens(SiteCapacity capacity) {
    capacity.validate();
    return Money{capacity.max_mb_per_day};  // one token per MB of daily capacity
}

AdmitResult admit(std::int64_t mb, SimTime t, TokenBucket& bucket, const TokenTariff& tariff) {
    if (mb <= 0) throw std::invalid_argument("data request needs a positive MB count");
    std::int64_t cost;
    if (__builtin_mul_overflow(mb, tariff.tokens_per_mb(t), &cost))
        throw std::overflow_error("token charge overflow");
    AdmitResult res;
    res.required = Money{cost};
    res.available = bucket.balance;
    if (bucket.balance >= res.required) {
        bucket.balance -= res.required;
        res.granted = true;
        res.charged = res.required;
    } else {
        res.reason = "insufficient tokens";
    }
    return res;
}

void renew(std::vector<TokenBucket>& buckets, Money provisioned,
           const std::map<std::string, std::int64_t>& demand_weights) {
    if (provisioned.units < 0) throw std::invalid_argument("provisioned pool cannot be negative");
    std::int64_t total = 0;
    for (const auto& [user, w] : demand_weights) {
        if (w < 0) throw std::invalid_argument("demand weight for " + user + " is negative");
        if (__builtin_add_overflow(total, w, &total))
            throw std::overflow_error("demand weight overflow");
    }
    if (total == 0) throw std::invalid_argument("demand weights sum to zero");

    // make sure every weighted user has a bucket, in deterministic order
    for (const auto& [user, w] : demand_weights) {
        (void)w;
        auto it = std::find_if(buckets.begin(), buckets.end(),
                               [&](const TokenBucket& b) { return b.user == user; });
        if (it == buckets.end()) buckets.push_back({user, Money{0}, Money{0}});
    }
    std::sort(buckets.begin(), buckets.end(),
              [](const TokenBucket& a, const TokenBucket& b) { return a.user < b.user; });

    for (auto& b : buckets) {
        auto it = demand_weights.find(b.user);
        std::int64_t w = it == demand_weights.end() ? 0 : it->second;
        __int128 share = static_cast<__int128>(provisioned.units) * w / total;
        b.allocation = Money{static_cast<std::int64_t>(share)};
        b.balance = b.allocation;
    }
}

ExtraTokensOutcome negotiate_extra_tokens_bargain(TokenBucket& requestor, TokenBucket& holder,
                                                  const BargainTerms& terms) {
    using econ::Rate;
    Money limit = std::min(terms.holder_max, holder.balance);  // never promise beyond the balance
    auto session = trading::make_bargain_session(
        holder.user, requestor.user, Rate{std::min(terms.holder_opening, limit).units},
        Rate{terms.holder_step.units}, Rate{limit.units}, Rate{terms.requestor_opening.units},
        Rate{terms.requestor_step.units}, Rate{terms.requestor_min.units}, terms.max_rounds);
    auto done = trading::negotiate_bargain(session);

    ExtraTokensOutcome out;
    out.rounds = done.round;
    out.counterparty = holder.user;
    if (done.state != trading::BargainSession::State::agreed) return out;
    Money moved{done.agreed_rate.per_cpu_second};
    holder.balance -= moved;
    requestor.balance += moved;
    out.granted = true;
    out.moved = moved;
    return out;
}

ExtraTokensOutcome negotiate_extra_tokens_tender(TokenBucket& requestor,
                                                 std::vector<TokenBucket*> holders, Money needed,
                                                 const std::map<std::string, std::int64_t>& asks,
                                                 SimTime t) {
    if (needed.units <= 0) throw std::invalid_argument("token shortfall must be positive");

    trading::Tender tender;
    tender.tender_id = "tokens:" + requestor.user;
    tender.manager = requestor.user;
    tender.deal.addressee = requestor.user;
    tender.deal.job_count = 1;
    tender.deal.cpu_seconds_per_job = needed.units;
    tender.deal.bid_specification = "token transfer";
    tender.deal.expiration = t;

    std::vector<trading::ProviderSnapshot> snaps;
    for (const auto* h : holders) {
        if (h->user == requestor.user || h->balance < needed) continue;
        auto it = asks.find(h->user);
        if (it == asks.end()) continue;  // silent holders do not bid
        trading::ProviderSnapshot s;
        s.gsp = h->user;
        s.quoted_rate = econ::Rate{it->second};
        snaps.push_back(std::move(s));
    }
    auto bids = trading::collect_bids(tender, snaps, t);
    auto decided = trading::award_tender(std::move(tender), bids, t);

    ExtraTokensOutcome out;
    if (decided.state != trading::Tender::State::awarded) return out;
    for (auto* h : holders) {
        if (h->user != decided.winner) continue;
        h->balance -= needed;
        requestor.balance += needed;
        out.granted = true;
        out.moved = needed;
        out.counterparty = h->user;
        break;
    }
    return out;
}

DataSite::DataSite(sim::SimEngine& engine, std::string site_id, SiteCapacity capacity,
                   TokenTariff tariff)
    : engine_(engine), site_id_(std::move(site_id)), capacity_(capacity), tariff_(std::move(tariff)) {
    capacity_.validate();
    tariff_.validate();
}

void DataSite::provision(const std::map<std::string, std::int64_t>& demand_weights) {
    provisioned_ = provision_tokens(capacity_);
    buckets_.clear();
    renew(buckets_, provisioned_, demand_weights);
    served_mb_today_ = 0;
    engine_.trace().append({engine_.now(), site_id_, "provision", site_id_, "",
                            provisioned_.units,
                            std::to_string(buckets_.size()) + " buckets"});
}

AdmitResult DataSite::request(const std::string& user, std::int64_t mb) {
    auto res = admit(mb, engine_.now(), bucket(user), tariff_);
    if (res.granted) served_mb_today_ += mb;
    std::string detail = "mb=" + std::to_string(mb) +
                         (res.granted ? " granted"
                                      : " denied need=" + std::to_string(res.required.units) +
                                            " have=" + std::to_string(res.available.units));
    engine_.trace().append({engine_.now(), user, "data_access", site_id_, "",
                            res.granted ? std::optional<std::int64_t>(res.charged.units)
                                        : std::nullopt,
                            detail});
    return res;
}

void DataSite::renew_day(const std::map<std::string, std::int64_t>& demand_weights) {
    if (engine_.now() % econ::kSecondsPerDay != 0)
        throw std::logic_error("token renewal happens at day boundaries only");
    renew(buckets_, provisioned_, demand_weights);
    served_mb_today_ = 0;
    engine_.trace().append(
        {engine_.now(), site_id_, "token_renewal", site_id_, "", provisioned_.units, ""});
}

const TokenBucket& DataSite::bucket(const std::string& user) const {
    for (const auto& b : buckets_)
        if (b.user == user) return b;
    throw std::invalid_argument("no token bucket for " + user + " at " + site_id_);
}

TokenBucket& DataSite::bucket(const std::string& user) {
    for (auto& b : buckets_)
        if (b.user == user) return b;
    throw std::invalid_argument("no token bucket for " + user + " at " + site_id_);
}

}  // namespace gridecon::data
