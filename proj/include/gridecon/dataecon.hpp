#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridecon/calendar.hpp"
#include "gridecon/kernel.hpp"
#include "gridecon/money.hpp"

namespace gridecon::data {

using econ::Money;
using econ::SimTime;

// What a data site's servers can move in one day.
struct SiteCapacity {
    std::int64_t max_mb_per_day = 0;
    void validate() const;
};

// One consumer's token account at a site.
struct TokenBucket {
    std::string user;
    Money balance{};     // tokens on hand
    Money allocation{};  // this day's grant
};

// Per-MB access prices. Only the calendar's peak band pays the peak rate;
// lunch, off-peak and holidays all ride the off-peak rate.
struct TokenTariff {
    std::int64_t peak_tokens_per_mb = 10;
    std::int64_t offpeak_tokens_per_mb = 6;
    econ::Calendar calendar;
    void validate() const;

    std::int64_t tokens_per_mb(SimTime t) const {
        return calendar.band_at(t) == econ::PriceBand::peak ? peak_tokens_per_mb
                                                            : offpeak_tokens_per_mb;
    }
};

// One token per MB of daily capacity.
Money provision_tokens(SiteCapacity capacity);

struct AdmitResult {
    bool granted = false;
    Money charged{};    // tokens debited (zero when denied)
    Money required{};   // what the transfer would cost
    Money available{};  // balance when the decision was made
    std::string reason;
};

// Atomic admission: debits the bucket iff it covers the charge; a denial
// changes nothing and reports required vs available.
AdmitResult admit(std::int64_t mb, SimTime t, TokenBucket& bucket, const TokenTariff& tariff);

// Daily renewal: every balance and allocation is reset to the provisioned
// pool split by normalized demand weight (missing users weigh zero).
// Throws when the weights sum to zero.
void renew(std::vector<TokenBucket>& buckets, Money provisioned,
           const std::map<std::string, std::int64_t>& demand_weights);

// --- re-distribution of tokens between consumers ---------------------------

struct ExtraTokensOutcome {
    bool granted = false;
    Money moved{};
    std::string counterparty;
    int rounds = 0;
};

// Haggling over how many tokens change hands: the holder's offer rises from
// `holder_opening` by `holder_step` up to `holder_max` (clamped to its
// balance); the requestor's demand falls from `requestor_opening` by
// `requestor_step` down to `requestor_min`. The first round where the offer
// covers the demand transfers the requestor's standing demand.
struct BargainTerms {
    Money holder_opening{};
    Money holder_step{};
    Money holder_max{};
    Money requestor_opening{};
    Money requestor_step{};
    Money requestor_min{};
    int max_rounds = 8;
};

// Delegates to the bilateral bargaining protocol with token quantities in
// the price slot. On agreement the agreed quantity moves from holder to
// requestor; abandonment leaves both untouched.
ExtraTokensOutcome negotiate_extra_tokens_bargain(TokenBucket& requestor, TokenBucket& holder,
                                                  const BargainTerms& terms);

// Delegates to the tender protocol: holders whose balance covers `needed`
// bid their ask; the lowest ask (ties by user id) transfers the tokens. No
// eligible holder leaves every balance unchanged.
ExtraTokensOutcome negotiate_extra_tokens_tender(TokenBucket& requestor,
                                                 std::vector<TokenBucket*> holders, Money needed,
                                                 const std::map<std::string, std::int64_t>& asks,
                                                 SimTime t);

// A Data Grid site: provisions tokens from capacity, admits transfers
// against per-user buckets, renews grants at day boundaries, and writes a
// `data_access` trace record per decision.
class DataSite {
public:
    DataSite(sim::SimEngine& engine, std::string site_id, SiteCapacity capacity,
             TokenTariff tariff);

    // (re)derives the token pool and splits it by demand weight
    void provision(const std::map<std::string, std::int64_t>& demand_weights);

    AdmitResult request(const std::string& user, std::int64_t mb);

    // day-boundary renewal; rejects instants that are not midnight
    void renew_day(const std::map<std::string, std::int64_t>& demand_weights);

    Money provisioned() const { return provisioned_; }
    const TokenBucket& bucket(const std::string& user) const;
    TokenBucket& bucket(const std::string& user);
    const std::vector<TokenBucket>& buckets() const { return buckets_; }
    std::int64_t served_mb_today() const { return served_mb_today_; }
    const std::string& id() const { return site_id_; }
    const TokenTariff& tariff() const { return tariff_; }

private:
    sim::SimEngine& engine_;
    std::string site_id_;
    SiteCapacity capacity_;
    TokenTariff tariff_;
    Money provisioned_{};
    std::vector<TokenBucket> buckets_;
    std::int64_t served_mb_today_ = 0;
};

}  // namespace gridecon::data
