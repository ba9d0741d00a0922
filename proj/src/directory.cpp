#include "gridecon/directory.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace gridecon::market {

bool matches(const AttrMap& attrs, const AttrClause& clause) {
    auto it = attrs.find(clause.key);
    if (it == attrs.end()) return false;
    switch (clause.op) {
        case AttrClause::Op::eq:
            return it->second == clause.value;
        case AttrClause::Op::at_least: {
            const auto* have = std::get_if<std::int64_t>(&it->second);
            const auto* want = std::get_if<std::int64_t>(&clause.value);
            return have && want && *have >= *want;
        }
    }
    return false;
}

bool matches_all(const AttrMap& attrs, const std::vector<AttrClause>& filter) {
    return std::all_of(filter.begin(), filter.end(),
                       [&](const AttrClause& c) { return matches(attrs, c); });
}

std::string model_name(NegotiationModel m) {
    switch (m) {
        case NegotiationModel::commodity: return "commodity";
        case NegotiationModel::posted: return "posted";
        case NegotiationModel::bargain: return "bargain";
        case NegotiationModel::tender: return "tender";
        case NegotiationModel::auction: return "auction";
        case NegotiationModel::proportional: return "proportional";
    }
    return "?";
}

std::optional<NegotiationModel> parse_model(const std::string& name) {
    for (auto m : {NegotiationModel::commodity, NegotiationModel::posted,
                   NegotiationModel::bargain, NegotiationModel::tender,
                   NegotiationModel::auction, NegotiationModel::proportional})
        if (model_name(m) == name) return m;
    return std::nullopt;
}

bool PostedSpecial::applies(SimTime t, const std::string& consumer) const {
    if (t < conditions.window_start || t >= conditions.window_end) return false;
    if (cpu_seconds_left() <= 0) return false;
    if (!conditions.consumer_classes.empty() && !conditions.consumer_classes.count(consumer))
        return false;
    return true;
}

std::string MarketDirectory::publish(ServiceOffer offer, SimTime now) {
    if (offer.offer_id.empty()) throw std::invalid_argument("offer needs an id");
    if (offers_.count(offer.offer_id))
        throw std::invalid_argument("duplicate offer id: " + offer.offer_id);
    if (offer.attributes.empty())
        throw std::invalid_argument("offer " + offer.offer_id + " has no attributes");
    if (offer.valid_until <= now)
        throw std::invalid_argument("offer " + offer.offer_id + " already expired");
    offer.pricing.validate();
    std::string id = offer.offer_id;
    offers_.emplace(id, std::move(offer));
    return id;
}

void MarketDirectory::withdraw(const std::string& offer_id) {
    if (!offers_.erase(offer_id))
        throw std::invalid_argument("unknown offer: " + offer_id);
    std::erase_if(specials_,
                  [&](const auto& kv) { return kv.second.base_offer == offer_id; });
}

bool MarketDirectory::has_offer(const std::string& offer_id) const {
    return offers_.count(offer_id) > 0;
}

const ServiceOffer& MarketDirectory::offer(const std::string& offer_id) const {
    auto it = offers_.find(offer_id);
    if (it == offers_.end()) throw std::invalid_argument("unknown offer: " + offer_id);
    return it->second;
}

std::vector<ServiceOffer> MarketDirectory::query(const std::vector<AttrClause>& filter,
                                                 SimTime t) const {
    std::vector<ServiceOffer> out;
    for (const auto& [id, offer] : offers_) {
        if (offer.valid_until < t) continue;
        if (!provider_available(offer.provider)) continue;
        if (!matches_all(offer.attributes, filter)) continue;
        out.push_back(offer);
    }
    std::sort(out.begin(), out.end(), [](const ServiceOffer& a, const ServiceOffer& b) {
        if (a.provider != b.provider) return a.provider < b.provider;
        return a.offer_id < b.offer_id;
    });
    return out;
}

namespace {

// Lowest regular band rate anywhere inside [start, end); a special may not
// beat this from above.
Rate min_band_rate(const PriceSchedule& schedule, SimTime start, SimTime end) {
    Rate lowest = schedule.band_rate(start);
    SimTime t = start;
    for (int guard = 0; guard < 1000 && t < end; ++guard) {
        lowest = std::min(lowest, schedule.band_rate(t));
        t = schedule.calendar.next_band_change(t);
    }
    return lowest;
}

}  // namespace

std::string MarketDirectory::post_special(PostedSpecial special, SimTime now) {
    if (special.offer_id.empty()) throw std::invalid_argument("special needs an id");
    if (specials_.count(special.offer_id) || offers_.count(special.offer_id))
        throw std::invalid_argument("duplicate offer id: " + special.offer_id);
    auto base = offers_.find(special.base_offer);
    if (base == offers_.end())
        throw std::invalid_argument("unknown base offer: " + special.base_offer);
    const auto& cond = special.conditions;
    if (cond.window_start >= cond.window_end)
        throw std::invalid_argument("special " + special.offer_id + " has an empty window");
    if (cond.window_end <= now)
        throw std::invalid_argument("special " + special.offer_id + " window already past");
    if (cond.max_cpu_seconds <= 0)
        throw std::invalid_argument("special " + special.offer_id + " offers no capacity");
    if (special.special_rate.per_cpu_second < 0)
        throw std::invalid_argument("special rate cannot be negative");
    Rate regular = min_band_rate(base->second.pricing, cond.window_start, cond.window_end);
    if (special.special_rate.per_cpu_second > regular.per_cpu_second)
        throw std::invalid_argument("special " + special.offer_id + " (rate " +
                                    std::to_string(special.special_rate.per_cpu_second) +
                                    ") above regular price " +
                                    std::to_string(regular.per_cpu_second));
    std::string id = special.offer_id;
    specials_.emplace(id, std::move(special));
    return id;
}

std::vector<PostedSpecial> MarketDirectory::active_specials(SimTime t,
                                                            const std::string& consumer) const {
    std::vector<PostedSpecial> out;
    for (const auto& [id, sp] : specials_)
        if (sp.applies(t, consumer) && provider_available(offer(sp.base_offer).provider))
            out.push_back(sp);
    std::sort(out.begin(), out.end(), [](const PostedSpecial& a, const PostedSpecial& b) {
        return a.offer_id < b.offer_id;
    });
    return out;
}

void MarketDirectory::consume_special(const std::string& special_id,
                                      std::int64_t cpu_seconds) {
    auto it = specials_.find(special_id);
    if (it == specials_.end())
        throw std::invalid_argument("unknown special: " + special_id);
    if (cpu_seconds < 0) throw std::invalid_argument("negative consumption");
    if (cpu_seconds > it->second.cpu_seconds_left())
        throw std::runtime_error("special " + special_id + " capacity exhausted");
    it->second.cpu_seconds_used += cpu_seconds;
}

void MarketDirectory::set_provider_available(const std::string& provider, bool available) {
    provider_available_[provider] = available;
}

bool MarketDirectory::provider_available(const std::string& provider) const {
    auto it = provider_available_.find(provider);
    return it == provider_available_.end() || it->second;
}

std::string MarketDirectory::announce_tender(std::string manager, DealTemplate deal,
                                             SimTime now) {
    if (deal.expiration <= now)
        throw std::invalid_argument("tender must expire strictly after announcement");
    std::string id = "tender-" + std::to_string(++next_tender_);
    tenders_.push_back({id, std::move(manager), std::move(deal)});
    return id;
}

std::vector<TenderNotice> MarketDirectory::open_tenders(SimTime t) const {
    std::vector<TenderNotice> out;
    for (const auto& tn : tenders_)
        if (tn.deal.expiration > t) out.push_back(tn);
    return out;
}

namespace {

nlohmann::json attr_json(const AttrMap& attrs) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : attrs)
        std::visit([&](const auto& x) { j[k] = x; }, v);
    return j;
}

nlohmann::json schedule_json(const PriceSchedule& s) {
    nlohmann::json j{
        {"peak_time_price", s.peak_time_price.per_cpu_second},
        {"lunch_time_price", s.lunch_time_price.per_cpu_second},
        {"offpeak_time_price", s.offpeak_time_price.per_cpu_second},
        {"price_holiday_time", s.price_holiday_time.per_cpu_second},
        {"discount_when_lightly_loaded", s.discount_when_lightly_loaded},
        {"raise_price_high_demand", s.raise_price_high_demand},
    };
    if (!s.per_consumer_overrides.empty()) {
        nlohmann::json o = nlohmann::json::object();
        for (const auto& [consumer, rate] : s.per_consumer_overrides)
            o[consumer] = rate.per_cpu_second;
        j["per_consumer_overrides"] = o;
    }
    return j;
}

}  // namespace

std::string MarketDirectory::dump_json(SimTime now) const {
    nlohmann::json j;
    j["time"] = now;
    j["offers"] = nlohmann::json::array();
    for (const auto& offer : query({}, now)) {
        nlohmann::json models = nlohmann::json::array();
        for (auto m : offer.negotiation_models) models.push_back(model_name(m));
        j["offers"].push_back({{"offer_id", offer.offer_id},
                               {"provider", offer.provider},
                               {"resource", offer.resource_ref},
                               {"attributes", attr_json(offer.attributes)},
                               {"negotiation_models", models},
                               {"valid_until", offer.valid_until},
                               {"pricing", schedule_json(offer.pricing)}});
    }
    j["specials"] = nlohmann::json::array();
    for (const auto& [id, sp] : specials_) {
        nlohmann::json c{{"window_start", sp.conditions.window_start},
                         {"window_end", sp.conditions.window_end},
                         {"max_cpu_seconds", sp.conditions.max_cpu_seconds}};
        if (!sp.conditions.consumer_classes.empty())
            c["consumer_classes"] = sp.conditions.consumer_classes;
        j["specials"].push_back({{"offer_id", id},
                                 {"base_offer", sp.base_offer},
                                 {"special_rate", sp.special_rate.per_cpu_second},
                                 {"conditions", c},
                                 {"cpu_seconds_used", sp.cpu_seconds_used}});
    }
    j["open_tenders"] = nlohmann::json::array();
    for (const auto& tn : open_tenders(now))
        j["open_tenders"].push_back({{"tender_id", tn.tender_id},
                                     {"manager", tn.manager},
                                     {"expiration", tn.deal.expiration},
                                     {"jobs", tn.deal.job_count},
                                     {"cpu_seconds_per_job", tn.deal.cpu_seconds_per_job}});
    std::vector<std::string> down;
    for (const auto& [p, ok] : provider_available_)
        if (!ok) down.push_back(p);
    j["unavailable_providers"] = down;
    return j.dump(2);
}

}  // namespace gridecon::market
