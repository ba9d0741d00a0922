#include "gridecon/scenario.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gridecon::scenario {

using json = nlohmann::json;
using Kind = ScenarioError::Kind;

namespace {

[[noreturn]] void fail(Kind k, const std::string& field, const std::string& why) {
    throw ScenarioError(k, field, why);
}

std::string sub(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

std::string elem(const std::string& base, const std::string& key, std::size_t i) {
    return sub(base, key) + "[" + std::to_string(i) + "]";
}

const char* type_name(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return "null";
        case json::value_t::object: return "object";
        case json::value_t::array: return "array";
        case json::value_t::string: return "string";
        case json::value_t::boolean: return "boolean";
        case json::value_t::number_float: return "number";
        default: return j.is_number() ? "integer" : "value";
    }
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(Kind::parse, path, std::string("expected an object, got ") + type_name(j));
}

void expect_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(Kind::parse, path, std::string("expected an array, got ") + type_name(j));
}

// Unknown keys are rejected so typos surface instead of silently defaulting.
void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known) fail(Kind::parse, sub(path, key), "unknown field");
    }
}

std::int64_t as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(Kind::parse, path, std::string("expected an integer, got ") + type_name(j));
    return j.get<std::int64_t>();
}

std::int64_t need_int(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(Kind::parse, sub(path, key), "missing required field");
    return as_int(*it, sub(path, key));
}

std::int64_t get_int(const json& obj, const char* key, const std::string& path, std::int64_t def) {
    auto it = obj.find(key);
    return it == obj.end() ? def : as_int(*it, sub(path, key));
}

std::string as_str(const json& j, const std::string& path) {
    if (!j.is_string()) fail(Kind::parse, path, std::string("expected a string, got ") + type_name(j));
    return j.get<std::string>();
}

std::string need_str(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(Kind::parse, sub(path, key), "missing required field");
    return as_str(*it, sub(path, key));
}

std::string get_str(const json& obj, const char* key, const std::string& path, const std::string& def) {
    auto it = obj.find(key);
    return it == obj.end() ? def : as_str(*it, sub(path, key));
}

double get_num(const json& obj, const char* key, const std::string& path, double def) {
    auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_number()) fail(Kind::parse, sub(path, key), std::string("expected a number, got ") + type_name(*it));
    return it->get<double>();
}

econ::Calendar parse_calendar(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"epoch_weekday", "holidays", "peak_start", "peak_end", "lunch_start", "lunch_end"});
    econ::Calendar cal;
    if (auto it = j.find("epoch_weekday"); it != j.end()) {
        try {
            cal.epoch_weekday = econ::parse_weekday(as_str(*it, sub(path, "epoch_weekday")));
        } catch (const std::invalid_argument& e) {
            fail(Kind::parse, sub(path, "epoch_weekday"), e.what());
        }
    }
    if (auto it = j.find("holidays"); it != j.end()) {
        expect_array(*it, sub(path, "holidays"));
        cal.holidays.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string p = sub(path, "holidays") + "[" + std::to_string(i) + "]";
            try {
                cal.holidays.insert(econ::parse_weekday(as_str((*it)[i], p)));
            } catch (const std::invalid_argument& e) {
                fail(Kind::parse, p, e.what());
            }
        }
    }
    cal.peak_start = static_cast<std::int32_t>(get_int(j, "peak_start", path, cal.peak_start));
    cal.peak_end = static_cast<std::int32_t>(get_int(j, "peak_end", path, cal.peak_end));
    cal.lunch_start = static_cast<std::int32_t>(get_int(j, "lunch_start", path, cal.lunch_start));
    cal.lunch_end = static_cast<std::int32_t>(get_int(j, "lunch_end", path, cal.lunch_end));
    return cal;
}

econ::PriceSchedule parse_schedule(const json& j, const std::string& path,
                                   const econ::Calendar& default_calendar) {
    expect_object(j, path);
    check_keys(j, path,
               {"flat_price", "peak_time_price", "lunch_time_price", "offpeak_time_price",
                "price_holiday_time", "discount_when_lightly_loaded", "raise_price_high_demand",
                "per_consumer_overrides", "calendar"});
    econ::PriceSchedule s;
    s.calendar = default_calendar;
    if (auto it = j.find("flat_price"); it != j.end()) {
        for (const char* banned : {"peak_time_price", "lunch_time_price", "offpeak_time_price",
                                   "price_holiday_time"})
            if (j.contains(banned))
                fail(Kind::parse, sub(path, banned), "flat_price already sets every band price");
        econ::Rate flat{as_int(*it, sub(path, "flat_price"))};
        s.peak_time_price = s.lunch_time_price = s.offpeak_time_price = s.price_holiday_time = flat;
    } else {
        s.peak_time_price = econ::Rate{need_int(j, "peak_time_price", path)};
        s.lunch_time_price = econ::Rate{need_int(j, "lunch_time_price", path)};
        s.offpeak_time_price = econ::Rate{need_int(j, "offpeak_time_price", path)};
        s.price_holiday_time = econ::Rate{need_int(j, "price_holiday_time", path)};
    }
    s.discount_when_lightly_loaded =
        static_cast<int>(get_int(j, "discount_when_lightly_loaded", path, 0));
    s.raise_price_high_demand = static_cast<int>(get_int(j, "raise_price_high_demand", path, 0));
    if (auto it = j.find("per_consumer_overrides"); it != j.end()) {
        expect_object(*it, sub(path, "per_consumer_overrides"));
        for (const auto& [consumer, rate] : it->items())
            s.per_consumer_overrides[consumer] =
                econ::Rate{as_int(rate, sub(sub(path, "per_consumer_overrides"), consumer))};
    }
    if (auto it = j.find("calendar"); it != j.end())
        s.calendar = parse_calendar(*it, sub(path, "calendar"));
    return s;
}

market::AttrMap parse_attrs(const json& j, const std::string& path) {
    expect_object(j, path);
    market::AttrMap attrs;
    for (const auto& [key, value] : j.items()) {
        const std::string p = sub(path, key);
        if (value.is_string())
            attrs[key] = value.get<std::string>();
        else if (value.is_number_integer())
            attrs[key] = value.get<std::int64_t>();
        else
            fail(Kind::parse, p, "attribute values must be strings or integers");
    }
    return attrs;
}

std::vector<market::AttrClause> parse_clauses(const json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<market::AttrClause> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        expect_object(j[i], p);
        check_keys(j[i], p, {"key", "op", "value"});
        market::AttrClause c;
        c.key = need_str(j[i], "key", p);
        std::string op = get_str(j[i], "op", p, "eq");
        if (op == "eq")
            c.op = market::AttrClause::Op::eq;
        else if (op == "at_least")
            c.op = market::AttrClause::Op::at_least;
        else
            fail(Kind::parse, sub(p, "op"), "expected \"eq\" or \"at_least\", got \"" + op + "\"");
        auto it = j[i].find("value");
        if (it == j[i].end()) fail(Kind::parse, sub(p, "value"), "missing required field");
        if (it->is_string())
            c.value = it->get<std::string>();
        else if (it->is_number_integer())
            c.value = it->get<std::int64_t>();
        else
            fail(Kind::parse, sub(p, "value"), "expected a string or integer");
        out.push_back(std::move(c));
    }
    return out;
}

market::ServiceOffer parse_offer(const json& j, const std::string& path, const ProviderDef& owner,
                                 const Scenario& sc) {
    expect_object(j, path);
    check_keys(j, path, {"offer_id", "resource_ref", "price_schedule", "negotiation_models",
                         "valid_until", "attributes"});
    market::ServiceOffer off;
    off.offer_id = need_str(j, "offer_id", path);
    off.provider = owner.id;
    off.resource_ref = get_str(j, "resource_ref", path, owner.resource.resource_id);
    off.pricing = j.contains("price_schedule")
                      ? parse_schedule(j["price_schedule"], sub(path, "price_schedule"), sc.calendar)
                      : owner.resource.schedule;
    off.valid_until = get_int(j, "valid_until", path, sc.stop_time);

    auto it = j.find("negotiation_models");
    if (it == j.end()) fail(Kind::parse, sub(path, "negotiation_models"), "missing required field");
    expect_array(*it, sub(path, "negotiation_models"));
    for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = sub(path, "negotiation_models") + "[" + std::to_string(i) + "]";
        std::string name = as_str((*it)[i], p);
        auto model = market::parse_model(name);
        if (!model) fail(Kind::dangling_reference, p, "unknown negotiation model \"" + name + "\"");
        off.negotiation_models.insert(*model);
    }

    // an offer advertises its resource's attributes, refined by its own
    off.attributes = owner.resource.attributes;
    if (auto at = j.find("attributes"); at != j.end())
        for (auto& [k, v] : parse_attrs(*at, sub(path, "attributes"))) off.attributes[k] = v;
    return off;
}

market::PostedSpecial parse_special(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"special_id", "base_offer", "special_rate", "window_start", "window_end",
                         "max_cpu_seconds", "consumer_classes"});
    market::PostedSpecial sp;
    sp.offer_id = need_str(j, "special_id", path);
    sp.base_offer = need_str(j, "base_offer", path);
    sp.special_rate = econ::Rate{need_int(j, "special_rate", path)};
    sp.conditions.window_start = need_int(j, "window_start", path);
    sp.conditions.window_end = need_int(j, "window_end", path);
    sp.conditions.max_cpu_seconds = need_int(j, "max_cpu_seconds", path);
    if (auto it = j.find("consumer_classes"); it != j.end()) {
        expect_array(*it, sub(path, "consumer_classes"));
        for (std::size_t i = 0; i < it->size(); ++i)
            sp.conditions.consumer_classes.insert(
                as_str((*it)[i], sub(path, "consumer_classes") + "[" + std::to_string(i) + "]"));
    }
    return sp;
}

ProviderDef parse_provider(const json& j, const std::string& path, const Scenario& sc) {
    expect_object(j, path);
    check_keys(j, path, {"id", "resource", "offers", "specials"});
    ProviderDef def;
    def.id = need_str(j, "id", path);

    auto rit = j.find("resource");
    if (rit == j.end()) fail(Kind::parse, sub(path, "resource"), "missing required field");
    const std::string rpath = sub(path, "resource");
    expect_object(*rit, rpath);
    check_keys(*rit, rpath,
               {"resource_id", "organization", "location", "node_count", "availability", "sharing",
                "attributes", "price_schedule", "reserve_rate"});
    auto& r = def.resource;
    r.resource_id = need_str(*rit, "resource_id", rpath);
    r.organization = get_str(*rit, "organization", rpath, "");
    r.location = get_str(*rit, "location", rpath, "");
    r.node_count = static_cast<int>(need_int(*rit, "node_count", rpath));
    r.availability_fraction = get_num(*rit, "availability", rpath, 1.0);
    std::string sharing = get_str(*rit, "sharing", rpath, "space_shared");
    if (sharing == "space_shared")
        r.sharing = fabric::ResourceSpec::Sharing::space_shared;
    else if (sharing == "bid_proportional")
        r.sharing = fabric::ResourceSpec::Sharing::bid_proportional;
    else
        fail(Kind::parse, sub(rpath, "sharing"),
             "expected \"space_shared\" or \"bid_proportional\", got \"" + sharing + "\"");
    if (auto it = rit->find("attributes"); it != rit->end())
        r.attributes = parse_attrs(*it, sub(rpath, "attributes"));
    auto sit = rit->find("price_schedule");
    if (sit == rit->end()) fail(Kind::parse, sub(rpath, "price_schedule"), "missing required field");
    r.schedule = parse_schedule(*sit, sub(rpath, "price_schedule"), sc.calendar);
    r.reserve_rate = econ::Rate{get_int(*rit, "reserve_rate", rpath, 0)};
    // advertise the community's slice of the machine unless the author already did
    r.attributes.try_emplace("node-count", static_cast<std::int64_t>(r.usable_nodes()));

    if (auto it = j.find("offers"); it != j.end()) {
        expect_array(*it, sub(path, "offers"));
        for (std::size_t i = 0; i < it->size(); ++i)
            def.offers.push_back(parse_offer((*it)[i], elem(path, "offers", i), def, sc));
    }
    if (auto it = j.find("specials"); it != j.end()) {
        expect_array(*it, sub(path, "specials"));
        for (std::size_t i = 0; i < it->size(); ++i)
            def.specials.push_back(parse_special((*it)[i], elem(path, "specials", i)));
    }
    return def;
}

BrokerDef parse_broker(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"id", "deadline", "budget", "mode", "eligibility", "offers", "jobs",
                         "negotiation", "epoch_seconds", "ema_alpha", "start_at"});
    BrokerDef def;
    def.id = need_str(j, "id", path);
    def.requirements.deadline = need_int(j, "deadline", path);
    def.requirements.budget = econ::Money{need_int(j, "budget", path)};
    std::string mode = get_str(j, "mode", path, "cost_opt");
    auto parsed_mode = broker::parse_mode(mode);
    if (!parsed_mode)
        fail(Kind::parse, sub(path, "mode"),
             "expected \"cost_opt\" or \"time_opt\", got \"" + mode + "\"");
    def.requirements.mode = *parsed_mode;
    if (auto it = j.find("eligibility"); it != j.end())
        def.requirements.eligibility = parse_clauses(*it, sub(path, "eligibility"));
    if (auto it = j.find("offers"); it != j.end()) {
        expect_array(*it, sub(path, "offers"));
        for (std::size_t i = 0; i < it->size(); ++i)
            def.requirements.offer_allowlist.insert(
                as_str((*it)[i], sub(path, "offers") + "[" + std::to_string(i) + "]"));
    }

    auto jit = j.find("jobs");
    if (jit == j.end()) fail(Kind::parse, sub(path, "jobs"), "missing required field");
    const std::string jpath = sub(path, "jobs");
    if (jit->is_object()) {
        check_keys(*jit, jpath, {"count", "cpu_seconds"});
        std::int64_t count = need_int(*jit, "count", jpath);
        std::int64_t cpu = need_int(*jit, "cpu_seconds", jpath);
        if (count < 0) fail(Kind::invariant, sub(jpath, "count"), "job count cannot be negative");
        int width = 1;
        for (std::int64_t c = count; c >= 10; c /= 10) ++width;
        for (std::int64_t i = 1; i <= count; ++i) {
            std::string n = std::to_string(i);
            def.jobs.push_back({def.id + "-j" + std::string(width - n.size(), '0') + n, cpu});
        }
    } else if (jit->is_array()) {
        for (std::size_t i = 0; i < jit->size(); ++i) {
            const std::string p = jpath + "[" + std::to_string(i) + "]";
            expect_object((*jit)[i], p);
            check_keys((*jit)[i], p, {"job_id", "cpu_seconds"});
            def.jobs.push_back({need_str((*jit)[i], "job_id", p), need_int((*jit)[i], "cpu_seconds", p)});
        }
    } else {
        fail(Kind::parse, jpath, "expected {count, cpu_seconds} or a job array");
    }

    if (auto it = j.find("negotiation"); it != j.end()) {
        const std::string npath = sub(path, "negotiation");
        expect_object(*it, npath);
        check_keys(*it, npath, {"model", "bargain_open", "bargain_step", "bargain_max_rounds",
                                "gsp_concession_step", "tender_wait", "auction_kind"});
        auto& n = def.config.negotiation;
        std::string model = get_str(*it, "model", npath, "commodity");
        auto parsed = market::parse_model(model);
        if (!parsed)
            fail(Kind::dangling_reference, sub(npath, "model"),
                 "unknown negotiation model \"" + model + "\"");
        n.model = *parsed;
        n.bargain_open = econ::Rate{get_int(*it, "bargain_open", npath, n.bargain_open.per_cpu_second)};
        n.bargain_step = econ::Rate{get_int(*it, "bargain_step", npath, n.bargain_step.per_cpu_second)};
        n.bargain_max_rounds =
            static_cast<int>(get_int(*it, "bargain_max_rounds", npath, n.bargain_max_rounds));
        n.gsp_concession_step =
            econ::Rate{get_int(*it, "gsp_concession_step", npath, n.gsp_concession_step.per_cpu_second)};
        n.tender_wait = get_int(*it, "tender_wait", npath, n.tender_wait);
        std::string kind = get_str(*it, "auction_kind", npath, "vickrey");
        auto parsed_kind = trading::parse_auction_kind(kind);
        if (!parsed_kind)
            fail(Kind::parse, sub(npath, "auction_kind"), "unknown auction kind \"" + kind + "\"");
        n.auction_kind = *parsed_kind;
    }
    def.config.epoch_seconds = get_int(j, "epoch_seconds", path, def.config.epoch_seconds);
    def.config.ema_alpha = get_num(j, "ema_alpha", path, def.config.ema_alpha);
    def.start_at = get_int(j, "start_at", path, 0);
    return def;
}

DataSiteDef parse_data_site(const json& j, const std::string& path, const Scenario& sc) {
    expect_object(j, path);
    check_keys(j, path, {"id", "max_mb_per_day", "tariff", "users", "requests"});
    DataSiteDef def;
    def.id = need_str(j, "id", path);
    def.capacity.max_mb_per_day = need_int(j, "max_mb_per_day", path);
    def.tariff.calendar = sc.calendar;
    if (auto it = j.find("tariff"); it != j.end()) {
        const std::string tpath = sub(path, "tariff");
        expect_object(*it, tpath);
        check_keys(*it, tpath, {"peak_tokens_per_mb", "offpeak_tokens_per_mb", "calendar"});
        def.tariff.peak_tokens_per_mb =
            get_int(*it, "peak_tokens_per_mb", tpath, def.tariff.peak_tokens_per_mb);
        def.tariff.offpeak_tokens_per_mb =
            get_int(*it, "offpeak_tokens_per_mb", tpath, def.tariff.offpeak_tokens_per_mb);
        if (auto cit = it->find("calendar"); cit != it->end())
            def.tariff.calendar = parse_calendar(*cit, sub(tpath, "calendar"));
    }
    auto uit = j.find("users");
    if (uit == j.end()) fail(Kind::parse, sub(path, "users"), "missing required field");
    expect_object(*uit, sub(path, "users"));
    for (const auto& [user, weight] : uit->items())
        def.users[user] = as_int(weight, sub(sub(path, "users"), user));
    if (auto it = j.find("requests"); it != j.end()) {
        expect_array(*it, sub(path, "requests"));
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string p = elem(path, "requests", i);
            expect_object((*it)[i], p);
            check_keys((*it)[i], p, {"at", "user", "mb"});
            def.requests.push_back({need_int((*it)[i], "at", p), need_str((*it)[i], "user", p),
                                    need_int((*it)[i], "mb", p)});
        }
    }
    return def;
}

template <typename T>
void check_unique(std::set<std::string>& seen, const T& id, const std::string& path,
                  const std::string& what) {
    if (!seen.insert(id).second) fail(Kind::invariant, path, "duplicate " + what + " \"" + id + "\"");
}

void wrap_invariant(const std::string& path, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        fail(Kind::invariant, path, e.what());
    }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(Kind::parse, "", e.what());
    }
    expect_object(doc, "");
    check_keys(doc, "",
               {"seed", "stop_time", "calendar", "providers", "brokers", "data_sites", "notes"});

    Scenario sc;
    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned() && !it->is_number_integer())
            fail(Kind::parse, "seed", "expected an integer");
        if (it->is_number_integer() && it->get<std::int64_t>() < 0 && !it->is_number_unsigned())
            fail(Kind::parse, "seed", "seed cannot be negative");
        sc.seed = it->get<std::uint64_t>();
    }
    sc.stop_time = need_int(doc, "stop_time", "");
    if (auto it = doc.find("calendar"); it != doc.end())
        sc.calendar = parse_calendar(*it, "calendar");
    sc.notes = get_str(doc, "notes", "", "");

    if (auto it = doc.find("providers"); it != doc.end()) {
        expect_array(*it, "providers");
        for (std::size_t i = 0; i < it->size(); ++i)
            sc.providers.push_back(parse_provider((*it)[i], elem("", "providers", i), sc));
    }
    if (auto it = doc.find("brokers"); it != doc.end()) {
        expect_array(*it, "brokers");
        for (std::size_t i = 0; i < it->size(); ++i)
            sc.brokers.push_back(parse_broker((*it)[i], elem("", "brokers", i)));
    }
    if (auto it = doc.find("data_sites"); it != doc.end()) {
        expect_array(*it, "data_sites");
        for (std::size_t i = 0; i < it->size(); ++i)
            sc.data_sites.push_back(parse_data_site((*it)[i], elem("", "data_sites", i), sc));
    }
    return sc;
}

void Scenario::validate() const {
    if (stop_time <= 0) fail(Kind::invariant, "stop_time", "must be positive");
    wrap_invariant("calendar", [&] { calendar.validate(); });

    std::set<std::string> provider_ids, resource_ids, offer_ids, account_ids;
    std::map<std::string, std::string> offer_owner;  // offer id -> provider id
    for (std::size_t i = 0; i < providers.size(); ++i) {
        const auto& p = providers[i];
        const std::string path = elem("", "providers", i);
        if (p.id.empty()) fail(Kind::invariant, sub(path, "id"), "provider id cannot be empty");
        check_unique(provider_ids, p.id, sub(path, "id"), "provider id");
        account_ids.insert(p.id);
        check_unique(resource_ids, p.resource.resource_id, sub(path, "resource.resource_id"),
                     "resource id");
        wrap_invariant(sub(path, "resource"), [&] { p.resource.validate(); });
        for (std::size_t k = 0; k < p.offers.size(); ++k) {
            const auto& off = p.offers[k];
            const std::string opath = elem(path, "offers", k);
            check_unique(offer_ids, off.offer_id, sub(opath, "offer_id"), "offer id");
            offer_owner[off.offer_id] = p.id;
            if (off.resource_ref != p.resource.resource_id) {
                bool exists = false;
                for (const auto& other : providers)
                    exists |= other.resource.resource_id == off.resource_ref;
                if (exists)
                    fail(Kind::invariant, sub(opath, "resource_ref"),
                         "offer must sell its own provider's resource, not \"" + off.resource_ref +
                             "\"");
                fail(Kind::dangling_reference, sub(opath, "resource_ref"),
                     "unknown resource \"" + off.resource_ref + "\"");
            }
            if (off.negotiation_models.empty())
                fail(Kind::invariant, sub(opath, "negotiation_models"),
                     "offer supports no negotiation model");
            if (off.valid_until <= 0)
                fail(Kind::invariant, sub(opath, "valid_until"),
                     "offer expires before the scenario starts");
            wrap_invariant(sub(opath, "price_schedule"), [&] { off.pricing.validate(); });
        }
    }
    std::set<std::string> special_ids;
    for (std::size_t i = 0; i < providers.size(); ++i) {
        const auto& p = providers[i];
        for (std::size_t k = 0; k < p.specials.size(); ++k) {
            const auto& sp = p.specials[k];
            const std::string spath = elem(elem("", "providers", i), "specials", k);
            check_unique(special_ids, sp.offer_id, sub(spath, "special_id"), "special id");
            if (offer_ids.count(sp.offer_id))
                fail(Kind::invariant, sub(spath, "special_id"),
                     "special id collides with offer \"" + sp.offer_id + "\"");
            auto owner = offer_owner.find(sp.base_offer);
            if (owner == offer_owner.end())
                fail(Kind::dangling_reference, sub(spath, "base_offer"),
                     "unknown offer \"" + sp.base_offer + "\"");
            if (owner->second != p.id)
                fail(Kind::invariant, sub(spath, "base_offer"),
                     "special must discount its own provider's offer");
            if (sp.conditions.window_start >= sp.conditions.window_end)
                fail(Kind::invariant, sub(spath, "window_end"), "empty special window");
            if (sp.conditions.max_cpu_seconds <= 0)
                fail(Kind::invariant, sub(spath, "max_cpu_seconds"), "special offers no capacity");
            if (sp.special_rate.per_cpu_second < 0)
                fail(Kind::invariant, sub(spath, "special_rate"), "negative special rate");
        }
    }

    std::set<std::string> broker_ids;
    for (std::size_t i = 0; i < brokers.size(); ++i) {
        const auto& b = brokers[i];
        const std::string path = elem("", "brokers", i);
        if (b.id.empty()) fail(Kind::invariant, sub(path, "id"), "broker id cannot be empty");
        check_unique(broker_ids, b.id, sub(path, "id"), "broker id");
        if (account_ids.count(b.id))
            fail(Kind::invariant, sub(path, "id"),
                 "broker id collides with provider \"" + b.id + "\"");
        if (providers.empty())
            fail(Kind::invariant, "providers", "a broker needs at least one provider");
        wrap_invariant(path, [&] { b.requirements.validate(); });
        std::set<std::string> job_ids;
        for (std::size_t k = 0; k < b.jobs.size(); ++k) {
            const std::string jpath = elem(path, "jobs", k);
            check_unique(job_ids, b.jobs[k].job_id, jpath, "job id");
            if (b.jobs[k].nominal_cpu_seconds <= 0)
                fail(Kind::invariant, sub(jpath, "cpu_seconds"), "jobs need positive cpu time");
        }
        std::size_t k = 0;
        for (const auto& offer_id : b.requirements.offer_allowlist) {
            if (!offer_ids.count(offer_id))
                fail(Kind::dangling_reference, elem(path, "offers", k),
                     "unknown offer \"" + offer_id + "\"");
            ++k;
        }
        if (b.config.epoch_seconds <= 0)
            fail(Kind::invariant, sub(path, "epoch_seconds"), "must be positive");
        if (b.config.ema_alpha < 0.0 || b.config.ema_alpha > 1.0)
            fail(Kind::invariant, sub(path, "ema_alpha"), "must lie in [0, 1]");
        if (b.start_at < 0 || b.start_at >= stop_time)
            fail(Kind::invariant, sub(path, "start_at"), "must lie inside [0, stop_time)");
    }

    std::set<std::string> site_ids;
    for (std::size_t i = 0; i < data_sites.size(); ++i) {
        const auto& d = data_sites[i];
        const std::string path = elem("", "data_sites", i);
        if (d.id.empty()) fail(Kind::invariant, sub(path, "id"), "site id cannot be empty");
        check_unique(site_ids, d.id, sub(path, "id"), "site id");
        wrap_invariant(sub(path, "max_mb_per_day"), [&] { d.capacity.validate(); });
        wrap_invariant(sub(path, "tariff"), [&] { d.tariff.validate(); });
        if (d.users.empty()) fail(Kind::invariant, sub(path, "users"), "a site needs users");
        std::int64_t total_weight = 0;
        for (const auto& [user, w] : d.users) {
            if (w < 0)
                fail(Kind::invariant, sub(sub(path, "users"), user), "negative demand weight");
            total_weight += w;
        }
        if (total_weight == 0)
            fail(Kind::invariant, sub(path, "users"), "demand weights sum to zero");
        for (std::size_t k = 0; k < d.requests.size(); ++k) {
            const auto& r = d.requests[k];
            const std::string rpath = elem(path, "requests", k);
            if (!d.users.count(r.user))
                fail(Kind::dangling_reference, sub(rpath, "user"),
                     "unknown user \"" + r.user + "\"");
            if (r.mb <= 0) fail(Kind::invariant, sub(rpath, "mb"), "must be positive");
            if (r.at < 0 || r.at > stop_time)
                fail(Kind::invariant, sub(rpath, "at"), "must lie inside [0, stop_time]");
        }
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Kind::parse, "", "cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario sc = parse_scenario(buf.str());
    sc.validate();
    return sc;
}

namespace {

json calendar_json(const econ::Calendar& cal) {
    json holidays = json::array();
    for (auto d : cal.holidays) holidays.push_back(econ::weekday_name(d));
    return {{"epoch_weekday", econ::weekday_name(cal.epoch_weekday)},
            {"holidays", holidays},
            {"peak_start", cal.peak_start},
            {"peak_end", cal.peak_end},
            {"lunch_start", cal.lunch_start},
            {"lunch_end", cal.lunch_end}};
}

json schedule_json(const econ::PriceSchedule& s) {
    json j{{"peak_time_price", s.peak_time_price.per_cpu_second},
           {"lunch_time_price", s.lunch_time_price.per_cpu_second},
           {"offpeak_time_price", s.offpeak_time_price.per_cpu_second},
           {"price_holiday_time", s.price_holiday_time.per_cpu_second},
           {"discount_when_lightly_loaded", s.discount_when_lightly_loaded},
           {"raise_price_high_demand", s.raise_price_high_demand},
           {"calendar", calendar_json(s.calendar)}};
    if (!s.per_consumer_overrides.empty()) {
        json o = json::object();
        for (const auto& [consumer, rate] : s.per_consumer_overrides)
            o[consumer] = rate.per_cpu_second;
        j["per_consumer_overrides"] = o;
    }
    return j;
}

json attrs_json(const market::AttrMap& attrs) {
    json j = json::object();
    for (const auto& [k, v] : attrs) {
        if (const auto* n = std::get_if<std::int64_t>(&v))
            j[k] = *n;
        else
            j[k] = std::get<std::string>(v);
    }
    return j;
}

json clauses_json(const std::vector<market::AttrClause>& clauses) {
    json arr = json::array();
    for (const auto& c : clauses) {
        json j{{"key", c.key}, {"op", c.op == market::AttrClause::Op::eq ? "eq" : "at_least"}};
        if (const auto* n = std::get_if<std::int64_t>(&c.value))
            j["value"] = *n;
        else
            j["value"] = std::get<std::string>(c.value);
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
    json doc;
    doc["seed"] = sc.seed;
    doc["stop_time"] = sc.stop_time;
    doc["calendar"] = calendar_json(sc.calendar);
    if (!sc.notes.empty()) doc["notes"] = sc.notes;

    doc["providers"] = json::array();
    for (const auto& p : sc.providers) {
        const auto& r = p.resource;
        json rj{{"resource_id", r.resource_id},
                {"node_count", r.node_count},
                {"availability", r.availability_fraction},
                {"sharing", r.sharing == fabric::ResourceSpec::Sharing::space_shared
                                ? "space_shared"
                                : "bid_proportional"},
                {"attributes", attrs_json(r.attributes)},
                {"price_schedule", schedule_json(r.schedule)},
                {"reserve_rate", r.reserve_rate.per_cpu_second}};
        if (!r.organization.empty()) rj["organization"] = r.organization;
        if (!r.location.empty()) rj["location"] = r.location;

        json offers = json::array();
        for (const auto& off : p.offers) {
            json models = json::array();
            for (auto m : off.negotiation_models) models.push_back(market::model_name(m));
            offers.push_back({{"offer_id", off.offer_id},
                              {"resource_ref", off.resource_ref},
                              {"price_schedule", schedule_json(off.pricing)},
                              {"negotiation_models", models},
                              {"valid_until", off.valid_until},
                              {"attributes", attrs_json(off.attributes)}});
        }
        json specials = json::array();
        for (const auto& sp : p.specials) {
            json classes = json::array();
            for (const auto& c : sp.conditions.consumer_classes) classes.push_back(c);
            specials.push_back({{"special_id", sp.offer_id},
                                {"base_offer", sp.base_offer},
                                {"special_rate", sp.special_rate.per_cpu_second},
                                {"window_start", sp.conditions.window_start},
                                {"window_end", sp.conditions.window_end},
                                {"max_cpu_seconds", sp.conditions.max_cpu_seconds},
                                {"consumer_classes", classes}});
        }
        json pj{{"id", p.id}, {"resource", rj}};
        if (!offers.empty()) pj["offers"] = offers;
        if (!specials.empty()) pj["specials"] = specials;
        doc["providers"].push_back(std::move(pj));
    }

    doc["brokers"] = json::array();
    for (const auto& b : sc.brokers) {
        const auto& n = b.config.negotiation;
        json jobs = json::array();
        for (const auto& job : b.jobs)
            jobs.push_back({{"job_id", job.job_id}, {"cpu_seconds", job.nominal_cpu_seconds}});
        json bj{{"id", b.id},
                {"deadline", b.requirements.deadline},
                {"budget", b.requirements.budget.units},
                {"mode", broker::mode_name(b.requirements.mode)},
                {"jobs", jobs},
                {"negotiation",
                 {{"model", market::model_name(n.model)},
                  {"bargain_open", n.bargain_open.per_cpu_second},
                  {"bargain_step", n.bargain_step.per_cpu_second},
                  {"bargain_max_rounds", n.bargain_max_rounds},
                  {"gsp_concession_step", n.gsp_concession_step.per_cpu_second},
                  {"tender_wait", n.tender_wait},
                  {"auction_kind", trading::auction_kind_name(n.auction_kind)}}},
                {"epoch_seconds", b.config.epoch_seconds},
                {"ema_alpha", b.config.ema_alpha},
                {"start_at", b.start_at}};
        if (!b.requirements.eligibility.empty())
            bj["eligibility"] = clauses_json(b.requirements.eligibility);
        if (!b.requirements.offer_allowlist.empty()) {
            json allow = json::array();
            for (const auto& id : b.requirements.offer_allowlist) allow.push_back(id);
            bj["offers"] = allow;
        }
        doc["brokers"].push_back(std::move(bj));
    }

    if (!sc.data_sites.empty()) {
        doc["data_sites"] = json::array();
        for (const auto& d : sc.data_sites) {
            json users = json::object();
            for (const auto& [user, w] : d.users) users[user] = w;
            json dj{{"id", d.id},
                    {"max_mb_per_day", d.capacity.max_mb_per_day},
                    {"tariff",
                     {{"peak_tokens_per_mb", d.tariff.peak_tokens_per_mb},
                      {"offpeak_tokens_per_mb", d.tariff.offpeak_tokens_per_mb},
                      {"calendar", calendar_json(d.tariff.calendar)}}},
                    {"users", users}};
            if (!d.requests.empty()) {
                json reqs = json::array();
                for (const auto& r : d.requests)
                    reqs.push_back({{"at", r.at}, {"user", r.user}, {"mb", r.mb}});
                dj["requests"] = reqs;
            }
            doc["data_sites"].push_back(std::move(dj));
        }
    }
    return doc.dump(2) + "\n";
}

}  // namespace gridecon::scenario
