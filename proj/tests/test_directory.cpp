#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "gridecon/directory.hpp"
#include "gridecon/rng.hpp"

using namespace gridecon::market;
using gridecon::econ::Rate;

namespace {

PriceSchedule flat(std::int64_t rate) {
    PriceSchedule s;
    s.peak_time_price = s.lunch_time_price = s.offpeak_time_price = s.price_holiday_time =
        Rate{rate};
    return s;
}

ServiceOffer linux_offer(std::string id, std::string provider, std::int64_t rate = 2) {
    ServiceOffer o;
    o.offer_id = std::move(id);
    o.provider = std::move(provider);
    o.resource_ref = o.provider + "-cluster";
    o.attributes = {{"os", std::string("Linux")},
                    {"arch", std::string("x86")},
                    {"memory-MB", std::int64_t{256}},
                    {"node-count", std::int64_t{4}}};
    o.pricing = flat(rate);
    o.negotiation_models = {NegotiationModel::commodity};
    o.valid_until = 1000000;
    return o;
}

}  // namespace

TEST_CASE("published offers are queryable until expiry") {
    MarketDirectory gmd;
    auto id = gmd.publish(linux_offer("off-1", "gsp-a"), 0);
    CHECK(id == "off-1");
    auto all = gmd.query({}, 10);
    REQUIRE(all.size() == 1);
    CHECK(all[0].offer_id == "off-1");

    // expiry boundary: valid_until = t-1 is excluded, = t is included
    CHECK(gmd.query({}, 1000000).size() == 1);
    CHECK(gmd.query({}, 1000001).empty());
}

TEST_CASE("publish validation") {
    MarketDirectory gmd;
    auto expired = linux_offer("off-1", "gsp-a");
    expired.valid_until = 5;
    CHECK_THROWS_AS(gmd.publish(expired, 10), std::invalid_argument);
    CHECK_THROWS_AS(gmd.publish(expired, 5), std::invalid_argument);

    gmd.publish(linux_offer("off-1", "gsp-a"), 0);
    CHECK_THROWS_AS(gmd.publish(linux_offer("off-1", "gsp-b"), 0), std::invalid_argument);

    auto bare = linux_offer("off-2", "gsp-a");
    bare.attributes.clear();
    CHECK_THROWS_AS(gmd.publish(bare, 0), std::invalid_argument);
}

TEST_CASE("query orders by provider then offer id") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("z-off", "gsp-b"), 0);
    gmd.publish(linux_offer("a-off", "gsp-b"), 0);
    gmd.publish(linux_offer("m-off", "gsp-a"), 0);
    auto all = gmd.query({}, 1);
    REQUIRE(all.size() == 3);
    CHECK(all[0].offer_id == "m-off");
    CHECK(all[1].offer_id == "a-off");
    CHECK(all[2].offer_id == "z-off");
    // re-query with no mutation: identical results
    auto again = gmd.query({}, 1);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].offer_id == again[i].offer_id);
}

TEST_CASE("attribute filters use eq for labels and at-least for numbers") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("off-1", "gsp-a"), 0);
    std::vector<AttrClause> want_linux{
        {"os", AttrClause::Op::eq, std::string("Linux")},
        {"arch", AttrClause::Op::eq, std::string("x86")},
        {"memory-MB", AttrClause::Op::at_least, std::int64_t{128}},
    };
    CHECK(gmd.query(want_linux, 1).size() == 1);

    std::vector<AttrClause> want_windows{{"os", AttrClause::Op::eq, std::string("Windows")}};
    CHECK(gmd.query(want_windows, 1).empty());

    std::vector<AttrClause> want_big{{"memory-MB", AttrClause::Op::at_least, std::int64_t{512}}};
    CHECK(gmd.query(want_big, 1).empty());

    // at_least against a string attribute never matches
    std::vector<AttrClause> odd{{"os", AttrClause::Op::at_least, std::int64_t{1}}};
    CHECK(gmd.query(odd, 1).empty());

    // missing key never matches
    std::vector<AttrClause> missing{{"gpu", AttrClause::Op::eq, std::string("none")}};
    CHECK(gmd.query(missing, 1).empty());
}

TEST_CASE("query on an empty directory is empty") {
    MarketDirectory gmd;
    CHECK(gmd.query({}, 0).empty());
}

TEST_CASE("query membership is exactly predicate satisfaction") {
    gridecon::sim::Rng rng(2024);
    MarketDirectory gmd;
    const std::vector<std::string> oses{"Linux", "Windows", "Solaris"};
    for (int i = 0; i < 40; ++i) {
        ServiceOffer o;
        o.offer_id = "off-" + std::to_string(i);
        o.provider = "gsp-" + std::to_string(rng.below(5));
        o.resource_ref = "r";
        o.attributes["os"] = oses[rng.below(oses.size())];
        o.attributes["memory-MB"] = rng.range(64, 1024);
        if (rng.below(2)) o.attributes["node-count"] = rng.range(1, 64);
        o.pricing = flat(rng.range(1, 9));
        o.valid_until = rng.range(50, 500);
        gmd.publish(o, 0);
    }
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AttrClause> filter;
        if (rng.below(2))
            filter.push_back({"os", AttrClause::Op::eq, oses[rng.below(oses.size())]});
        if (rng.below(2))
            filter.push_back({"memory-MB", AttrClause::Op::at_least, rng.range(64, 1024)});
        if (rng.below(3) == 0)
            filter.push_back({"node-count", AttrClause::Op::at_least, rng.range(1, 64)});
        SimTime t = rng.range(0, 600);
        auto result = gmd.query(filter, t);
        std::set<std::string> in_result;
        for (const auto& o : result) in_result.insert(o.offer_id);
        // every published offer is in the result iff unexpired and matching
        for (int i = 0; i < 40; ++i) {
            std::string id = "off-" + std::to_string(i);
            const auto& o = gmd.offer(id);
            bool expect = o.valid_until >= t && matches_all(o.attributes, filter);
            CHECK(in_result.count(id) == (expect ? 1u : 0u));
        }
    }
}

TEST_CASE("specials must not exceed the regular price in their window") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("base", "gsp-a", 4), 0);

    PostedSpecial ok;
    ok.offer_id = "sp-1";
    ok.base_offer = "base";
    ok.special_rate = Rate{2};
    ok.conditions = {5 * 86400, 7 * 86400, 100000, {}};  // the weekend
    CHECK(gmd.post_special(ok, 0) == "sp-1");

    PostedSpecial too_high = ok;
    too_high.offer_id = "sp-2";
    too_high.special_rate = Rate{5};
    CHECK_THROWS_AS(gmd.post_special(too_high, 0), std::invalid_argument);

    PostedSpecial dangling = ok;
    dangling.offer_id = "sp-3";
    dangling.base_offer = "nothing";
    CHECK_THROWS_AS(gmd.post_special(dangling, 0), std::invalid_argument);
}

TEST_CASE("special windows honour the cheapest band they straddle") {
    MarketDirectory gmd;
    auto o = linux_offer("base", "gsp-a");
    o.pricing = flat(4);
    o.pricing.price_holiday_time = Rate{1};
    gmd.publish(o, 0);

    // window covering Friday offpeak and Saturday holiday: regular minimum is 1
    PostedSpecial sp;
    sp.offer_id = "sp-1";
    sp.base_offer = "base";
    sp.special_rate = Rate{2};
    sp.conditions = {4 * 86400 + 70000, 5 * 86400 + 3600, 1000, {}};
    CHECK_THROWS_AS(gmd.post_special(sp, 0), std::invalid_argument);
    sp.special_rate = Rate{1};
    CHECK(gmd.post_special(sp, 0) == "sp-1");
}

TEST_CASE("specials apply within window, class, and cap") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("base", "gsp-a", 4), 0);
    PostedSpecial sp;
    sp.offer_id = "sp-1";
    sp.base_offer = "base";
    sp.special_rate = Rate{2};
    sp.conditions = {100, 200, 600, {"students"}};
    gmd.post_special(sp, 0);

    CHECK(gmd.active_specials(150, "students").size() == 1);
    CHECK(gmd.active_specials(150, "faculty").empty());
    CHECK(gmd.active_specials(99, "students").empty());
    CHECK(gmd.active_specials(200, "students").empty());  // half-open window

    // first-come first-served against the CPU-second cap
    gmd.consume_special("sp-1", 400);
    gmd.consume_special("sp-1", 200);
    CHECK_THROWS_AS(gmd.consume_special("sp-1", 1), std::runtime_error);
    CHECK(gmd.active_specials(150, "students").empty());
}

TEST_CASE("unavailable providers drop out of queries until restored") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("off-1", "gsp-a"), 0);
    gmd.publish(linux_offer("off-2", "gsp-b"), 0);
    gmd.set_provider_available("gsp-a", false);
    auto res = gmd.query({}, 1);
    REQUIRE(res.size() == 1);
    CHECK(res[0].provider == "gsp-b");
    gmd.set_provider_available("gsp-a", true);
    CHECK(gmd.query({}, 1).size() == 2);
}

TEST_CASE("withdraw removes the offer and its specials") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("off-1", "gsp-a", 4), 0);
    PostedSpecial sp;
    sp.offer_id = "sp-1";
    sp.base_offer = "off-1";
    sp.special_rate = Rate{1};
    sp.conditions = {0, 100, 10, {}};
    gmd.post_special(sp, 0);
    gmd.withdraw("off-1");
    CHECK(gmd.query({}, 1).empty());
    CHECK(gmd.active_specials(50, "u").empty());
    CHECK_THROWS_AS(gmd.withdraw("off-1"), std::invalid_argument);
}

TEST_CASE("tender notices stay open until expiration") {
    MarketDirectory gmd;
    DealTemplate deal;
    deal.addressee = "user-1";
    deal.eligibility = {{"os", AttrClause::Op::eq, std::string("Linux")}};
    deal.job_count = 10;
    deal.cpu_seconds_per_job = 300;
    deal.expiration = 60;
    auto id = gmd.announce_tender("broker-1", deal, 0);
    CHECK(id == "tender-1");
    CHECK(gmd.open_tenders(30).size() == 1);
    CHECK(gmd.open_tenders(60).empty());
    deal.expiration = 0;
    CHECK_THROWS_AS(gmd.announce_tender("broker-1", deal, 0), std::invalid_argument);
}

TEST_CASE("directory dump is valid json with sorted offers") {
    MarketDirectory gmd;
    gmd.publish(linux_offer("off-2", "gsp-b", 3), 0);
    gmd.publish(linux_offer("off-1", "gsp-a", 2), 0);
    auto parsed = nlohmann::json::parse(gmd.dump_json(10));
    REQUIRE(parsed["offers"].size() == 2);
    CHECK(parsed["offers"][0]["offer_id"] == "off-1");
    CHECK(parsed["offers"][0]["pricing"]["peak_time_price"] == 2);
    CHECK(parsed["offers"][1]["provider"] == "gsp-b");
    CHECK(parsed["offers"][0]["attributes"]["os"] == "Linux");
}

TEST_CASE("negotiation model names round-trip") {
    for (auto m : {NegotiationModel::commodity, NegotiationModel::posted,
                   NegotiationModel::bargain, NegotiationModel::tender,
                   NegotiationModel::auction, NegotiationModel::proportional})
        CHECK(parse_model(model_name(m)) == m);
    CHECK(!parse_model("dutch-book"));
}
