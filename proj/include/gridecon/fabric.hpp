#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridecon/directory.hpp"
#include "gridecon/kernel.hpp"
#include "gridecon/ledger.hpp"
#include "gridecon/price_schedule.hpp"
#include "gridecon/rational.hpp"
#include "gridecon/shares.hpp"
#include "gridecon/tender.hpp"

namespace gridecon::fabric {

using econ::Duration;
using econ::Money;
using econ::Rate;
using econ::Rational;
using econ::SimTime;

struct ResourceSpec {
    std::string resource_id;
    std::string organization;
    std::string location;
    int node_count = 1;
    market::AttrMap attributes;
    econ::PriceSchedule schedule;
    Rate reserve_rate{};
    double availability_fraction = 1.0;  // share of nodes open to this community
    enum class Sharing { space_shared, bid_proportional };
    Sharing sharing = Sharing::space_shared;

    void validate() const;
    // whole nodes the community can actually occupy
    int usable_nodes() const {
        return static_cast<int>(node_count * availability_fraction + 1e-9);
    }
};

struct JobExecution {
    std::string job_id;
    std::string resource_id;
    std::string owner;  // broker or user account that pays
    SimTime submitted = 0;
    SimTime start = 0;
    Duration nominal_cpu_seconds = 0;
    Rate rate_at_start{};  // locked at admission
    enum class State { queued, running, done, failed };
    State state = State::queued;
    SimTime finish = 0;
    Money charged{0};
};

using JobCallback = std::function<void(const JobExecution&)>;

// One provider-side resource plus its trading agent: executes jobs under
// negotiated per-CPU-second contracts, charges the ledger on completion,
// and reports load/availability to the market.
class Provider {
public:
    Provider(sim::SimEngine& engine, econ::Ledger& ledger, ResourceSpec spec,
             std::string gsp_id, market::MarketDirectory* gmd = nullptr);

    const std::string& id() const { return gsp_id_; }
    const ResourceSpec& spec() const { return spec_; }

    void set_contract(const std::string& owner, Rate rate);
    std::optional<Rate> contract_rate(const std::string& owner) const;

    int usable_nodes() const;
    bool has_free_slot() const;
    double current_load() const;
    bool in_outage() const;

    enum class Admission { started, queued, rejected };
    // Space-shared entry: needs a contract; the rate is locked now even if
    // the job waits in the FIFO queue.
    Admission submit_job(const std::string& job_id, const std::string& owner,
                         Duration nominal_cpu_seconds, bool queue_if_busy,
                         JobCallback on_finish = {});

    // Bid-proportional entry: remaining work drains at (bid share x nodes)
    // CPU-seconds per second, recomputed whenever the bid set changes.
    void submit_proportional(const std::string& job_id, const std::string& owner,
                             Duration nominal_cpu_seconds, Money bid,
                             JobCallback on_finish = {});
    void set_proportional_bid(const std::string& owner, Money bid);
    std::map<std::string, Rational> current_shares() const;

    void inject_node_loss(int nodes);
    void inject_outage(Duration duration);

    // busy-node-seconds over the window divided by the community's slice of
    // the machine
    double utilization(SimTime window_start, SimTime window_end) const;

    trading::ProviderSnapshot snapshot(SimTime t, const std::string& consumer) const;

    const std::map<std::string, JobExecution>& jobs() const { return jobs_; }
    std::int64_t completed_count() const { return completed_; }
    std::int64_t failed_count() const { return failed_; }
    Money earned() const { return earned_; }

private:
    struct PropJob {
        std::string job_id;
        Money bid{};
        Rational remaining{0};
        JobCallback on_finish;
    };

    void record_busy();
    void start_job(const std::string& job_id);
    void complete_job(const std::string& job_id);
    void fail_job(const std::string& job_id, const std::string& why);
    void start_queued();
    void trace(const std::string& kind, const std::string& job,
               std::optional<std::int64_t> amount, const std::string& detail);

    // bid-proportional internals: exact rational bookkeeping between events
    void prop_advance(Rational target);
    void prop_reschedule();
    Rational prop_speed(const std::string& owner) const;

    sim::SimEngine& engine_;
    econ::Ledger& ledger_;
    ResourceSpec spec_;
    std::string gsp_id_;
    market::MarketDirectory* gmd_ = nullptr;

    std::map<std::string, Rate> contracts_;
    std::map<std::string, JobExecution> jobs_;
    std::map<std::string, JobCallback> callbacks_;
    std::map<std::string, std::uint64_t> job_gen_;  // stale-event guards
    std::vector<std::string> running_order_;        // oldest start first
    std::deque<std::string> queue_;
    int running_ = 0;
    int lost_nodes_ = 0;
    SimTime outage_until_ = 0;
    std::uint64_t generation_ = 0;  // invalidates stale completion events
    std::int64_t completed_ = 0;
    std::int64_t failed_ = 0;
    Money earned_{0};

    std::vector<std::pair<SimTime, int>> busy_log_;  // step function of busy nodes

    std::map<std::string, PropJob> prop_jobs_;  // one active job per owner
    Rational prop_clock_{0};
    std::uint64_t prop_generation_ = 0;
};

}  // namespace gridecon::fabric
