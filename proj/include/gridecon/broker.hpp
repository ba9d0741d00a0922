#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridecon/auction.hpp"
#include "gridecon/directory.hpp"
#include "gridecon/fabric.hpp"
#include "gridecon/kernel.hpp"
#include "gridecon/ledger.hpp"

namespace gridecon::broker {

using econ::Duration;
using econ::Money;
using econ::Rate;
using econ::SimTime;

enum class Mode { cost_opt, time_opt };
std::string mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& name);

struct UserRequirements {
    Duration deadline = 0;  // seconds from submission
    Money budget{};
    Mode mode = Mode::cost_opt;
    std::vector<market::AttrClause> eligibility;
    std::set<std::string> offer_allowlist;  // empty = consider every offer

    void validate() const;
};

struct JobSpec {
    std::string job_id;
    Duration nominal_cpu_seconds = 0;
};

// What the broker has learned about one resource.
struct ResourceProfile {
    std::string gsp;
    std::string resource_id;
    Rate negotiated_rate{};
    Duration estimated_job_duration = 0;  // nominal until the probe measures it
    int capacity_estimate = 1;            // concurrent jobs; corrected by rejections
    double observed_job_rate = 0;         // smoothed completions per epoch
    SimTime last_update = 0;
    bool trusted = true;                  // false after a failure, until a probe succeeds
    bool calibrated = false;
};

struct SchedulePlan {
    std::map<std::string, int> assignments;  // resource-id -> job count this epoch
    Money projected_cost{};
    Duration projected_makespan = 0;
    bool feasible = false;
    std::string reason;  // "deadline" or "budget" when infeasible
};

// Pure planning step, shared by both optimization modes.
//
// cost_opt fills resources in rate order, each up to the number of jobs it
// can finish before the deadline. time_opt assigns one job at a time to the
// resource that would finish it earliest, skipping assignments the budget
// cannot cover.
SchedulePlan make_plan(const std::vector<ResourceProfile>& profiles, int unfinished,
                       Money remaining_budget, Duration remaining_time, Mode mode);

struct ScheduleReport {
    std::string broker;
    Mode mode = Mode::cost_opt;
    std::int64_t jobs_total = 0;
    std::int64_t jobs_completed = 0;
    Money total_cost{};
    Duration makespan = 0;  // submission to last completion
    bool deadline_met = false;
    bool budget_respected = false;
    std::map<std::string, std::int64_t> jobs_per_resource;
    std::map<std::string, Money> cost_per_resource;
    std::map<std::string, Rate> rate_per_resource;
};

// Settlement over a recorded allocation: `counts` jobs of `nominal` seconds
// per resource at the given rates.
ScheduleReport settle_allocation(const std::map<std::string, std::int64_t>& counts,
                                 const std::map<std::string, Rate>& rates, Duration nominal);

struct NegotiationConfig {
    market::NegotiationModel model = market::NegotiationModel::commodity;
    // bargain
    Rate bargain_open{1};
    Rate bargain_step{1};
    int bargain_max_rounds = 16;
    Rate gsp_concession_step{1};
    // tender
    Duration tender_wait = 30;
    // procurement auction: fpsb pays the winning (lowest) ask, vickrey the
    // second-lowest
    trading::AuctionKind auction_kind = trading::AuctionKind::vickrey;
};

struct BrokerConfig {
    Duration epoch_seconds = 60;
    double ema_alpha = 0.5;
    NegotiationConfig negotiation;
};

// One candidate resource after discovery and price negotiation.
struct Candidate {
    std::string offer_id;
    std::string gsp;
    std::string resource_id;
    Rate effective_rate{};
    std::string via;         // commodity | posted | bargain | tender | auction
    std::string special_id;  // set when a posted special beat the quote
};

// The user's scheduling agent: discovers offers, negotiates a rate per
// resource, calibrates with one probe job each, then assigns the remaining
// jobs epoch by epoch under the deadline and budget.
class Broker {
public:
    Broker(sim::SimEngine& engine, econ::Ledger& ledger, market::MarketDirectory& gmd,
           std::map<std::string, fabric::Provider*> providers, std::string id,
           UserRequirements requirements, std::vector<JobSpec> jobs, BrokerConfig config = {});

    // schedules the discovery phase at the current simulation time
    void start();

    bool finished() const { return state_ == State::done; }
    const ScheduleReport& report() const;

    // price discovery, exposed for inspection: candidates sorted by
    // effective rate, then provider id
    std::vector<Candidate> discover(SimTime t);

    const std::vector<ResourceProfile>& profiles() const { return profiles_; }
    const std::string& id() const { return id_; }
    Money committed() const { return committed_; }
    const UserRequirements& requirements() const { return requirements_; }

private:
    enum class State { idle, discovering, calibrating, running, done };

    void trace(const std::string& kind, const std::string& resource, const std::string& job,
               std::optional<std::int64_t> amount, const std::string& detail);
    void begin(SimTime t);
    void finish_discovery(const std::vector<Candidate>& candidates);
    void run_tender_discovery();
    void calibrate();
    void on_probe(const fabric::JobExecution& job);
    void epoch_tick();
    void replan();
    int submit_to(ResourceProfile& profile, int count);
    // Moves the next pooled job onto `profile`'s resource: applies any
    // posted special, locks the cost against the budget, submits, and books
    // the admission. Returns false when nothing was started.
    bool admit_next(ResourceProfile& profile, bool queue_if_busy, bool probe);
    void on_job_finished(const fabric::JobExecution& job);
    void maybe_settle();
    void settle();
    ResourceProfile* profile_for(const std::string& resource_id);

    sim::SimEngine& engine_;
    econ::Ledger& ledger_;
    market::MarketDirectory& gmd_;
    std::map<std::string, fabric::Provider*> providers_;
    std::string id_;
    UserRequirements requirements_;
    BrokerConfig config_;

    std::map<std::string, JobSpec> jobs_;
    std::deque<std::string> pool_;  // unassigned job ids, FIFO
    struct Running {
        std::string resource_id;
        Money locked{};
    };
    std::map<std::string, Running> running_;

    State state_ = State::idle;
    SimTime submitted_at_ = 0;
    SimTime deadline_at_ = 0;
    std::vector<ResourceProfile> profiles_;
    struct SpecialUse {
        std::string special_id;
        Rate base_rate{};  // rate to fall back to once the special is spent
    };
    std::map<std::string, SpecialUse> specials_;  // keyed by resource id
    int probes_outstanding_ = 0;
    std::string pending_tender_id_;
    std::map<std::string, int> running_per_resource_;
    std::set<std::string> reprobing_;  // resources with a recalibration probe in flight

    Money committed_{};  // spent plus locked cost of running jobs
    std::int64_t completed_ = 0;
    SimTime last_completion_ = 0;
    std::map<std::string, std::int64_t> jobs_per_resource_;
    std::map<std::string, Money> cost_per_resource_;
    std::map<std::string, std::int64_t> epoch_completions_;
    ScheduleReport report_;
};

}  // namespace gridecon::broker
