#include "gridecon/fabric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridecon::fabric {

void ResourceSpec::validate() const {
    if (resource_id.empty()) throw std::invalid_argument("resource needs an id");
    if (node_count < 1)
        throw std::invalid_argument(resource_id + ": node_count must be >= 1");
    if (!(availability_fraction > 0.0) || availability_fraction > 1.0)
        throw std::invalid_argument(resource_id + ": availability_fraction must be in (0, 1]");
    if (sharing == Sharing::bid_proportional && availability_fraction != 1.0)
        throw std::invalid_argument(resource_id +
                                    ": bid-proportional resources must be fully available");
    if (reserve_rate.per_cpu_second < 0)
        throw std::invalid_argument(resource_id + ": negative reserve rate");
    schedule.validate();
}

Provider::Provider(sim::SimEngine& engine, econ::Ledger& ledger, ResourceSpec spec,
                   std::string gsp_id, market::MarketDirectory* gmd)
    : engine_(engine), ledger_(ledger), spec_(std::move(spec)), gsp_id_(std::move(gsp_id)),
      gmd_(gmd) {
    spec_.validate();
    if (!ledger_.has_account(gsp_id_)) ledger_.open_account(gsp_id_);
    busy_log_.emplace_back(engine_.now(), 0);
    prop_clock_ = Rational(engine_.now());
}

void Provider::set_contract(const std::string& owner, Rate rate) {
    if (rate.per_cpu_second < 0) throw std::invalid_argument("negative contract rate");
    contracts_[owner] = rate;
}

std::optional<Rate> Provider::contract_rate(const std::string& owner) const {
    auto it = contracts_.find(owner);
    if (it == contracts_.end()) return std::nullopt;
    return it->second;
}

int Provider::usable_nodes() const {
    return std::max(0, spec_.usable_nodes() - lost_nodes_);
}

bool Provider::has_free_slot() const {
    return !in_outage() && running_ < usable_nodes();
}

bool Provider::in_outage() const { return engine_.now() < outage_until_; }

double Provider::current_load() const {
    if (spec_.sharing == ResourceSpec::Sharing::bid_proportional)
        return prop_jobs_.empty() ? 0.0
                                  : std::min(1.0, static_cast<double>(prop_jobs_.size()) /
                                                      spec_.node_count);
    int usable = usable_nodes();
    if (usable == 0 || in_outage()) return 1.0;
    return static_cast<double>(running_) / usable;
}

void Provider::trace(const std::string& kind, const std::string& job,
                     std::optional<std::int64_t> amount, const std::string& detail) {
    engine_.trace().append({engine_.now(), gsp_id_, kind, spec_.resource_id, job, amount,
                            detail});
}

void Provider::record_busy() {
    int level = spec_.sharing == ResourceSpec::Sharing::bid_proportional
                    ? (prop_jobs_.empty() ? 0 : usable_nodes())
                    : running_;
    if (!busy_log_.empty() && busy_log_.back().first == engine_.now())
        busy_log_.back().second = level;
    else
        busy_log_.emplace_back(engine_.now(), level);
}

Provider::Admission Provider::submit_job(const std::string& job_id, const std::string& owner,
                                         Duration nominal_cpu_seconds, bool queue_if_busy,
                                         JobCallback on_finish) {
    if (spec_.sharing != ResourceSpec::Sharing::space_shared)
        throw std::logic_error(spec_.resource_id + " is bid-proportional; submit a bid");
    auto rate = contract_rate(owner);
    if (!rate)
        throw std::logic_error("no contract between " + owner + " and " + gsp_id_);
    if (nominal_cpu_seconds <= 0)
        throw std::invalid_argument("job " + job_id + " needs positive CPU seconds");
    if (auto it = jobs_.find(job_id); it != jobs_.end()) {
        if (it->second.state != JobExecution::State::failed)
            throw std::invalid_argument("duplicate job id " + job_id);
        jobs_.erase(it);  // re-running a failed job replaces its record
    }

    if (!has_free_slot() && !queue_if_busy) {
        trace("job_rejected", job_id, std::nullopt, "no free node");
        return Admission::rejected;
    }

    JobExecution job;
    job.job_id = job_id;
    job.resource_id = spec_.resource_id;
    job.owner = owner;
    job.submitted = engine_.now();
    job.nominal_cpu_seconds = nominal_cpu_seconds;
    job.rate_at_start = *rate;  // locked at admission
    jobs_.emplace(job_id, job);
    if (on_finish) callbacks_[job_id] = std::move(on_finish);

    if (has_free_slot()) {
        start_job(job_id);
        return Admission::started;
    }
    queue_.push_back(job_id);
    trace("job_queued", job_id, std::nullopt, "");
    return Admission::queued;
}

void Provider::start_job(const std::string& job_id) {
    auto& job = jobs_.at(job_id);
    job.state = JobExecution::State::running;
    job.start = engine_.now();
    ++running_;
    running_order_.push_back(job_id);
    record_busy();
    trace("job_start", job_id, job.rate_at_start.per_cpu_second,
          "rate per cpu-second, " + std::to_string(job.nominal_cpu_seconds) + " s");
    std::uint64_t gen = ++generation_;
    job_gen_[job_id] = gen;
    engine_.schedule(engine_.now() + job.nominal_cpu_seconds, "job_complete",
                     [this, job_id, gen](sim::SimEngine&) {
                         auto it = job_gen_.find(job_id);
                         if (it == job_gen_.end() || it->second != gen) return;
                         complete_job(job_id);
                     });
}

void Provider::complete_job(const std::string& job_id) {
    auto& job = jobs_.at(job_id);
    job.state = JobExecution::State::done;
    job.finish = engine_.now();
    job_gen_.erase(job_id);
    --running_;
    std::erase(running_order_, job_id);
    record_busy();
    Money cost = econ::job_cost(job.nominal_cpu_seconds, job.rate_at_start);
    if (cost.units > 0) ledger_.transfer(job.owner, gsp_id_, cost, engine_.now(), job_id);
    job.charged = cost;
    earned_ += cost;
    ++completed_;
    trace("job_complete", job_id, cost.units, "charged");
    start_queued();
    if (auto cb = callbacks_.find(job_id); cb != callbacks_.end()) {
        auto fn = std::move(cb->second);
        callbacks_.erase(cb);
        fn(job);
    }
}

void Provider::fail_job(const std::string& job_id, const std::string& why) {
    auto& job = jobs_.at(job_id);
    if (job.state == JobExecution::State::running) {
        --running_;
        std::erase(running_order_, job_id);
        record_busy();
    } else if (job.state == JobExecution::State::queued) {
        std::erase(queue_, job_id);
    }
    job.state = JobExecution::State::failed;
    job.finish = engine_.now();
    job_gen_.erase(job_id);
    ++failed_;
    trace("job_failed", job_id, std::nullopt, why);
    if (auto cb = callbacks_.find(job_id); cb != callbacks_.end()) {
        auto fn = std::move(cb->second);
        callbacks_.erase(cb);
        fn(job);
    }
}

void Provider::start_queued() {
    while (!queue_.empty() && has_free_slot()) {
        std::string next = queue_.front();
        queue_.pop_front();
        start_job(next);
    }
}

void Provider::inject_node_loss(int nodes) {
    if (nodes < 1) throw std::invalid_argument("node loss needs a positive count");
    lost_nodes_ = std::min(lost_nodes_ + nodes, spec_.usable_nodes());
    trace("node_loss", "", nodes, std::to_string(usable_nodes()) + " nodes remain");
    // most recently started jobs sat on the lost nodes
    while (running_ > usable_nodes()) fail_job(running_order_.back(), "node lost");
}

void Provider::inject_outage(Duration duration) {
    if (duration <= 0) throw std::invalid_argument("outage needs a positive duration");
    outage_until_ = std::max(outage_until_, engine_.now() + duration);
    trace("outage_start", "", duration, "");
    if (gmd_) gmd_->set_provider_available(gsp_id_, false);
    while (!running_order_.empty()) fail_job(running_order_.back(), "outage");
    engine_.schedule(outage_until_, "outage_end", [this](sim::SimEngine&) {
        if (in_outage()) return;  // a longer outage superseded this one
        trace("outage_end", "", std::nullopt, "");
        if (gmd_) gmd_->set_provider_available(gsp_id_, true);
        start_queued();
    });
}

double Provider::utilization(SimTime window_start, SimTime window_end) const {
    if (window_end <= window_start) throw std::invalid_argument("empty utilization window");
    if (window_end > engine_.now())
        throw std::invalid_argument("utilization window reaches into the future");
    double busy_seconds = 0;
    SimTime cursor = window_start;
    int level = 0;
    for (const auto& [t, lvl] : busy_log_) {
        if (t <= window_start) {
            level = lvl;
            continue;
        }
        SimTime upto = std::min(t, window_end);
        if (upto > cursor) {
            busy_seconds += static_cast<double>(level) * static_cast<double>(upto - cursor);
            cursor = upto;
        }
        if (t >= window_end) break;
        level = lvl;
    }
    if (cursor < window_end)
        busy_seconds += static_cast<double>(level) * static_cast<double>(window_end - cursor);
    double capacity = spec_.node_count * spec_.availability_fraction *
                      static_cast<double>(window_end - window_start);
    return busy_seconds / capacity;
}

trading::ProviderSnapshot Provider::snapshot(SimTime t, const std::string& consumer) const {
    double load = std::clamp(current_load(), 0.0, 1.0);
    return {gsp_id_, spec_.attributes, load, spec_.reserve_rate,
            econ::price_at(spec_.schedule, t, load, consumer)};
}

// ---- bid-proportional sharing ----

std::map<std::string, Rational> Provider::current_shares() const {
    if (prop_jobs_.empty()) return {};
    std::map<std::string, Money> bids;
    for (const auto& [owner, pj] : prop_jobs_) bids[owner] = pj.bid;
    return trading::proportional_shares(bids).shares;
}

void Provider::submit_proportional(const std::string& job_id, const std::string& owner,
                                   Duration nominal_cpu_seconds, Money bid,
                                   JobCallback on_finish) {
    if (spec_.sharing != ResourceSpec::Sharing::bid_proportional)
        throw std::logic_error(spec_.resource_id + " is space-shared; submit a job");
    if (bid.units <= 0) throw std::invalid_argument("proportional bid must be positive");
    if (nominal_cpu_seconds <= 0)
        throw std::invalid_argument("job " + job_id + " needs positive CPU seconds");
    if (auto it = jobs_.find(job_id); it != jobs_.end()) {
        if (it->second.state != JobExecution::State::failed)
            throw std::invalid_argument("duplicate job id " + job_id);
        jobs_.erase(it);
    }
    if (prop_jobs_.count(owner))
        throw std::logic_error(owner + " already has an active job on " + spec_.resource_id);

    prop_advance(Rational(engine_.now()));

    JobExecution job;
    job.job_id = job_id;
    job.resource_id = spec_.resource_id;
    job.owner = owner;
    job.submitted = engine_.now();
    job.start = engine_.now();
    job.nominal_cpu_seconds = nominal_cpu_seconds;
    job.rate_at_start = contract_rate(owner).value_or(Rate{0});
    job.state = JobExecution::State::running;
    jobs_.emplace(job_id, job);
    if (on_finish) callbacks_[job_id] = std::move(on_finish);

    prop_jobs_[owner] = {job_id, bid, Rational(nominal_cpu_seconds), {}};
    record_busy();
    trace("job_start", job_id, bid.units, "bid");
    prop_reschedule();
}

void Provider::set_proportional_bid(const std::string& owner, Money bid) {
    if (bid.units <= 0) throw std::invalid_argument("proportional bid must be positive");
    auto it = prop_jobs_.find(owner);
    if (it == prop_jobs_.end())
        throw std::invalid_argument(owner + " has no active job on " + spec_.resource_id);
    prop_advance(Rational(engine_.now()));
    it->second.bid = bid;
    trace("bid_change", it->second.job_id, bid.units, "");
    prop_reschedule();
}

Rational Provider::prop_speed(const std::string& owner) const {
    auto shares = current_shares();
    return shares.at(owner) * Rational(spec_.node_count);
}

void Provider::prop_advance(Rational target) {
    while (prop_clock_ < target) {
        if (prop_jobs_.empty()) {
            prop_clock_ = target;
            return;
        }
        auto shares = current_shares();
        Rational step_end = target;
        for (const auto& [owner, pj] : prop_jobs_) {
            Rational speed = shares.at(owner) * Rational(spec_.node_count);
            Rational done_at = prop_clock_ + pj.remaining / speed;
            step_end = std::min(step_end, done_at);
        }
        Rational dt = step_end - prop_clock_;
        for (auto& [owner, pj] : prop_jobs_)
            pj.remaining -= shares.at(owner) * Rational(spec_.node_count) * dt;
        prop_clock_ = step_end;

        std::vector<std::string> finished;
        for (const auto& [owner, pj] : prop_jobs_)
            if (pj.remaining <= Rational(0)) finished.push_back(owner);
        for (const auto& owner : finished) {
            std::string job_id = prop_jobs_.at(owner).job_id;
            prop_jobs_.erase(owner);
            auto& job = jobs_.at(job_id);
            job.state = JobExecution::State::done;
            job.finish = engine_.now();
            Money cost = econ::job_cost(job.nominal_cpu_seconds, job.rate_at_start);
            if (cost.units > 0)
                ledger_.transfer(job.owner, gsp_id_, cost, engine_.now(), job_id);
            job.charged = cost;
            earned_ += cost;
            ++completed_;
            record_busy();
            trace("job_complete", job_id, cost.units, "charged");
            if (auto cb = callbacks_.find(job_id); cb != callbacks_.end()) {
                auto fn = std::move(cb->second);
                callbacks_.erase(cb);
                fn(job);
            }
        }
    }
}

void Provider::prop_reschedule() {
    ++prop_generation_;
    if (prop_jobs_.empty()) return;
    auto shares = current_shares();
    Rational earliest{-1};
    for (const auto& [owner, pj] : prop_jobs_) {
        Rational speed = shares.at(owner) * Rational(spec_.node_count);
        Rational done_at = prop_clock_ + pj.remaining / speed;
        if (earliest.num < 0 || done_at < earliest) earliest = done_at;
    }
    SimTime at = std::max(engine_.now(), econ::ceil_to_int(earliest));
    std::uint64_t gen = prop_generation_;
    engine_.schedule(at, "prop_complete", [this, gen](sim::SimEngine&) {
        if (gen != prop_generation_) return;
        prop_advance(Rational(engine_.now()));
        prop_reschedule();
    });
}

}  // namespace gridecon::fabric
