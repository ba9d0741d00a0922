#include "gridecon/broker.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "gridecon/bargain.hpp"
#include "gridecon/quote.hpp"
#include "gridecon/tender.hpp"

namespace gridecon::broker {

std::string mode_name(Mode m) { return m == Mode::cost_opt ? "cost_opt" : "time_opt"; }

std::optional<Mode> parse_mode(const std::string& name) {
    if (name == "cost_opt") return Mode::cost_opt;
    if (name == "time_opt") return Mode::time_opt;
    return std::nullopt;
}

void UserRequirements::validate() const {
    if (deadline <= 0) throw std::invalid_argument("requirements: deadline must be positive");
    if (budget.units <= 0) throw std::invalid_argument("requirements: budget must be positive");
}

namespace {

Money times(Money per, std::int64_t n) {
    std::int64_t r;
    if (__builtin_mul_overflow(per.units, n, &r)) throw std::overflow_error("cost overflow");
    return Money{r};
}

// How many jobs this resource can finish before the clock runs out:
// capacity per wave times the number of whole waves that still fit.
std::int64_t jobs_completable(const ResourceProfile& p, econ::Duration remaining_time) {
    if (p.estimated_job_duration <= 0 || p.capacity_estimate <= 0 || remaining_time <= 0) return 0;
    __int128 v = static_cast<__int128>(remaining_time / p.estimated_job_duration) * p.capacity_estimate;
    const std::int64_t lots = std::int64_t{1} << 40;
    return v > lots ? lots : static_cast<std::int64_t>(v);
}

std::vector<const ResourceProfile*> usable_by_rate(const std::vector<ResourceProfile>& profiles) {
    std::vector<const ResourceProfile*> order;
    for (const auto& p : profiles)
        if (p.trusted && p.estimated_job_duration > 0 && p.capacity_estimate > 0)
            order.push_back(&p);
    std::sort(order.begin(), order.end(), [](const ResourceProfile* a, const ResourceProfile* b) {
        if (a->negotiated_rate != b->negotiated_rate) return a->negotiated_rate < b->negotiated_rate;
        return a->resource_id < b->resource_id;
    });
    return order;
}

}  // namespace

SchedulePlan make_plan(const std::vector<ResourceProfile>& profiles, int unfinished,
                       Money remaining_budget, Duration remaining_time, Mode mode) {
    SchedulePlan plan;
    if (unfinished <= 0) {
        plan.feasible = true;
        return plan;
    }
    auto order = usable_by_rate(profiles);
    if (order.empty() || remaining_time <= 0) {
        plan.reason = "deadline";
        return plan;
    }

    if (mode == Mode::cost_opt) {
        // cheapest rate first, each resource up to what it can finish in time
        std::int64_t remaining = unfinished;
        std::int64_t in_time_capacity = 0;
        for (const auto* p : order) {
            std::int64_t cap = jobs_completable(*p, remaining_time);
            in_time_capacity += cap;
            if (remaining <= 0 || cap <= 0) continue;
            Money per = econ::job_cost(p->estimated_job_duration, p->negotiated_rate);
            std::int64_t affordable = remaining;
            if (per.units > 0) {
                Money left = remaining_budget - plan.projected_cost;
                affordable = left.units > 0 ? left.units / per.units : 0;
            }
            std::int64_t take = std::min({remaining, cap, affordable});
            if (take <= 0) continue;
            plan.assignments[p->resource_id] = static_cast<int>(take);
            plan.projected_cost += times(per, take);
            remaining -= take;
            Duration waves = (take + p->capacity_estimate - 1) / p->capacity_estimate;
            plan.projected_makespan =
                std::max(plan.projected_makespan, waves * p->estimated_job_duration);
        }
        plan.feasible = remaining == 0;
        if (!plan.feasible) plan.reason = in_time_capacity >= unfinished ? "budget" : "deadline";
        return plan;
    }

    // time_opt: find the shortest horizon whose affordable capacity fits every
    // job. Candidate horizons are whole waves of each resource; at a fixed
    // horizon the cheapest fill takes resources by per-job cost, so the first
    // horizon the budget accepts is the fastest one it can buy.
    std::vector<const ResourceProfile*> by_per = order;
    std::stable_sort(by_per.begin(), by_per.end(), [](const auto* a, const auto* b) {
        return econ::job_cost(a->estimated_job_duration, a->negotiated_rate) <
               econ::job_cost(b->estimated_job_duration, b->negotiated_rate);
    });
    std::vector<Duration> horizons;
    for (const auto* p : order)
        for (std::int64_t waves = 1; waves <= unfinished; ++waves)
            horizons.push_back(waves * p->estimated_job_duration);
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());

    for (Duration horizon : horizons) {
        std::int64_t left = unfinished;
        Money cost{};
        Duration makespan = 0;
        std::map<std::string, int> take;
        for (const auto* p : by_per) {
            if (left <= 0) break;
            std::int64_t n = std::min<std::int64_t>(left, jobs_completable(*p, horizon));
            if (n <= 0) continue;
            take[p->resource_id] = static_cast<int>(n);
            cost += times(econ::job_cost(p->estimated_job_duration, p->negotiated_rate), n);
            Duration waves = (n + p->capacity_estimate - 1) / p->capacity_estimate;
            makespan = std::max(makespan, waves * p->estimated_job_duration);
            left -= n;
        }
        if (left > 0 || cost > remaining_budget) continue;
        plan.assignments = std::move(take);
        plan.projected_cost = cost;
        plan.projected_makespan = makespan;
        plan.feasible = makespan <= remaining_time;
        if (!plan.feasible) plan.reason = "deadline";
        return plan;
    }
    // the longest horizon hosts everything on one resource, so only money
    // can have blocked the scan
    plan.reason = "budget";
    return plan;
}

ScheduleReport settle_allocation(const std::map<std::string, std::int64_t>& counts,
                                 const std::map<std::string, Rate>& rates, Duration nominal) {
    ScheduleReport rep;
    for (const auto& [resource, n] : counts) {
        if (n < 0) throw std::invalid_argument("settle: negative job count for " + resource);
        auto it = rates.find(resource);
        if (it == rates.end()) throw std::invalid_argument("settle: no rate for " + resource);
        Money line = times(econ::job_cost(nominal, it->second), n);
        rep.jobs_per_resource[resource] = n;
        rep.cost_per_resource[resource] = line;
        rep.rate_per_resource[resource] = it->second;
        rep.total_cost += line;
        rep.jobs_completed += n;
    }
    rep.jobs_total = rep.jobs_completed;
    rep.makespan = 0;
    return rep;
}

Broker::Broker(sim::SimEngine& engine, econ::Ledger& ledger, market::MarketDirectory& gmd,
               std::map<std::string, fabric::Provider*> providers, std::string id,
               UserRequirements requirements, std::vector<JobSpec> jobs, BrokerConfig config)
    : engine_(engine),
      ledger_(ledger),
      gmd_(gmd),
      providers_(std::move(providers)),
      id_(std::move(id)),
      requirements_(std::move(requirements)),
      config_(std::move(config)) {
    requirements_.validate();
    for (auto& j : jobs) {
        if (j.nominal_cpu_seconds <= 0)
            throw std::invalid_argument("job " + j.job_id + ": nominal seconds must be positive");
        if (!jobs_.emplace(j.job_id, j).second)
            throw std::invalid_argument("duplicate job id " + j.job_id);
        pool_.push_back(j.job_id);
    }
}

void Broker::trace(const std::string& kind, const std::string& resource, const std::string& job,
                   std::optional<std::int64_t> amount, const std::string& detail) {
    engine_.trace().append({engine_.now(), id_, kind, resource, job, amount, detail});
}

void Broker::start() {
    if (state_ != State::idle) throw std::logic_error("broker " + id_ + " already started");
    state_ = State::discovering;
    submitted_at_ = engine_.now();
    deadline_at_ = submitted_at_ + requirements_.deadline;
    engine_.schedule(engine_.now(), "broker_start:" + id_, [this](sim::SimEngine&) { begin(engine_.now()); });
}

const ScheduleReport& Broker::report() const {
    if (state_ != State::done) throw std::logic_error("broker " + id_ + " has not settled yet");
    return report_;
}

ResourceProfile* Broker::profile_for(const std::string& resource_id) {
    for (auto& p : profiles_)
        if (p.resource_id == resource_id) return &p;
    return nullptr;
}

void Broker::begin(SimTime t) {
    if (jobs_.empty()) {
        settle();
        return;
    }
    if (config_.negotiation.model == market::NegotiationModel::tender) {
        run_tender_discovery();
        return;
    }
    finish_discovery(discover(t));
}

std::vector<Candidate> Broker::discover(SimTime t) {
    auto offers = gmd_.query(requirements_.eligibility, t);
    if (!requirements_.offer_allowlist.empty()) {
        std::erase_if(offers, [this](const market::ServiceOffer& o) {
            return !requirements_.offer_allowlist.count(o.offer_id);
        });
    }
    const auto model = config_.negotiation.model;
    std::vector<Candidate> out;
    std::set<std::string> seen;  // one offer per resource, first in directory order

    if (model == market::NegotiationModel::auction) {
        // reverse sealed-bid procurement: everyone quotes an ask, the lowest
        // wins the contract at the auction price, the rest keep their asks
        struct Ask {
            std::string offer_id, gsp, resource;
            Rate rate{};
        };
        std::vector<Ask> asks;
        for (const auto& off : offers) {
            if (!off.negotiation_models.count(model)) continue;
            auto it = providers_.find(off.provider);
            if (it == providers_.end() || !seen.insert(off.resource_ref).second) continue;
            Rate ask = econ::price_at(off.pricing, t, it->second->current_load(), id_);
            asks.push_back({off.offer_id, off.provider, off.resource_ref, ask});
        }
        std::sort(asks.begin(), asks.end(), [](const Ask& a, const Ask& b) {
            if (a.rate != b.rate) return a.rate < b.rate;
            return a.gsp < b.gsp;
        });
        if (!asks.empty()) {
            Rate price = asks[0].rate;
            if (config_.negotiation.auction_kind == trading::AuctionKind::vickrey &&
                asks.size() > 1)
                price = asks[1].rate;
            for (std::size_t i = 0; i < asks.size(); ++i) {
                Candidate c{asks[i].offer_id, asks[i].gsp, asks[i].resource,
                            i == 0 ? price : asks[i].rate, "auction", ""};
                trace("negotiation", c.resource_id, "", c.effective_rate.per_cpu_second,
                      (i == 0 ? "auction won at " : "auction ask kept at ") +
                          std::to_string(c.effective_rate.per_cpu_second) + " (" +
                          trading::auction_kind_name(config_.negotiation.auction_kind) + ")");
                out.push_back(std::move(c));
            }
        }
    } else {
        for (const auto& off : offers) {
            if (!off.negotiation_models.count(model)) continue;
            auto it = providers_.find(off.provider);
            if (it == providers_.end() || seen.count(off.resource_ref)) continue;
            auto* prov = it->second;
            Rate base = econ::price_at(off.pricing, t, prov->current_load(), id_);
            Candidate c{off.offer_id, off.provider, off.resource_ref, base, "commodity", ""};

            if (model == market::NegotiationModel::posted) {
                for (const auto& sp : gmd_.active_specials(t, id_)) {
                    if (sp.base_offer != off.offer_id || sp.cpu_seconds_left() <= 0) continue;
                    if (sp.special_rate < c.effective_rate) {
                        c.effective_rate = sp.special_rate;
                        c.special_id = sp.offer_id;
                        c.via = "posted";
                    }
                }
            } else if (model == market::NegotiationModel::bargain) {
                Rate reserve = std::min(prov->spec().reserve_rate, base);
                Rate open = std::min(config_.negotiation.bargain_open, base);
                auto session = trading::make_bargain_session(
                    id_, off.provider, open, config_.negotiation.bargain_step, base, base,
                    config_.negotiation.gsp_concession_step, reserve,
                    config_.negotiation.bargain_max_rounds);
                auto done = trading::negotiate_bargain(
                    session, [this, &off](const trading::BargainSession& s) {
                        trace("negotiation", off.resource_ref, "", s.gsp_ask.per_cpu_second,
                              "bargain round " + std::to_string(s.round) + ": offer " +
                                  std::to_string(s.broker_offer.per_cpu_second) + " vs ask " +
                                  std::to_string(s.gsp_ask.per_cpu_second));
                    });
                if (done.state != trading::BargainSession::State::agreed) {
                    trace("negotiation", off.resource_ref, "", std::nullopt, "bargain abandoned");
                    continue;  // no deal, not a candidate
                }
                c.effective_rate = done.agreed_rate;
                c.via = "bargain";
            }

            seen.insert(off.resource_ref);
            trace("negotiation", c.resource_id, "", c.effective_rate.per_cpu_second,
                  "contracted via " + c.via +
                      (c.special_id.empty() ? "" : " special " + c.special_id));
            out.push_back(std::move(c));
        }
    }

    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.effective_rate != b.effective_rate) return a.effective_rate < b.effective_rate;
        if (a.gsp != b.gsp) return a.gsp < b.gsp;
        return a.resource_id < b.resource_id;
    });
    return out;
}

void Broker::run_tender_discovery() {
    market::DealTemplate deal;
    deal.addressee = id_;
    deal.eligibility = requirements_.eligibility;
    deal.job_count = static_cast<std::int64_t>(pool_.size());
    deal.cpu_seconds_per_job = jobs_.at(pool_.front()).nominal_cpu_seconds;
    deal.bid_specification = "rate per cpu-second";
    deal.expiration = engine_.now() + config_.negotiation.tender_wait;
    pending_tender_id_ = gmd_.announce_tender(id_, deal, engine_.now());
    trace("negotiation", "", "", std::nullopt,
          "tender " + pending_tender_id_ + " announced, bids close at " +
              std::to_string(deal.expiration));

    engine_.schedule(deal.expiration, "tender_award:" + id_, [this, deal](sim::SimEngine&) {
        SimTime t = engine_.now();
        trading::Tender tender;
        tender.tender_id = pending_tender_id_;
        tender.manager = id_;
        tender.deal = deal;
        std::vector<trading::ProviderSnapshot> snaps;
        for (const auto& [gsp, prov] : providers_) snaps.push_back(prov->snapshot(t, id_));
        auto bids = trading::collect_bids(tender, snaps, t);
        auto decided = trading::award_tender(std::move(tender), bids, t);

        std::vector<Candidate> cands;
        if (decided.state == trading::Tender::State::awarded) {
            trace("negotiation", "", "", decided.awarded_rate.per_cpu_second,
                  "tender " + decided.tender_id + " awarded to " + decided.winner);
            for (const auto& b : bids) {
                auto* prov = providers_.at(b.gsp);
                Rate rate = b.gsp == decided.winner ? decided.awarded_rate : b.rate;
                if (b.gsp != decided.winner &&
                    trading::directed_contract(rate, prov->spec().reserve_rate, true) !=
                        trading::ContractReply::acceptance)
                    continue;
                cands.push_back({"", b.gsp, prov->spec().resource_id, rate, "tender", ""});
            }
            std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
                if (a.effective_rate != b.effective_rate) return a.effective_rate < b.effective_rate;
                return a.gsp < b.gsp;
            });
        } else {
            trace("negotiation", "", "", std::nullopt,
                  "tender " + decided.tender_id + " failed: no bids");
        }
        finish_discovery(cands);
    });
}

void Broker::finish_discovery(const std::vector<Candidate>& candidates) {
    if (candidates.empty()) {
        settle();
        return;
    }
    state_ = State::calibrating;
    SimTime t = engine_.now();
    for (const auto& c : candidates) {
        auto* prov = providers_.at(c.gsp);
        prov->set_contract(id_, c.effective_rate);
        ResourceProfile p;
        p.gsp = c.gsp;
        p.resource_id = c.resource_id;
        p.negotiated_rate = c.effective_rate;
        p.estimated_job_duration = jobs_.at(pool_.front()).nominal_cpu_seconds;
        p.capacity_estimate = 1;
        auto attrs = prov->snapshot(t, id_).attributes;
        if (auto it = attrs.find("node-count"); it != attrs.end())
            if (const auto* n = std::get_if<std::int64_t>(&it->second))
                p.capacity_estimate = static_cast<int>(std::max<std::int64_t>(1, *n));
        p.last_update = t;
        profiles_.push_back(std::move(p));
        if (!c.special_id.empty()) {
            Rate base = econ::price_at(gmd_.offer(c.offer_id).pricing, t, prov->current_load(), id_);
            specials_[c.resource_id] = {c.special_id, base};
        }
    }
    calibrate();
}

bool Broker::admit_next(ResourceProfile& profile, bool queue_if_busy, bool probe) {
    if (pool_.empty()) return false;
    auto* prov = providers_.at(profile.gsp);
    const std::string job_id = pool_.front();
    const auto& js = jobs_.at(job_id);

    // posted specials apply per job, drawing down a CPU-second cap
    std::string consume_id;
    if (auto sp = specials_.find(profile.resource_id); sp != specials_.end()) {
        for (const auto& s : gmd_.active_specials(engine_.now(), id_)) {
            if (s.offer_id == sp->second.special_id &&
                s.cpu_seconds_left() >= js.nominal_cpu_seconds) {
                consume_id = s.offer_id;
                break;
            }
        }
        if (consume_id.empty()) {
            // special spent or lapsed: back to the posted base rate
            profile.negotiated_rate = sp->second.base_rate;
            prov->set_contract(id_, profile.negotiated_rate);
            trace("negotiation", profile.resource_id, "", profile.negotiated_rate.per_cpu_second,
                  "special " + sp->second.special_id + " exhausted");
            specials_.erase(sp);
        }
    }

    Money lock = econ::job_cost(js.nominal_cpu_seconds, profile.negotiated_rate);
    if (committed_ + lock > requirements_.budget) return false;  // never start what we cannot pay
    auto callback = probe ? fabric::JobCallback([this](const fabric::JobExecution& j) { on_probe(j); })
                          : fabric::JobCallback([this](const fabric::JobExecution& j) {
                                on_job_finished(j);
                            });
    auto adm = prov->submit_job(job_id, id_, js.nominal_cpu_seconds, queue_if_busy,
                                std::move(callback));
    if (adm == fabric::Provider::Admission::rejected) {
        if (!probe && !prov->in_outage()) {
            // a rejection reveals the real concurrency we get
            profile.capacity_estimate = std::max(1, running_per_resource_[profile.resource_id]);
            profile.last_update = engine_.now();
        }
        return false;
    }
    if (!consume_id.empty()) gmd_.consume_special(consume_id, js.nominal_cpu_seconds);
    pool_.pop_front();
    running_[job_id] = {profile.resource_id, lock};
    ++running_per_resource_[profile.resource_id];
    committed_ += lock;
    trace(probe ? "probe" : "submit", profile.resource_id, job_id, lock.units,
          "rate=" + std::to_string(profile.negotiated_rate.per_cpu_second));
    return true;
}

// One real, charged job per candidate before any bulk epoch; its measured
// runtime replaces the nominal estimate.
void Broker::calibrate() {
    for (auto& p : profiles_) {
        if (pool_.empty()) break;
        if (admit_next(p, true, true)) ++probes_outstanding_;
    }
    if (probes_outstanding_ == 0) {
        state_ = State::running;
        replan();
        if (state_ != State::done)
            engine_.schedule(engine_.now() + config_.epoch_seconds, "epoch:" + id_,
                             [this](sim::SimEngine&) { epoch_tick(); });
    }
}

void Broker::on_probe(const fabric::JobExecution& job) {
    if (state_ == State::done) return;
    bool initial = state_ == State::calibrating;
    auto* p = profile_for(job.resource_id);
    if (job.state == fabric::JobExecution::State::done) {
        committed_ -= running_.at(job.job_id).locked;
        committed_ += job.charged;
        running_.erase(job.job_id);
        --running_per_resource_[job.resource_id];
        ++completed_;
        last_completion_ = std::max(last_completion_, job.finish);
        ++jobs_per_resource_[job.resource_id];
        cost_per_resource_[job.resource_id] += job.charged;
        ++epoch_completions_[job.resource_id];
        if (p) {
            p->estimated_job_duration = std::max<Duration>(1, job.finish - job.start);
            p->calibrated = true;
            p->trusted = true;
            p->last_update = engine_.now();
        }
        trace("calibrated", job.resource_id, job.job_id, job.charged.units,
              "measured " + std::to_string(job.finish - job.start) + "s");
    } else {
        committed_ -= running_.at(job.job_id).locked;
        running_.erase(job.job_id);
        --running_per_resource_[job.resource_id];
        pool_.push_back(job.job_id);
        if (p) p->trusted = false;
    }
    reprobing_.erase(job.resource_id);
    if (initial) {
        if (--probes_outstanding_ == 0) {
            state_ = State::running;
            replan();
            if (state_ != State::done)
                engine_.schedule(engine_.now() + config_.epoch_seconds, "epoch:" + id_,
                                 [this](sim::SimEngine&) { epoch_tick(); });
        }
    } else if (state_ == State::running) {
        replan();
    }
}

void Broker::on_job_finished(const fabric::JobExecution& job) {
    if (state_ == State::done) return;
    auto* p = profile_for(job.resource_id);
    if (job.state == fabric::JobExecution::State::done) {
        committed_ -= running_.at(job.job_id).locked;
        committed_ += job.charged;
        running_.erase(job.job_id);
        --running_per_resource_[job.resource_id];
        ++completed_;
        last_completion_ = std::max(last_completion_, job.finish);
        ++jobs_per_resource_[job.resource_id];
        cost_per_resource_[job.resource_id] += job.charged;
        ++epoch_completions_[job.resource_id];
        if (p) {
            Duration measured = std::max<Duration>(1, job.finish - job.start);
            p->estimated_job_duration = (measured + p->estimated_job_duration + 1) / 2;
            p->trusted = true;
            p->last_update = engine_.now();
        }
    } else {
        committed_ -= running_.at(job.job_id).locked;
        running_.erase(job.job_id);
        --running_per_resource_[job.resource_id];
        pool_.push_back(job.job_id);
        if (p) p->trusted = false;
    }
    if (state_ == State::running) replan();
}

void Broker::epoch_tick() {
    if (state_ == State::done) return;
    if (state_ == State::running) {
        for (auto& p : profiles_) {
            double c = static_cast<double>(epoch_completions_[p.resource_id]);
            p.observed_job_rate =
                config_.ema_alpha * c + (1.0 - config_.ema_alpha) * p.observed_job_rate;
        }
        epoch_completions_.clear();
        // one fresh probe per distrusted resource, so it can earn its way back
        for (auto& p : profiles_) {
            if (p.trusted || pool_.empty() || reprobing_.count(p.resource_id)) continue;
            if (admit_next(p, false, true)) reprobing_.insert(p.resource_id);
        }
        replan();
    }
    if (state_ != State::done)
        engine_.schedule(engine_.now() + config_.epoch_seconds, "epoch:" + id_,
                         [this](sim::SimEngine&) { epoch_tick(); });
}

void Broker::replan() {
    if (state_ != State::running) return;
    maybe_settle();
    if (state_ == State::done) return;
    SimTime t = engine_.now();
    if (t >= deadline_at_) {
        // past the deadline: stop submitting, let running work drain
        if (running_.empty()) settle();
        return;
    }
    if (pool_.empty()) return;

    Money remaining_budget = requirements_.budget - committed_;
    Duration remaining_time = deadline_at_ - t;
    auto plan = make_plan(profiles_, static_cast<int>(pool_.size()), remaining_budget,
                          remaining_time, requirements_.mode);

    std::ostringstream counts;
    for (const auto& [r, n] : plan.assignments) counts << " " << r << "=" << n;
    trace("plan", "", "", plan.projected_cost.units,
          mode_name(requirements_.mode) + (plan.feasible ? " feasible" : " infeasible " + plan.reason) +
              counts.str());

    int started = 0;
    auto order = usable_by_rate(profiles_);
    for (const auto* cp : order) {
        auto it = plan.assignments.find(cp->resource_id);
        if (it == plan.assignments.end()) continue;
        started += submit_to(*profile_for(cp->resource_id), it->second);
    }
    // Nothing running and nothing startable: give up, unless a distrusted
    // resource is still waiting on its recalibration probe next epoch.
    bool recoverable = std::any_of(profiles_.begin(), profiles_.end(),
                                   [](const ResourceProfile& p) { return !p.trusted; });
    if (started == 0 && running_.empty() && !pool_.empty() && !recoverable) settle();
}

int Broker::submit_to(ResourceProfile& profile, int count) {
    int started = 0;
    for (int i = 0; i < count && !pool_.empty(); ++i) {
        if (!admit_next(profile, false, false)) break;
        ++started;
    }
    return started;
}

void Broker::maybe_settle() {
    if (pool_.empty() && running_.empty()) settle();
}

void Broker::settle() {
    if (state_ == State::done) return;
    state_ = State::done;
    report_ = ScheduleReport{};
    report_.broker = id_;
    report_.mode = requirements_.mode;
    report_.jobs_total = static_cast<std::int64_t>(jobs_.size());
    report_.jobs_completed = completed_;
    report_.jobs_per_resource = jobs_per_resource_;
    report_.cost_per_resource = cost_per_resource_;
    for (const auto& [r, m] : cost_per_resource_) report_.total_cost += m;
    report_.makespan = completed_ > 0 ? last_completion_ - submitted_at_ : 0;
    report_.deadline_met =
        report_.jobs_completed == report_.jobs_total && last_completion_ <= deadline_at_;
    report_.budget_respected = report_.total_cost <= requirements_.budget;
    for (const auto& p : profiles_) report_.rate_per_resource[p.resource_id] = p.negotiated_rate;
    std::ostringstream detail;
    detail << mode_name(requirements_.mode) << " jobs " << report_.jobs_completed << "/"
           << report_.jobs_total << " makespan " << report_.makespan << " deadline_met "
           << (report_.deadline_met ? "yes" : "no") << " budget_respected "
           << (report_.budget_respected ? "yes" : "no");
    trace("settle", "", "", report_.total_cost.units, detail.str());
}

}  // namespace gridecon::broker
