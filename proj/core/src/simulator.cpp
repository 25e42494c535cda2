#include "echelon/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

#include <boost/math/distributions/gamma.hpp>

#include "echelon/errors.hpp"

namespace echelon {

std::vector<std::int64_t> DemandSource::day_orders(int day, Rng& rng) const {
    if (trace_) {
        if (day < 0 || static_cast<std::size_t>(day) >= trace_->size())
            throw TraceExhausted("demand trace has no day " + std::to_string(day));
        return (*trace_)[static_cast<std::size_t>(day)];
    }
    std::vector<std::int64_t> orders;
    const std::int64_t customers = process_->arrivals().sample(rng);
    orders.reserve(static_cast<std::size_t>(customers));
    for (std::int64_t c = 0; c < customers; ++c)
        orders.push_back(process_->order_size().sample(rng));
    return orders;
}

namespace {

// Transport time sampler: gamma with the warehouse's lead moments, drawn by
// quantile transform, rounded to the nearest integer, floored at one day.
class TransportSampler {
public:
    explicit TransportSampler(const MomentPair& lead) {
        if (lead.variance > 0.0)
            gamma_.emplace(lead.mean * lead.mean / lead.variance,
                           lead.variance / lead.mean);
        else
            fixed_ = std::max<std::int64_t>(1, std::llround(lead.mean));
    }

    int sample(Rng& rng) const {
        if (!gamma_)
            return static_cast<int>(fixed_);
        const double draw = boost::math::quantile(*gamma_, rng.uniform01());
        return static_cast<int>(std::max<std::int64_t>(1, std::llround(draw)));
    }

private:
    std::optional<boost::math::gamma_distribution<double>> gamma_;
    std::int64_t fixed_ = 1;
};

struct PendingOrder {
    std::int64_t qty = 0;
    int day_placed = 0;
    std::uint64_t seq = 0;
    int origin = -1; // local index for orders queued at the central warehouse
};

struct RunningStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }

    WaitStats finish() const {
        WaitStats w;
        w.count = count;
        if (count > 0)
            w.mean = sum / static_cast<double>(count);
        if (count > 1) {
            const double var =
                (sum_sq - sum * sum / static_cast<double>(count)) /
                static_cast<double>(count - 1);
            w.sd = std::sqrt(std::max(0.0, var));
        }
        return w;
    }
};

struct WarehouseState {
    std::int64_t reorder_point = 0;
    std::int64_t order_quantity = 1;
    std::int64_t on_hand = 0;
    std::int64_t on_order = 0;
    std::int64_t backorder_units = 0;
    std::int64_t initial_ip = 0;
    std::deque<PendingOrder> queue;     // unserved demand, FIFO
    std::vector<std::int64_t> arrivals; // indexed by day

    // accounting
    double sum_on_hand = 0.0;
    double sum_on_order = 0.0;
    double sum_backorders = 0.0;
    std::int64_t total_orders = 0;
    std::int64_t orders_fulfilled = 0;
    RunningStats wait;
    RunningStats replenishment;
    std::uint64_t last_served_seq = 0;
    std::int64_t arrivals_today = 0;
    std::int64_t served_today = 0;
    std::int64_t prev_on_hand = 0;
    std::vector<std::int64_t> ip_histogram;
    std::int64_t ip_histogram_offset = 0;

    std::int64_t ip() const { return on_hand + on_order - backorder_units; }
};

class Replication {
public:
    Replication(const NetworkConfig& net, const std::vector<DemandSource>& sources,
                const SimConfig& cfg, Rng& rng, const PolicySchedule& schedule)
        : net_(net), sources_(sources), cfg_(cfg), rng_(rng), schedule_(schedule) {
        net_.validate();
        cfg_.check();
        if (sources_.size() != net_.locals.size())
            throw ConfigError("run_replication: one demand source per local warehouse");
        for (const auto& s : sources_)
            if (s.is_historical() && s.trace_days() < static_cast<std::size_t>(cfg_.horizon))
                throw TraceExhausted("demand trace shorter than the simulation horizon");

        transport_.reserve(net_.locals.size() + 1);
        transport_.emplace_back(net_.central.lead); // supplier -> central
        for (const auto& w : net_.locals)
            transport_.emplace_back(w.lead); // central -> local

        states_.resize(net_.locals.size() + 1);
        init_state(states_[0], net_.central);
        for (std::size_t i = 0; i < net_.locals.size(); ++i)
            init_state(states_[i + 1], net_.locals[i]);
    }

    SimulationOutcome run() {
        for (int day = 0; day < cfg_.horizon; ++day)
            step(day);
        SimulationOutcome out;
        out.central = finish(states_[0], net_.central.id);
        out.locals.reserve(net_.locals.size());
        for (std::size_t i = 0; i < net_.locals.size(); ++i)
            out.locals.push_back(finish(states_[i + 1], net_.locals[i].id));
        return out;
    }

private:
    void init_state(WarehouseState& s, const WarehouseParams& w) {
        s.reorder_point = w.reorder_point;
        s.order_quantity = w.order_quantity;
        s.on_hand = std::max<std::int64_t>(0, w.reorder_point + 1);
        s.prev_on_hand = s.on_hand;
        s.initial_ip = s.on_hand;
        s.arrivals.assign(static_cast<std::size_t>(cfg_.horizon), 0);
        if (cfg_.record_ip_histogram) {
            s.ip_histogram_offset = w.reorder_point + 1;
            s.ip_histogram.assign(static_cast<std::size_t>(w.order_quantity), 0);
        }
    }

    void schedule_arrival(WarehouseState& s, int day, int transit, std::int64_t qty) {
        const std::int64_t when = static_cast<std::int64_t>(day) + transit;
        if (when < cfg_.horizon)
            s.arrivals[static_cast<std::size_t>(when)] += qty;
        // Beyond the horizon the order simply stays outstanding.
    }

    // Central ships one local order: transport is drawn for the destination.
    void ship_to_local(const PendingOrder& order, int day) {
        WarehouseState& central = states_[0];
        WarehouseState& local = states_[static_cast<std::size_t>(order.origin) + 1];
        central.on_hand -= order.qty;
        central.served_today += order.qty;
        const int transit = transport_[static_cast<std::size_t>(order.origin) + 1].sample(rng_);
        schedule_arrival(local, day, transit, order.qty);
        if (order.day_placed >= cfg_.warmup) {
            local.wait.add(static_cast<double>(day - order.day_placed));
            local.replenishment.add(static_cast<double>(day - order.day_placed + transit));
        }
    }

    void step(int day) {
        apply_policy_updates(day);

        // S1: receive shipments.
        for (auto& s : states_) {
            const std::int64_t arrived = s.arrivals[static_cast<std::size_t>(day)];
            s.arrivals_today = arrived;
            s.served_today = 0;
            s.on_hand += arrived;
            s.on_order -= arrived;
        }

        // S2: serve outstanding backorders, central first so that freshly
        // received central stock can ship to locals the same day.
        WarehouseState& central = states_[0];
        while (!central.queue.empty() && central.on_hand >= central.queue.front().qty) {
            const PendingOrder order = central.queue.front();
            central.queue.pop_front();
            central.backorder_units -= order.qty;
            check_fifo(central, order.seq);
            ship_to_local(order, day);
        }
        for (std::size_t i = 0; i < net_.locals.size(); ++i) {
            WarehouseState& s = states_[i + 1];
            while (!s.queue.empty() && s.on_hand >= s.queue.front().qty) {
                const PendingOrder order = s.queue.front();
                s.queue.pop_front();
                check_fifo(s, order.seq);
                s.on_hand -= order.qty;
                s.served_today += order.qty;
                s.backorder_units -= order.qty;
            }
        }

        // S3: serve the day's customer demand first come, first serve.
        for (std::size_t i = 0; i < net_.locals.size(); ++i) {
            WarehouseState& s = states_[i + 1];
            const std::vector<std::int64_t> orders =
                sources_[i].day_orders(day, rng_);
            for (std::int64_t qty : orders) {
                if (qty <= 0)
                    continue;
                if (day >= cfg_.warmup)
                    ++s.total_orders;
                if (s.queue.empty() && s.on_hand >= qty) {
                    s.on_hand -= qty;
                    s.served_today += qty;
                    if (day >= cfg_.warmup)
                        ++s.orders_fulfilled;
                } else {
                    s.queue.push_back({qty, day, next_seq_++, static_cast<int>(i)});
                    s.backorder_units += qty;
                }
            }
        }

        // S4: reorder. Locals place (and possibly immediately receive) their
        // orders before the central warehouse checks its own position.
        for (std::size_t i = 0; i < net_.locals.size(); ++i) {
            WarehouseState& s = states_[i + 1];
            while (s.ip() <= s.reorder_point) {
                const std::int64_t qty = s.order_quantity;
                s.on_order += qty;
                if (day >= cfg_.warmup)
                    ++central.total_orders;
                if (central.queue.empty() && central.on_hand >= qty) {
                    if (day >= cfg_.warmup)
                        ++central.orders_fulfilled;
                    PendingOrder order{qty, day, next_seq_++, static_cast<int>(i)};
                    ship_to_local(order, day);
                } else {
                    central.queue.push_back({qty, day, next_seq_++, static_cast<int>(i)});
                    central.backorder_units += qty;
                }
            }
        }
        while (central.ip() <= central.reorder_point) {
            const std::int64_t qty = central.order_quantity;
            central.on_order += qty;
            // Unlimited supplier stock: shipped immediately, wait 0.
            const int transit = transport_[0].sample(rng_);
            schedule_arrival(central, day, transit, qty);
            if (day >= cfg_.warmup) {
                ++central.total_orders;
                ++central.orders_fulfilled;
                central.wait.add(0.0);
                central.replenishment.add(static_cast<double>(transit));
            }
        }

        // End of day: inventory measures cover every day, warm-up included.
        for (auto& s : states_) {
            s.sum_on_hand += static_cast<double>(s.on_hand);
            s.sum_on_order += static_cast<double>(s.on_order);
            s.sum_backorders += static_cast<double>(s.backorder_units);
            if (cfg_.validate)
                validate_day(s);
            if (cfg_.record_ip_histogram && day >= cfg_.warmup && !s.ip_histogram.empty()) {
                const std::int64_t slot = s.ip() - s.ip_histogram_offset;
                if (slot >= 0 && slot < static_cast<std::int64_t>(s.ip_histogram.size()))
                    ++s.ip_histogram[static_cast<std::size_t>(slot)];
            }
            s.prev_on_hand = s.on_hand;
        }
    }

    void apply_policy_updates(int day) {
        for (const auto& u : schedule_.updates) {
            if (u.day != day)
                continue;
            states_[0].reorder_point = u.central_R;
            if (u.local_R.size() != net_.locals.size())
                throw ConfigError("policy update: one reorder point per local warehouse");
            for (std::size_t i = 0; i < u.local_R.size(); ++i)
                states_[i + 1].reorder_point = u.local_R[i];
        }
    }

    void check_fifo(WarehouseState& s, std::uint64_t seq) {
        if (cfg_.validate && seq <= s.last_served_seq && s.last_served_seq != 0)
            throw ConfigError("simulator invariant: FIFO order violated");
        s.last_served_seq = seq;
    }

    void validate_day(const WarehouseState& s) const {
        if (s.on_hand < 0)
            throw ConfigError("simulator invariant: negative on-hand stock");
        // Daily balance: on_hand(t) = on_hand(t-1) + arrivals - servings.
        if (s.on_hand != s.prev_on_hand + s.arrivals_today - s.served_today)
            throw ConfigError("simulator invariant: inventory balance violated");
        // After S4 the position sits in (R, R+Q]; a start above the band
        // (possible only when R+1 was clamped to zero stock) decays into it.
        const std::int64_t ip = s.ip();
        if (ip <= s.reorder_point)
            throw ConfigError("simulator invariant: inventory position at or below R after S4");
        const std::int64_t band_top =
            std::max(s.reorder_point + s.order_quantity, s.initial_ip);
        if (ip > band_top)
            throw ConfigError("simulator invariant: inventory position above R+Q");
    }

    WarehouseOutcome finish(const WarehouseState& s, const std::string& id) const {
        WarehouseOutcome o;
        o.id = id;
        const double days = static_cast<double>(cfg_.horizon);
        o.avg_on_hand = s.sum_on_hand / days;
        o.avg_on_order = s.sum_on_order / days;
        o.avg_backorders = s.sum_backorders / days;
        o.total_orders = s.total_orders;
        o.orders_fulfilled = s.orders_fulfilled;
        o.wait = s.wait.finish();
        o.replenishment = s.replenishment.finish();
        o.order_fill_rate = s.total_orders > 0
                                ? static_cast<double>(s.orders_fulfilled) /
                                      static_cast<double>(s.total_orders)
                                : std::numeric_limits<double>::quiet_NaN();
        o.ip_histogram = s.ip_histogram;
        o.ip_histogram_offset = s.ip_histogram_offset;
        return o;
    }

    NetworkConfig net_;
    std::vector<DemandSource> sources_;
    SimConfig cfg_;
    Rng& rng_;
    PolicySchedule schedule_;
    std::vector<TransportSampler> transport_;
    std::vector<WarehouseState> states_;
    std::uint64_t next_seq_ = 1;
};

// Mean over replications; wait statistics average the per-replication values
// from replications that produced samples.
WarehouseOutcome average_outcomes(const std::vector<const WarehouseOutcome*>& reps) {
    WarehouseOutcome mean;
    mean.id = reps.front()->id;
    double n = static_cast<double>(reps.size());
    double fill_sum = 0.0;
    std::int64_t fill_n = 0;
    double wait_mean_sum = 0.0, wait_sd_sum = 0.0;
    std::int64_t wait_mean_n = 0, wait_sd_n = 0;
    double rep_mean_sum = 0.0, rep_sd_sum = 0.0;
    std::int64_t rep_mean_n = 0, rep_sd_n = 0;
    for (const WarehouseOutcome* r : reps) {
        mean.avg_on_hand += r->avg_on_hand / n;
        mean.avg_on_order += r->avg_on_order / n;
        mean.avg_backorders += r->avg_backorders / n;
        mean.total_orders += r->total_orders;
        mean.orders_fulfilled += r->orders_fulfilled;
        if (r->total_orders > 0) {
            fill_sum += r->order_fill_rate;
            ++fill_n;
        }
        if (r->wait.count > 0) {
            wait_mean_sum += r->wait.mean;
            ++wait_mean_n;
        }
        if (r->wait.count > 1) {
            wait_sd_sum += r->wait.sd;
            ++wait_sd_n;
        }
        if (r->replenishment.count > 0) {
            rep_mean_sum += r->replenishment.mean;
            ++rep_mean_n;
        }
        if (r->replenishment.count > 1) {
            rep_sd_sum += r->replenishment.sd;
            ++rep_sd_n;
        }
        mean.wait.count += r->wait.count;
        mean.replenishment.count += r->replenishment.count;
    }
    mean.order_fill_rate = fill_n > 0 ? fill_sum / static_cast<double>(fill_n)
                                      : std::numeric_limits<double>::quiet_NaN();
    mean.wait.mean = wait_mean_n > 0 ? wait_mean_sum / static_cast<double>(wait_mean_n) : 0.0;
    mean.wait.sd = wait_sd_n > 0 ? wait_sd_sum / static_cast<double>(wait_sd_n) : 0.0;
    mean.replenishment.mean =
        rep_mean_n > 0 ? rep_mean_sum / static_cast<double>(rep_mean_n) : 0.0;
    mean.replenishment.sd = rep_sd_n > 0 ? rep_sd_sum / static_cast<double>(rep_sd_n) : 0.0;
    return mean;
}

} // namespace

SimulationOutcome run_replication(const NetworkConfig& net,
                                  const std::vector<DemandSource>& sources,
                                  const SimConfig& cfg, Rng& rng,
                                  const PolicySchedule& schedule) {
    Replication rep(net, sources, cfg, rng, schedule);
    return rep.run();
}

ExperimentOutcome run_experiment(const NetworkConfig& net,
                                 const std::vector<DemandSource>& sources, const SimConfig& cfg,
                                 const PolicySchedule& schedule) {
    cfg.check();
    ExperimentOutcome out;
    out.replications.resize(static_cast<std::size_t>(cfg.replications));

    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned threads = cfg.threads > 0
                                 ? static_cast<unsigned>(cfg.threads)
                                 : std::max(1u, hw);
    auto worker = [&](unsigned t) {
        for (int r = static_cast<int>(t); r < cfg.replications;
             r += static_cast<int>(threads)) {
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
            out.replications[static_cast<std::size_t>(r)] =
                run_replication(net, sources, cfg, rng, schedule);
        }
    };
    if (threads <= 1 || cfg.replications <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker, t);
        for (auto& th : pool)
            th.join();
    }

    std::vector<const WarehouseOutcome*> view;
    view.reserve(out.replications.size());
    for (const auto& rep : out.replications)
        view.push_back(&rep.central);
    out.mean.central = average_outcomes(view);
    for (std::size_t i = 0; i < net.locals.size(); ++i) {
        view.clear();
        for (const auto& rep : out.replications)
            view.push_back(&rep.locals[i]);
        out.mean.locals.push_back(average_outcomes(view));
    }
    return out;
}

std::vector<DemandSource> compound_sources(const NetworkConfig& net) {
    std::vector<DemandSource> sources;
    sources.reserve(net.locals.size());
    for (const auto& w : net.locals)
        sources.push_back(DemandSource::compound(fit_logarithmic_compound(w.demand)));
    return sources;
}

} // namespace echelon
