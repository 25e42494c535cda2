#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "echelon/fitting.hpp"
#include "echelon/network.hpp"
#include "echelon/rng.hpp"

namespace echelon {

/// Demand feed for one local warehouse: either a compound Poisson process
/// with logarithmic order sizes sampled daily, or a historical trace whose
/// events are replayed in the order they occurred.
class DemandSource {
public:
    static DemandSource compound(const CompoundPoissonLogarithmic& process) {
        DemandSource s;
        s.process_ = process;
        return s;
    }

    /// trace[day] lists the order sizes of that day in arrival order.
    static DemandSource historical(std::vector<std::vector<std::int64_t>> trace) {
        DemandSource s;
        s.trace_ = std::move(trace);
        return s;
    }

    bool is_historical() const { return trace_.has_value(); }
    std::size_t trace_days() const { return trace_ ? trace_->size() : 0; }

    /// Order sizes for one day, in serve order. Random mode draws the
    /// customer count and then per-customer sizes from `rng`.
    std::vector<std::int64_t> day_orders(int day, Rng& rng) const;

private:
    std::optional<CompoundPoissonLogarithmic> process_;
    std::optional<std::vector<std::vector<std::int64_t>>> trace_;
};

enum class TransportFamily { Gamma };

struct SimConfig {
    int horizon = 2000;
    int warmup = 500;
    int replications = 100;
    std::uint64_t seed = 1;
    TransportFamily transport = TransportFamily::Gamma;
    bool validate = false;            // per-day invariant checks (throw on violation)
    bool record_ip_histogram = false; // collect end-of-day inventory positions
    int threads = 0;                  // 0: hardware concurrency

    void check() const {
        if (horizon < 1)
            throw ConfigError("sim: horizon must be >= 1");
        if (warmup < 0 || warmup >= horizon)
            throw ConfigError("sim: warmup must lie in [0, horizon)");
        if (replications < 1)
            throw ConfigError("sim: replications must be >= 1");
    }
};

/// Reorder-point changes applied at the start of given days (historical
/// recalibration). Days must be increasing.
struct PolicySchedule {
    struct Update {
        int day = 0;
        std::int64_t central_R = 0;
        std::vector<std::int64_t> local_R; // in network order
    };
    std::vector<Update> updates;
};

struct WaitStats {
    double mean = 0.0;
    double sd = 0.0;
    std::int64_t count = 0;
};

/// Table of per-warehouse performance measures for one replication.
/// Inventory averages cover every simulated day; order counts and wait
/// samples only the days after warm-up.
struct WarehouseOutcome {
    std::string id;
    double avg_on_hand = 0.0;
    double avg_on_order = 0.0;
    double avg_backorders = 0.0;
    std::int64_t total_orders = 0;
    std::int64_t orders_fulfilled = 0;
    WaitStats wait;             // order placed -> order shipped, days
    WaitStats replenishment;    // order placed -> order arrived, days
    double order_fill_rate = 0.0; // NaN when total_orders == 0

    std::vector<std::int64_t> ip_histogram; // optional, end-of-day IP counts
    std::int64_t ip_histogram_offset = 0;
};

struct SimulationOutcome {
    WarehouseOutcome central;
    std::vector<WarehouseOutcome> locals;
};

/// One replication: initial on-hand R_i + 1, nothing in flight, then per
/// day receive (S1), serve backorders (S2), serve the day's demand (S3) and
/// reorder (S4).
SimulationOutcome run_replication(const NetworkConfig& net,
                                  const std::vector<DemandSource>& sources,
                                  const SimConfig& cfg, Rng& rng,
                                  const PolicySchedule& schedule = {});

/// Replication-wise means plus the per-replication outcomes. Replication r
/// runs with a seed derived from (cfg.seed, r), so results are independent
/// of the thread count.
struct ExperimentOutcome {
    SimulationOutcome mean;
    std::vector<SimulationOutcome> replications;
};

ExperimentOutcome run_experiment(const NetworkConfig& net,
                                 const std::vector<DemandSource>& sources, const SimConfig& cfg,
                                 const PolicySchedule& schedule = {});

/// Compound demand sources implied by the network's per-day demand moments.
std::vector<DemandSource> compound_sources(const NetworkConfig& net);

} // namespace echelon
