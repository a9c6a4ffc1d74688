#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpvl/configuration.hpp"
#include "cpvl/graph.hpp"
#include "cpvl/rates.hpp"
#include "cpvl/rng.hpp"

namespace cpvl {

struct Snapshot {
    double time = 0.0;
    Configuration state;
};

struct Trajectory {
    Configuration initial;
    Configuration final_state;
    /// CPVL: time |eta| hit 0. CPLI: time the configuration became
    /// absorbing (no transition has positive rate).
    std::optional<double> extinction_time;
    double end_time = 0.0;  ///< time at which the run stopped
    std::uint64_t event_count = 0;
    std::vector<Snapshot> snapshots;
    bool reached_boundary = false;
    bool hit_population_threshold = false;
    std::uint64_t master_seed = 0;
    std::uint64_t replica = 0;
};

struct RunOptions {
    double horizon = 1.0;
    std::vector<double> snapshot_times;  ///< must be sorted
    /// Stop once a boundary vertex of the graph becomes infected (CPVL) or
    /// active (CPLI).
    bool stop_at_boundary = false;
    /// Stop once this many vertices are infected (CPVL) or active (CPLI).
    std::optional<std::size_t> population_threshold;
    std::uint64_t master_seed = 0;
    std::uint64_t replica = 0;
};

/// Continuous-time simulation of the CPVL:
///   eta(x) -> eta(x) v 1 at rate sum_{y~x} Lambda(eta(y)) 1{eta(y)>0},
///   eta(x) -> eta(x) + 1 at rate b(eta(x)),  eta(x) -> eta(x) - 1 at rate d(eta(x)).
/// Infection attempts on already infected vertices are no-ops and are not
/// scheduled. Per-vertex rates live in a sum tree; an event at x refreshes x
/// and its neighbours only.
Trajectory run_cpvl_gillespie(const Graph& g, const RateModel& model, const InfectionRate& infection,
                              const Configuration& init, const RunOptions& options, Rng& rng);

/// Continuous-time simulation of the CPLI:
///   xi(x) -> 0 at rate lambda |{y~x : xi(y) = 0}|,
///   xi(x) -> xi(x) + 1 at rate d(xi(x) + 1),  xi(x) -> xi(x) - 1 at rate b(xi(x)).
Trajectory run_cpli_gillespie(const Graph& g, const RateModel& model, double lambda, const Configuration& init,
                              const RunOptions& options, Rng& rng);

// ---------------------------------------------------------------------------
// Marked Poisson event logs

enum class EventKind : std::uint8_t { birth, death, infection };

/// One point of the graphical construction. `index` is a vertex for birth and
/// death points and a directed-edge id (see DirectedEdges) for infection
/// points; `mark` is uniform on [0, envelope of its stream].
struct Event {
    double time = 0.0;
    double mark = 0.0;
    std::uint32_t index = 0;
    EventKind kind = EventKind::birth;
};

/// Rate ceilings shared by all streams of one kind.
struct Envelopes {
    double birth = 0.0;
    double death = 0.0;
    double infection = 0.0;

    /// Smallest envelopes covering every rate a capped model can read, for
    /// both the CPVL and its role-swapped CPLI dual.
    static Envelopes covering(const RateModel& model, const InfectionRate& infection);
    Envelopes max(const Envelopes& other) const;
};

/// Thrown when a reachable rate exceeds the envelope of its stream.
class EnvelopeViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lazily generated superposition of the independent homogeneous streams:
/// one birth and one death stream per vertex at the birth/death envelopes,
/// one infection stream per directed edge at the infection envelope. Each
/// point is a point of exactly one stream; marks are uniform. Deterministic
/// given the seed.
class EventStream {
public:
    EventStream(const Graph& g, const Envelopes& envelopes, double horizon, std::uint64_t seed);

    /// Next point in time order; false once past the horizon.
    bool next(Event& out);

    double total_rate() const { return total_rate_; }

private:
    Envelopes env_;
    double horizon_;
    Rng rng_;
    double time_ = 0.0;
    double birth_mass_, death_mass_, total_rate_;
    std::uint64_t vertices_, edges_;
};

/// Materialised event stream, needed for backward traversal.
class EventLog {
public:
    static EventLog generate(const Graph& g, const Envelopes& envelopes, double horizon, std::uint64_t seed);

    std::span<const Event> events() const { return events_; }
    const Envelopes& envelopes() const { return env_; }
    double horizon() const { return horizon_; }
    std::size_t vertex_count() const { return vertices_; }
    std::size_t edge_count() const { return edges_; }

    /// Points of the single stream (kind, index), in time order.
    std::vector<Event> stream(EventKind kind, std::uint32_t index) const;

private:
    std::vector<Event> events_;
    Envelopes env_;
    double horizon_ = 0.0;
    std::size_t vertices_ = 0, edges_ = 0;
};

/// CPVL driven by a shared event stream. Accepts a birth point at x iff
/// mark < b(eta(x)), a death point iff mark < d(eta(x)), an infection point on
/// (y, x) iff eta(y) > 0 and mark < Lambda(eta(y)).
class CpvlReplay {
public:
    CpvlReplay(const Graph& g, const DirectedEdges& edges, const RateModel& model, const InfectionRate& infection,
               Configuration init, const Envelopes& envelopes);

    /// Applies one point; returns true if the configuration changed.
    bool apply(const Event& e);
    /// Vertex whose state the point may change.
    Vertex target(const Event& e) const;
    const Configuration& state() const { return state_; }

private:
    const DirectedEdges* edges_;
    std::vector<double> birth_, death_, infect_;
    Configuration state_;
};

/// CPLI driven by the same streams with roles swapped: a CPVL death point
/// deepens dormancy iff mark < d(xi(x) + 1), a CPVL birth point lowers it iff
/// mark < b(xi(x)), and an infection point resets the target to 0 iff the
/// source is active and mark < lambda. With `dual = true` every directed
/// edge is read reversed, as needed when the log is traversed backwards.
class CpliReplay {
public:
    CpliReplay(const Graph& g, const DirectedEdges& edges, const RateModel& model, double lambda,
               Configuration init, const Envelopes& envelopes, bool dual);

    bool apply(const Event& e);
    Vertex target(const Event& e) const;
    const Configuration& state() const { return state_; }
    /// Overwrites one entry; used to undo recorded moves.
    void restore(Vertex v, Load value) { state_.set(v, value); }

private:
    const DirectedEdges* edges_;
    std::vector<double> birth_, death_;
    double lambda_;
    bool dual_;
    Configuration state_;
};

/// Independent birth-death system that never drops below 1, started at
/// init v 1: up iff mark < b(Z), down iff mark < d(Z) 1{Z >= 2}.
class DominatingReplay {
public:
    DominatingReplay(const RateModel& model, const Configuration& init, const Envelopes& envelopes);

    bool apply(const Event& e);
    const Configuration& state() const { return state_; }

private:
    std::vector<double> birth_, death_;
    Configuration state_;
};

Trajectory run_cpvl_from_log(const Graph& g, const RateModel& model, const InfectionRate& infection,
                             const Configuration& init, const EventLog& log);

enum class Direction { forward, reverse };

/// Replays the CPLI over the log. Reverse traversal reads time as
/// horizon - s and reverses every directed edge.
Trajectory run_cpli_from_log(const Graph& g, const RateModel& model, double lambda, const Configuration& init,
                             const EventLog& log, Direction direction = Direction::forward);

struct ModelSpec {
    RateModel rates;
    InfectionRate infection;
};

struct CoupledRun {
    Trajectory lower;
    Trajectory upper;
    std::uint64_t ordering_violations = 0;
};

/// Replays two CPVLs on one log and checks eta_lo <= eta_hi after every
/// point. Requires Lambda_hi >= Lambda_lo, b_hi >= b_lo and d_hi <= d_lo up
/// to the larger load bound, and init_lo <= init_hi.
CoupledRun run_coupled_pair(const Graph& g, const ModelSpec& lower, const ModelSpec& upper,
                            const Configuration& init_lower, const Configuration& init_upper, const EventLog& log);

/// max over time and vertices of |eta^{a v b} - (eta^a v eta^b)| on one log.
Load check_additivity(const Graph& g, const RateModel& model, const InfectionRate& infection,
                      const Configuration& eta1, const Configuration& eta2, const EventLog& log);

/// Number of points after which eta(x) > Z(x) for the dominating system Z.
std::uint64_t check_domination(const Graph& g, const RateModel& model, const InfectionRate& infection,
                               const Configuration& init, const EventLog& log);

/// Replays two CPLIs on one log and counts points after which xi_a <= xi_b
/// fails. Requires lambda_a >= lambda_b and xi_a <= xi_b at the start: more
/// reactivation and a lower start both keep dormancy lower.
std::uint64_t check_cpli_order(const Graph& g, const RateModel& model, double lambda_a, const Configuration& xi_a,
                               double lambda_b, const Configuration& xi_b, const EventLog& log);

/// CSV row fields for trajectory summaries.
std::string trajectory_csv_header();
std::string trajectory_csv_row(const Trajectory& t);

}  // namespace cpvl
