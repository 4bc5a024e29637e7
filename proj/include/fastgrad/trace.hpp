#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fastgrad {

enum class EventKind { outer_step, retry, inner_restart, terminated };

inline std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::outer_step: return "outer_step";
    case EventKind::retry: return "retry";
    case EventKind::inner_restart: return "inner_restart";
    case EventKind::terminated: return "terminated";
    }
    return "unknown";
}

inline EventKind parse_event_kind(std::string_view s) {
    if (s == "outer_step") return EventKind::outer_step;
    if (s == "retry") return EventKind::retry;
    if (s == "inner_restart") return EventKind::inner_restart;
    if (s == "terminated") return EventKind::terminated;
    throw std::invalid_argument("unknown event kind: " + std::string(s));
}

struct TraceEvent {
    std::uint64_t value_calls = 0;
    std::uint64_t grad_calls = 0;
    double grad_norm = 0.0;
    std::optional<double> f_value;
    std::optional<double> mu_estimate;
    std::optional<double> L_estimate;
    EventKind kind = EventKind::outer_step;

    bool operator==(const TraceEvent&) const = default;
};

/// Ordered record of solver progress. Counter columns are cumulative oracle
/// totals at the moment the event was recorded.
struct RunTrace {
    std::vector<TraceEvent> events;
    // Value evaluations spent only on filling f_value for the trace. They are
    // included in the counters but are not part of any algorithm's cost.
    std::uint64_t instrumentation_value_calls = 0;

    void push(TraceEvent e) { events.push_back(std::move(e)); }
    bool empty() const noexcept { return events.empty(); }
    const TraceEvent& back() const { return events.back(); }
};

} // namespace fastgrad
