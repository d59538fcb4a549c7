#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aprox/solver.hpp"

namespace aprox {

inline constexpr const char* kTraceHeader = "k,F,gap,lambda,grad_evals,time_s";

/// CSV with kTraceHeader. With `with_time` false the time column is 0 so
/// reruns are byte-identical.
std::string trace_to_csv(const IterateTrace& trace, bool with_time);
std::vector<TraceRecord> parse_trace_csv(const std::string& text);

/// status, iterations, final F, final gap, clamp events, trials, message.
nlohmann::json trace_summary(const IterateTrace& trace);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace aprox
