#include "aprox/harness/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "aprox/errors.hpp"
#include "aprox/harness/libsvm.hpp"

namespace aprox {

std::string trace_to_csv(const IterateTrace& trace, bool with_time) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : trace.records) {
    out += std::to_string(r.k);
    out += ',' + format_double(r.F);
    out += ',' + format_double(r.gap);
    out += ',' + format_double(r.lambda);
    out += ',' + std::to_string(r.grad_evals);
    out += ',' + format_double(with_time ? r.time_s : 0.0);
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ParseError("unexpected trace header", 1, 1);
  std::vector<TraceRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ParseError("expected 6 columns", line_no, 1);
    try {
      TraceRecord r;
      r.k = std::stoi(cells[0]);
      r.F = std::stod(cells[1]);
      r.gap = std::stod(cells[2]);
      r.lambda = std::stod(cells[3]);
      r.grad_evals = std::stol(cells[4]);
      r.time_s = std::stod(cells[5]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", line_no, 1);
    }
  }
  return out;
}

nlohmann::json trace_summary(const IterateTrace& trace) {
  nlohmann::json j;
  j["status"] = status_name(trace.status);
  j["iterations"] = trace.iterations();
  j["final_F"] = trace.final_F();
  j["final_gap"] = trace.final_gap();
  j["grad_evals"] = trace.grad_evals();
  j["trials"] = trace.trials();
  j["clamp_events"] = trace.clamp_events;
  if (!trace.message.empty()) j["message"] = trace.message;
  return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = target.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ConfigError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

}  // namespace aprox
