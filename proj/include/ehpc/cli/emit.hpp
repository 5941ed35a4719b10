#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ehpc/bounds.hpp"
#include "ehpc/oracle.hpp"
#include "ehpc/sim.hpp"

namespace ehpc::cli {

enum class Format { kCsv, kJson };

Format format_from_string(const std::string& s);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

struct ReplicaTrace {
  std::size_t replica = 0;
  std::vector<SlotRecord> records;
};

/// summary.{csv|json}, plus trace.csv when traces are given. Returns the
/// paths written.
std::vector<std::filesystem::path> emit_run(const SimSummary& summary,
                                            std::span<const ReplicaTrace> traces, Format format,
                                            const std::filesystem::path& dir);

std::vector<std::filesystem::path> emit_sweep(SweepAxis axis, std::span<const SweepRow> rows,
                                              Format format, const std::filesystem::path& dir);

std::vector<std::filesystem::path> emit_bounds(const BoundReport& report,
                                               const std::filesystem::path& dir);

std::vector<std::filesystem::path> emit_oracle(std::span<const GapCheckRow> rows, Format format,
                                               const std::filesystem::path& dir);

}  // namespace ehpc::cli
