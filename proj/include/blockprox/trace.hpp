#ifndef BLOCKPROX_TRACE_HPP_
#define BLOCKPROX_TRACE_HPP_

#include <ostream>
#include <span>
#include <string>

#include "blockprox/solver.hpp"

namespace blockprox {

/// CSV export of an iteration trace. Floating values are printed with 17
/// significant digits so records round-trip exactly. `include_timing` off
/// writes elapsed_ns as 0, keeping repeated runs byte-identical.
void write_trace_csv(std::ostream& os, std::span<const IterationRecord> trace,
                     bool include_timing);

std::string trace_csv(std::span<const IterationRecord> trace, bool include_timing);

/// "%.17g" formatting used across all artifacts.
std::string format_double(double v);

}  // namespace blockprox

#endif  // BLOCKPROX_TRACE_HPP_
