#include "blockprox/trace.hpp"

#include <cstdio>
#include <sstream>

namespace blockprox {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, std::span<const IterationRecord> trace,
                     bool include_timing) {
  os << "k,block,tau,backtracks,lambda,boost_attempts,phi,dir_norm,elapsed_ns\n";
  for (const IterationRecord& r : trace) {
    os << r.k << ',' << r.block << ',' << format_double(r.tau) << ',' << r.backtracks << ','
       << format_double(r.lambda) << ',' << r.boost_attempts << ',' << format_double(r.phi)
       << ',' << format_double(r.dir_norm) << ',' << (include_timing ? r.elapsed_ns : 0)
       << '\n';
  }
}

std::string trace_csv(std::span<const IterationRecord> trace, bool include_timing) {
  std::ostringstream os;
  write_trace_csv(os, trace, include_timing);
  return os.str();
}

}  // namespace blockprox
