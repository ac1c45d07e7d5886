#include "pharmonic/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "pharmonic/errors.hpp"

namespace pharmonic {

std::string format_double(double x) {
  char buf[40];
  if (!std::isfinite(x)) {
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }
  // Shortest representation that parses back to exactly x. 17 significant
  // digits always round-trip, so the loop terminates.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
  out << "step,time,e_diffusion,e_pterm,e_penalty,e_fidelity,e_total,dt_norm_sq,"
         "cum_dissipation,constraint_l2,max_modulus,orth_defect,newton_iters\n";
  for (const TraceRow& r : trace.rows) {
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.energy.diffusion)
        << ',' << format_double(r.energy.p_term) << ',' << format_double(r.energy.penalty) << ','
        << format_double(r.energy.fidelity) << ',' << format_double(r.energy.total) << ','
        << format_double(r.dt_norm_sq) << ',' << format_double(r.cum_dissipation) << ','
        << format_double(r.constraint_l2) << ',' << format_double(r.max_modulus) << ','
        << format_double(r.orth_defect) << ',' << r.newton_iters << '\n';
  }
}

void write_trace_csv(const std::string& path, const FlowTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_trace_csv: cannot open " + path + " for writing");
  write_trace_csv(out, trace);
  out.flush();
  if (!out) throw IoError("write_trace_csv: write failed for " + path);
}

}  // namespace pharmonic
