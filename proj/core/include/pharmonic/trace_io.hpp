#pragma once

#include <ostream>
#include <string>

#include "pharmonic/flow.hpp"

namespace pharmonic {

/// Shortest decimal rendering of a double that parses back to the identical
/// value, independent of stream state. Used everywhere bit-stable text is
/// required.
std::string format_double(double x);

/// Serialize a trace with the fixed column header
///   step,time,e_diffusion,e_pterm,e_penalty,e_fidelity,e_total,
///   dt_norm_sq,cum_dissipation,constraint_l2,max_modulus,orth_defect,
///   newton_iters
void write_trace_csv(std::ostream& out, const FlowTrace& trace);

/// Same, to a file. Throws IoError when the file cannot be written.
void write_trace_csv(const std::string& path, const FlowTrace& trace);

}  // namespace pharmonic
