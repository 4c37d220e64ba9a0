#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lumped_pid/trace.hpp"

namespace lumped_pid {

/// Minimal stacked line plots: one panel per column, shared time axis.
/// Non-finite samples break the polyline.
void write_svg_plot(std::ostream& os, const SimTrace& trace, const std::vector<std::string>& columns,
                    const std::string& title = {});

}  // namespace lumped_pid
