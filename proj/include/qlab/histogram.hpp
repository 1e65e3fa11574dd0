#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "qlab/circuit.hpp"

namespace qlab {

/// ASCII histogram of shot counts, one line per outcome sorted by label.
/// Bars are proportional to frequency and scaled so the tallest fills
/// `max_bar` characters.
inline std::string render_histogram(const Counts& counts, std::size_t max_bar = 40) {
    if (counts.counts.empty() || counts.shots == 0) return "(no counts)\n";

    std::uint64_t highest = 0;
    std::size_t label_width = 0;
    for (const auto& [label, count] : counts.counts) {
        highest = std::max(highest, count);
        label_width = std::max(label_width, label.size());
    }

    std::string out;
    for (const auto& [label, count] : counts.counts) {
        const double freq =
            static_cast<double>(count) / static_cast<double>(counts.shots);
        const std::size_t bar_len =
            highest == 0 ? 0
                         : static_cast<std::size_t>(
                               static_cast<double>(count) /
                                   static_cast<double>(highest) *
                                   static_cast<double>(max_bar) +
                               0.5);
        char prefix[96];
        std::snprintf(prefix, sizeof(prefix), "%-*s %8llu  %.4f  ",
                      static_cast<int>(label_width), label.c_str(),
                      static_cast<unsigned long long>(count), freq);
        out += prefix;
        out.append(bar_len, '#');
        out += '\n';
    }
    return out;
}

} // namespace qlab
