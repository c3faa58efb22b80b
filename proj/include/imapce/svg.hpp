#ifndef IMAPCE_SVG_HPP
#define IMAPCE_SVG_HPP

#include "imapce/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace imapce {

/// One scatter panel: 2D points colored by integer class. Class -1 renders
/// grey (used for prior / de-emphasized points), -2 black. Point indices
/// listed in `framed` get a black ring (the "most distinct" marker).
struct SvgPanel {
    std::string title;
    Matrix points; // p x 2
    IntVector classes;
    IndexList framed;
};

/// Writes one or more vertically stacked panels. Output contains no
/// timestamps, so identical inputs give byte-identical files.
void write_scatter_svg(const std::filesystem::path& path, const std::vector<SvgPanel>& panels);

} // namespace imapce

#endif
