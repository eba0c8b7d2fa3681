#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "embedshape/ph/persistence_diagram.hpp"

namespace embedshape {

// Birth/death scatter plot with one marker shape per degree and the diagonal
// drawn for reference. Output depends only on the input.
std::string render_diagram_svg(const std::vector<PersistenceDiagram>& diagrams,
                               const std::string& title);

// Throws IoError when the file cannot be written.
void plot_diagram(const std::vector<PersistenceDiagram>& diagrams,
                  const std::filesystem::path& path, const std::string& title);

}  // namespace embedshape
