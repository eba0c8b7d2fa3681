#include "embedshape/ph/persistence_diagram.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/common/numfmt.hpp"

namespace embedshape {

void PersistenceDiagram::normalize() { std::sort(bars.begin(), bars.end()); }

void write_diagrams_csv(std::ostream& out, const std::vector<PersistenceDiagram>& diagrams) {
  std::vector<PersistenceDiagram> sorted = diagrams;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.degree < b.degree; });
  out << "degree,birth,death\n";
  for (auto& d : sorted) {
    d.normalize();
    for (const auto& bar : d.bars)
      out << d.degree << ',' << format_double(bar.birth) << ',' << format_double(bar.death) << '\n';
  }
}

std::vector<PersistenceDiagram> read_diagrams_csv(std::istream& in, int max_degree) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty diagram CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "degree,birth,death") throw ParseError("unexpected diagram CSV header", 1);
  std::vector<PersistenceDiagram> out;
  auto ensure = [&](int degree) {
    while (static_cast<int>(out.size()) <= degree)
      out.push_back(PersistenceDiagram{static_cast<int>(out.size()), {}});
  };
  ensure(max_degree);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = csv_split_line(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    double degree_value, birth, death;
    if (!parse_double(fields[0], degree_value) || !parse_double(fields[1], birth) ||
        !parse_double(fields[2], death))
      throw ParseError("bad number", line_no);
    const int degree = static_cast<int>(degree_value);
    if (degree < 0 || degree != degree_value) throw ParseError("bad degree", line_no);
    if (!(birth <= death)) throw ParseError("bar with birth > death", line_no);
    ensure(degree);
    out[static_cast<std::size_t>(degree)].bars.push_back({birth, death});
  }
  for (auto& d : out) d.normalize();
  return out;
}

}  // namespace embedshape
