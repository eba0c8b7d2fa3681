#include "embedshape/pipeline/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"

namespace embedshape {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string meta(const SignificanceReport& r, const char* key) {
  if (!r.metadata.contains(key)) return "?";
  const auto& v = r.metadata.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  ojson value() const { return n ? ojson(sum / static_cast<double>(n)) : ojson(nullptr); }
  std::string text() const { return n ? fixed(sum / static_cast<double>(n), 2) : "-"; }
};

}  // namespace

double bonferroni_p(double z, std::size_t n_tests) {
  const double tail = 0.5 * std::erfc(z / std::sqrt(2.0));
  return std::min(1.0, tail * static_cast<double>(n_tests));
}

double floored_p_value(const SignificanceReport& r) {
  return std::max(r.rank_p_value, 1.0 / static_cast<double>(r.n_permutations));
}

Summary summarize_reports(std::span<const SignificanceReport> all) {
  std::vector<const SignificanceReport*> reports;
  for (const auto& r : all)
    if (!r.higher_is_better) reports.push_back(&r);
  if (reports.empty()) throw EmptyInputError("no tree-distance reports to summarize");

  // Tree metric columns in first-seen order.
  std::vector<std::string> kinds;
  for (const auto* r : reports)
    if (std::find(kinds.begin(), kinds.end(), r->metric_kind) == kinds.end()) kinds.push_back(r->metric_kind);
  auto column = [&](const SignificanceReport& r) {
    return static_cast<std::size_t>(std::find(kinds.begin(), kinds.end(), r.metric_kind) - kinds.begin());
  };
  const std::size_t cols = kinds.size() + 1;  // "all" first

  Summary s;
  std::string& md = s.markdown;
  auto header = [&](const std::string& first) {
    md += "| " + first + " | all |";
    for (const auto& k : kinds) md += " " + k + " |";
    md += "\n|---|---|";
    for (std::size_t i = 0; i < kinds.size(); ++i) md += "---|";
    md += "\n";
  };

  std::vector<std::size_t> totals(cols, 0);
  for (const auto* r : reports) {
    ++totals[0];
    ++totals[column(*r) + 1];
  }

  // z thresholds
  ojson z_table = ojson::array();
  md += "## Reports beyond z thresholds\n\n";
  header("z >");
  md += "| total |";
  for (auto t : totals) md += " " + std::to_string(t) + " |";
  md += "\n";
  for (int k = 1; k <= 6; ++k) {
    std::vector<std::size_t> counts(cols, 0);
    for (const auto* r : reports) {
      if (r->z_defined && r->z_score > k) {
        ++counts[0];
        ++counts[column(*r) + 1];
      }
    }
    ojson row{{"z_greater_than", k}};
    md += "| " + std::to_string(k) + " |";
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string name = c == 0 ? "all" : kinds[c - 1];
      row[name] = {{"count", counts[c]}, {"fraction", static_cast<double>(counts[c]) / static_cast<double>(totals[c])}};
      md += " " + std::to_string(counts[c]) + " |";
    }
    md += "\n";
    z_table.push_back(std::move(row));
  }
  s.json["z_thresholds"] = z_table;

  // rank p thresholds
  ojson p_table = ojson::array();
  md += "\n## Reports within rank p-value thresholds\n\n";
  header("p <=");
  for (double t : kPThresholds) {
    std::vector<std::size_t> counts(cols, 0);
    for (const auto* r : reports) {
      if (floored_p_value(*r) <= t) {
        ++counts[0];
        ++counts[column(*r) + 1];
      }
    }
    ojson row{{"p_at_most", t}};
    md += "| " + sci(t) + " |";
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string name = c == 0 ? "all" : kinds[c - 1];
      row[name] = {{"count", counts[c]}, {"fraction", static_cast<double>(counts[c]) / static_cast<double>(totals[c])}};
      md += " " + std::to_string(counts[c]) + " |";
    }
    md += "\n";
    p_table.push_back(std::move(row));
  }
  s.json["p_thresholds"] = p_table;

  // Mean z per parameter value, one block per parameter.
  struct Block {
    const char* name;
    std::function<std::string(const SignificanceReport&)> key;
  };
  const Block blocks[] = {
      {"metric_degree", [](const SignificanceReport& r) { return meta(r, "metric") + ", dim " + meta(r, "degree"); }},
      {"diagram_distance", [](const SignificanceReport& r) { return meta(r, "diagram_distance"); }},
      {"tree_algorithm", [](const SignificanceReport& r) { return meta(r, "tree_algorithm"); }},
  };
  md += "\n## Mean z by parameter\n\n| parameter |";
  for (const auto& k : kinds) md += " " + k + " |";
  md += " mean |\n|---|";
  for (std::size_t i = 0; i < kinds.size(); ++i) md += "---|";
  md += "---|\n";
  ojson means = ojson::object();
  for (const auto& block : blocks) {
    std::vector<std::string> rows;
    std::map<std::string, std::vector<Mean>> cells;
    for (const auto* r : reports) {
      const std::string key = block.key(*r);
      auto [it, inserted] = cells.try_emplace(key, std::vector<Mean>(cols));
      if (inserted) rows.push_back(key);
      if (!r->z_defined) continue;
      it->second[0].add(r->z_score);
      it->second[column(*r) + 1].add(r->z_score);
    }
    std::sort(rows.begin(), rows.end());
    ojson block_json = ojson::array();
    for (const auto& row : rows) {
      const auto& m = cells[row];
      ojson entry{{"value", row}};
      md += "| " + row + " |";
      for (std::size_t c = 1; c < cols; ++c) {
        entry[kinds[c - 1]] = m[c].value();
        md += " " + m[c].text() + " |";
      }
      entry["mean"] = m[0].value();
      md += " " + m[0].text() + " |\n";
      block_json.push_back(std::move(entry));
    }
    means[block.name] = block_json;
  }
  s.json["mean_z"] = means;

  // Largest z and its corrected tail probability.
  const SignificanceReport* best = nullptr;
  for (const auto* r : reports)
    if (r->z_defined && (!best || r->z_score > best->z_score)) best = r;
  ojson max_z = nullptr;
  md += "\n## Largest z\n\n";
  if (best) {
    max_z = {{"z", best->z_score},
             {"n_tests", reports.size()},
             {"one_sided_p", bonferroni_p(best->z_score, 1)},
             {"bonferroni_p", bonferroni_p(best->z_score, reports.size())},
             {"metadata", best->metadata}};
    md += "z = " + fixed(best->z_score, 2) + " over " + std::to_string(reports.size()) +
          " tests; Bonferroni-corrected p = " + sci(bonferroni_p(best->z_score, reports.size())) + "\n";
  } else {
    md += "no report has a defined z\n";
  }
  s.json["max_z"] = max_z;

  ojson listing = ojson::array();
  for (const auto* r : reports) {
    ojson e = r->metadata;
    e["tree_metric"] = r->metric_kind;
    e["z_score"] = r->z_defined ? ojson(r->z_score) : ojson(nullptr);
    e["p_value"] = floored_p_value(*r);
    e["p_display"] = r->n_strictly_better == 0 ? "< 1/n" : sci(r->rank_p_value);
    listing.push_back(std::move(e));
  }
  s.json["reports"] = listing;
  s.json["total"] = reports.size();
  return s;
}

std::vector<SignificanceReport> load_reports(const fs::path& source) {
  std::vector<fs::path> files;
  if (fs::is_directory(source)) {
    for (const auto& entry : fs::recursive_directory_iterator(source))
      if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "manifest.json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    const auto manifest = nlohmann::ordered_json::parse(read_file(source), nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("reports"))
      throw ParseError(source.string() + " is not a run manifest");
    for (const auto& r : manifest.at("reports")) files.push_back(source.parent_path() / r.at("path").get<std::string>());
  }
  std::vector<SignificanceReport> out;
  for (const auto& f : files) {
    const auto doc = nlohmann::ordered_json::parse(read_file(f), nullptr, false);
    if (doc.is_discarded()) throw ParseError(f.string() + " is not valid JSON");
    if (doc.is_object() && doc.contains("metric_kind") && doc.contains("observed")) out.push_back(report_from_json(doc));
  }
  return out;
}

}  // namespace embedshape
