// Command-line front end over the embedshape C API.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "embedshape/embedshape.h"

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  int jobs = 0;
};

int report_failure(es_status status) {
  std::fprintf(stderr, "error [%s]: %s\n", es_status_name(status), es_last_error());
  return 1;
}

int run_stage(const GlobalOptions& g, const char* stage) {
  if (g.config.empty()) {
    std::fprintf(stderr, "error: --config is required for '%s'\n", stage);
    return 2;
  }
  es_run_options options{};
  options.stage = stage;
  options.has_seed = g.seed.has_value() ? 1 : 0;
  options.seed = g.seed.value_or(0);
  options.cache_dir = g.cache_dir.empty() ? nullptr : g.cache_dir.c_str();
  options.jobs = g.jobs;
  char* manifest = nullptr;
  const es_status status = es_pipeline_run(g.config.c_str(), &options, &manifest);
  if (status != ES_OK) return report_failure(status);
  std::fputs(manifest, stdout);
  std::fputc('\n', stdout);
  es_string_free(manifest);
  return 0;
}

int run_summarize(const std::string& source, const std::string& out_dir) {
  char* summary = nullptr;
  const es_status status = es_summarize(source.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), &summary);
  if (status != ES_OK) return report_failure(status);
  std::fputs(summary, stdout);
  es_string_free(summary);
  return 0;
}

int run_plot(const std::string& input, const std::string& output, const std::string& title) {
  es_diagrams* diagrams = nullptr;
  es_status status = es_diagrams_load_csv(input.c_str(), &diagrams);
  if (status != ES_OK) return report_failure(status);
  status = es_plot_diagrams(diagrams, title.c_str(), output.c_str());
  es_diagrams_free(diagrams);
  return status == ES_OK ? 0 : report_failure(status);
}

int run_synth(const std::string& dir, const es_synth_options& options) {
  char* config = nullptr;
  const es_status status = es_synthesize(dir.c_str(), &options, &config);
  if (status != ES_OK) return report_failure(status);
  std::printf("%s\n", config);
  es_string_free(config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistent homology of word embeddings compared against language trees"};
  app.set_version_flag("--version", std::string(es_version()));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--cache-dir", g.cache_dir, "Override the cache directory");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::NonNegativeNumber);

  struct StageCommand {
    const char* name;
    const char* help;
  };
  const StageCommand stages[] = {
      {"ingest", "Load embeddings and cache token distance matrices"},
      {"diagrams", "Compute persistence diagrams"},
      {"langdist", "Compute language distance matrices"},
      {"trees", "Build UPGMA/NJ trees"},
      {"evaluate", "Run leaf-permutation tests against the reference tree"},
      {"qap", "Optimise leaf labelings and test them"},
      {"run", "Run the full pipeline"},
  };
  std::string chosen_stage;
  for (const auto& s : stages) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->callback([&chosen_stage, name = s.name] { chosen_stage = name; });
  }

  std::string summary_source, summary_out;
  auto* summarize = app.add_subcommand("summarize", "Summary tables over a manifest or report directory");
  summarize->add_option("source", summary_source, "manifest.json or a directory of reports")->required();
  summarize->add_option("-o,--out", summary_out, "Directory for summary.json and summary.md");

  std::string plot_input, plot_output, plot_title;
  auto* plot = app.add_subcommand("plot", "Render a diagrams CSV as SVG");
  plot->add_option("input", plot_input, "Diagrams CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--out", plot_output, "SVG output path")->required();
  plot->add_option("--title", plot_title, "Plot title");

  es_synth_options synth_options;
  es_synth_options_default(&synth_options);
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset with its config");
  synth->add_option("dir", synth_dir, "Output directory")->required();
  synth->add_option("--languages", synth_options.n_languages, "Number of languages");
  synth->add_option("--templates", synth_options.n_templates, "Number of shared templates");
  synth->add_option("--tokens", synth_options.tokens, "Tokens per language");
  synth->add_option("--dim", synth_options.dim, "Embedding dimension");
  synth->add_option("--noise", synth_options.language_noise, "Per-language jitter");

  CLI11_PARSE(app, argc, argv);

  if (!chosen_stage.empty()) return run_stage(g, chosen_stage.c_str());
  if (summarize->parsed()) return run_summarize(summary_source, summary_out);
  if (plot->parsed()) return run_plot(plot_input, plot_output, plot_title);
  if (synth->parsed()) {
    if (g.seed) synth_options.seed = *g.seed;
    return run_synth(synth_dir, synth_options);
  }
  return 2;
}
