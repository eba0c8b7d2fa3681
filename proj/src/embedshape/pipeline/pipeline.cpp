#include "embedshape/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/common/numfmt.hpp"
#include "embedshape/common/parallel.hpp"
#include "embedshape/common/rng.hpp"
#include "embedshape/ph/vietoris_rips.hpp"
#include "embedshape/pipeline/plot_svg.hpp"
#include "embedshape/significance/significance.hpp"

namespace embedshape {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Diagrams: return "diagrams";
    case Stage::LanguageDistances: return "langdist";
    case Stage::Trees: return "trees";
    case Stage::Evaluate: return "evaluate";
    case Stage::Qap: return "qap";
    case Stage::All: return "run";
  }
  return "?";
}

std::string config_hash(const RunConfig& config) {
  ojson j = run_config_to_json(config);
  j.erase("cache_dir");
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

namespace {

std::string key_of(std::initializer_list<std::string> parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined += p;
    joined += '\x1f';
  }
  return sha256_hex(joined);
}

std::string threshold_text(const RunConfig& c) {
  return c.ph_threshold ? format_double(*c.ph_threshold) : "enclosing";
}

std::string combo_name(Metric m, int degree, DiagramMethod method) {
  return std::string(metric_name(m)) + "_d" + std::to_string(degree) + "_" + diagram_method_name(method);
}

// Memoised result of a stage: either a value with its cache key or the
// error that stopped it.
template <class T>
struct Slot {
  bool done = false;
  std::string key;
  T value{};
  std::exception_ptr error;
};

struct StageStats {
  std::size_t computed = 0;
  std::size_t cached = 0;
  std::atomic<double> seconds = 0.0;
};

class Timer {
 public:
  explicit Timer(StageStats& stats) : stats_(stats), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    stats_.seconds.fetch_add(std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }

 private:
  StageStats& stats_;
  std::chrono::steady_clock::time_point start_;
};

std::string matrix_csv(const DistanceMatrix& m) {
  std::ostringstream out;
  write_matrix_csv(out, m);
  return out.str();
}

std::string diagrams_csv(const std::vector<PersistenceDiagram>& d) {
  std::ostringstream out;
  write_diagrams_csv(out, d);
  return out.str();
}

class Runner {
 public:
  explicit Runner(const RunConfig& config) : c_(config) {
    max_degree_ = 0;
    for (int d : c_.degrees) max_degree_ = std::max(max_degree_, d);
  }

  ojson run(Stage stop) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(c_.cache_dir);
    fs::create_directories(c_.output_dir);

    const std::size_t n_lang = c_.languages.size();
    token_.resize(n_lang * c_.metrics.size());
    diagrams_.resize(n_lang * c_.metrics.size());

    // Per-language work first, in parallel over (language, metric).
    const std::size_t items = n_lang * c_.metrics.size();
    // Errors stay memoised in their slots and surface per combination.
    parallel_for(items, c_.jobs, [&](std::size_t i) {
      try {
        token_matrix(i / c_.metrics.size(), i % c_.metrics.size(), 1);
      } catch (...) {
      }
    });
    if (stop != Stage::Ingest) {
      parallel_for(items, c_.jobs, [&](std::size_t i) {
        try {
          diagrams(i / c_.metrics.size(), i % c_.metrics.size(), 1);
        } catch (...) {
        }
      });
      if (c_.plots) write_plots();
    }

    if (stop != Stage::Ingest && stop != Stage::Diagrams) {
      for (std::size_t count : c_.effective_language_counts()) run_count(count, stop);
    }

    ojson manifest;
    manifest["version"] = EMBEDSHAPE_VERSION;
    manifest["generator"] = kGeneratorId;
    manifest["stage"] = stage_name(stop);
    manifest["config_hash"] = config_hash(c_);
    manifest["config"] = run_config_to_json(c_);
    manifest["config"].erase("cache_dir");
    manifest["config"].erase("output_dir");
    manifest["planned"] = {{"trees", c_.planned_trees()}, {"reports", c_.planned_reports()}};
    manifest["conventions"] = conventions();
    std::sort(artifacts_.begin(), artifacts_.end(),
              [](const ojson& a, const ojson& b) { return a["path"].get<std::string>() < b["path"].get<std::string>(); });
    manifest["artifacts"] = artifacts_;
    manifest["reports"] = reports_;
    manifest["qap"] = qap_;
    ojson language_failures = ojson::array();
    for (std::size_t i = 0; i < token_.size(); ++i) {
      const auto& slot = diagrams_[i].done ? diagrams_[i].error : token_[i].error;
      if (!slot) continue;
      ojson f{{"language", c_.languages[i / c_.metrics.size()].id},
              {"metric", metric_name(c_.metrics[i % c_.metrics.size()])}};
      try {
        std::rethrow_exception(slot);
      } catch (const Error& e) {
        f["error"] = error_code_name(e.code());
        f["message"] = e.what();
      } catch (const std::exception& e) {
        f["error"] = "internal";
        f["message"] = e.what();
      }
      language_failures.push_back(std::move(f));
    }
    manifest["language_failures"] = language_failures;
    manifest["failures"] = failures_;
    manifest["qap_failures"] = qap_failures_;
    ojson stages = ojson::object();
    for (const auto& [name, s] : stats_)
      stages[name] = {{"computed", s.computed}, {"cached", s.cached}, {"seconds", s.seconds.load()}};
    manifest["timings"] = {
        {"stages", stages},
        {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_file_atomic(c_.output_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
  }

 private:
  static ojson conventions() {
    return {{"percentile", "linear interpolation at h = (n-1)q"},
            {"std", "population"},
            {"bar_statistics", "mean,median,std,iqr,range,p10,p25,p75,p90,entropy"},
            {"entropy", "natural log; 0 when any value <= 0"},
            {"unmatched_split", "zero similarity; matching split prices the smaller side"},
            {"path_distance", "unit edge lengths, root node kept"},
            {"rank_p_value", "strictly better count / n"},
            {"generator", kGeneratorId}};
  }

  StageStats& stats(const char* name) {
    std::lock_guard<std::mutex> lock(mutex_);
    return stats_[name];
  }

  void count(const char* name, bool cached) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& s = stats_[name];
    ++(cached ? s.cached : s.computed);
  }

  // Records a readable copy of a cached artifact under output_dir.
  void publish(const std::string& stage, const fs::path& rel, const std::string& contents) {
    const fs::path dst = c_.output_dir / rel;
    std::error_code ec;
    if (!fs::exists(dst, ec) || read_file(dst) != contents) write_file_atomic(dst, contents);
    std::lock_guard<std::mutex> lock(mutex_);
    artifacts_.push_back({{"stage", stage}, {"path", rel.generic_string()}, {"sha256", sha256_hex(contents)}});
  }

  fs::path cache_path(const char* stage, const std::string& key, const char* ext) const {
    return c_.cache_dir / stage / (key + ext);
  }

  template <class T, class Compute>
  const Slot<T>& memo(Slot<T>& slot, Compute&& compute) {
    if (!slot.done) {
      try {
        compute(slot);
      } catch (...) {
        slot.error = std::current_exception();
      }
      slot.done = true;
    }
    if (slot.error) std::rethrow_exception(slot.error);
    return slot;
  }

  const Slot<DistanceMatrix>& token_matrix(std::size_t lang, std::size_t metric_index, int jobs) {
    return memo(token_[lang * c_.metrics.size() + metric_index], [&](Slot<DistanceMatrix>& slot) {
      const auto& in = c_.languages[lang];
      const Metric metric = c_.metrics[metric_index];
      try {
        slot.key = key_of({"tokens", "1", sha256_file(in.embedding_path), std::to_string(c_.token_count),
                           metric_name(metric)});
        const fs::path path = cache_path("tokens", slot.key, ".bin");
        Timer t(stats("tokens"));
        if (fs::exists(path)) {
          slot.value = load_matrix(path);
          count("tokens", true);
          return;
        }
        const EmbeddingSet emb = load_embedding(in.embedding_path, c_.token_count, in.id);
        slot.value = pairwise_distances(emb, metric, jobs);
        save_matrix(path, slot.value);
        count("tokens", false);
      } catch (const Error& e) {
        rethrow_with_context(e, "language '" + in.id + "' (" + metric_name(metric) + ")");
      }
    });
  }

  const Slot<std::vector<PersistenceDiagram>>& diagrams(std::size_t lang, std::size_t metric_index, int jobs) {
    return memo(diagrams_[lang * c_.metrics.size() + metric_index], [&](Slot<std::vector<PersistenceDiagram>>& slot) {
      const auto& tokens = token_matrix(lang, metric_index, jobs);
      slot.key = key_of({"diagrams", "1", tokens.key, std::to_string(max_degree_), threshold_text(c_),
                         c_.ph_cap_at_threshold ? "cap" : "drop"});
      const fs::path path = cache_path("diagrams", slot.key, ".csv");
      Timer t(stats("diagrams"));
      try {
        if (fs::exists(path)) {
          std::istringstream in(read_file(path));
          slot.value = read_diagrams_csv(in, max_degree_);
          count("diagrams", true);
        } else {
          VrOptions options{max_degree_, c_.ph_threshold, c_.ph_cap_at_threshold};
          slot.value = vr_persistence(tokens.value, options);
          write_file_atomic(path, diagrams_csv(slot.value));
          count("diagrams", false);
        }
      } catch (const Error& e) {
        rethrow_with_context(e, "diagrams of language '" + c_.languages[lang].id + "'");
      }
      publish("diagrams",
              fs::path("diagrams") / (c_.languages[lang].id + "_" + metric_name(c_.metrics[metric_index]) + ".csv"),
              diagrams_csv(slot.value));
    });
  }

  void write_plots() {
    for (std::size_t lang = 0; lang < c_.languages.size(); ++lang) {
      for (std::size_t m = 0; m < c_.metrics.size(); ++m) {
        try {
          const auto& d = diagrams(lang, m, 1);
          const std::string title = c_.languages[lang].id + " (" + metric_name(c_.metrics[m]) + ")";
          publish("plots", fs::path("plots") / (c_.languages[lang].id + "_" + metric_name(c_.metrics[m]) + ".svg"),
                  render_diagram_svg(d.value, title));
        } catch (const Error&) {
          // Reported through the combinations that need these diagrams.
        }
      }
    }
  }

  struct Combo {
    std::size_t count;
    std::size_t metric_index;
    int degree;
    DiagramMethod method;
  };

  ojson combo_json(const Combo& k) const {
    return {{"language_count", k.count},
            {"metric", metric_name(c_.metrics[k.metric_index])},
            {"degree", k.degree},
            {"diagram_distance", diagram_method_name(k.method)}};
  }

  Slot<DistanceMatrix> language_matrix(const Combo& k) {
    Slot<DistanceMatrix> slot;
    std::vector<std::string> ids;
    std::vector<PersistenceDiagram> per_language;
    std::string keys;
    for (std::size_t lang = 0; lang < k.count; ++lang) {
      const auto& d = diagrams(lang, k.metric_index, c_.jobs);
      ids.push_back(c_.languages[lang].id);
      per_language.push_back(d.value[static_cast<std::size_t>(k.degree)]);
      keys += ids.back() + "=" + d.key + ";";
    }
    CompareConfig cc;
    cc.sw_slices = c_.sw_slices;
    cc.image = c_.image_config(c_.metrics[k.metric_index], k.degree);
    const std::string params = k.method == DiagramMethod::SlicedWasserstein ? std::to_string(cc.sw_slices)
                               : k.method == DiagramMethod::PersistenceImage
                                   ? format_double(cc.image.range_min) + "," + format_double(cc.image.range_max) + "," +
                                         format_double(cc.image.sigma) + "," + std::to_string(cc.image.rows) + "x" +
                                         std::to_string(cc.image.cols)
                                   : "";
    slot.key = key_of({"langdist", "1", keys, std::to_string(k.degree), diagram_method_name(k.method), params});
    const fs::path path = cache_path("langdist", slot.key, ".csv");
    {
      Timer t(stats("langdist"));
      if (fs::exists(path)) {
        slot.value = load_matrix(path);
        count("langdist", true);
      } else {
        slot.value = language_distance_matrix(ids, per_language, k.method, cc, c_.jobs);
        write_file_atomic(path, matrix_csv(slot.value));
        count("langdist", false);
      }
    }
    const fs::path dir = fs::path("n" + std::to_string(k.count));
    publish("langdist", dir / "langdist" / (combo_name(c_.metrics[k.metric_index], k.degree, k.method) + ".csv"),
            matrix_csv(slot.value));
    if (k.method == DiagramMethod::PersistenceImage || k.method == DiagramMethod::BarStatistics) {
      std::vector<std::vector<double>> vectors;
      for (const auto& d : per_language)
        vectors.push_back(k.method == DiagramMethod::PersistenceImage ? persistence_image(d, cc.image).pixels
                                                                      : bar_statistics(d).values);
      std::ostringstream out;
      write_vectors_csv(out, ids, vectors);
      publish("vectors", dir / "vectors" / (combo_name(c_.metrics[k.metric_index], k.degree, k.method) + ".csv"),
              out.str());
    }
    return slot;
  }

  void fail(const ojson& where, const std::string& stage, const std::exception_ptr& error,
            const std::vector<TreeDistanceKind>& kinds) {
    std::string code = "internal", message;
    try {
      std::rethrow_exception(error);
    } catch (const Error& e) {
      code = error_code_name(e.code());
      message = e.what();
    } catch (const std::exception& e) {
      message = e.what();
    }
    for (auto kind : kinds) {
      ojson f = where;
      f["tree_metric"] = tree_distance_name(kind);
      f["stage"] = stage;
      f["error"] = code;
      f["message"] = message;
      failures_.push_back(std::move(f));
    }
  }

  void run_count(std::size_t count, Stage stop) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < count; ++i) ids.push_back(c_.languages[i].id);
    const fs::path dir = fs::path("n" + std::to_string(count));

    // The reference restricted to this prefix of languages.
    std::exception_ptr ref_error;
    PhyloTree reference;
    std::string ref_newick;
    const bool needs_reference = stop == Stage::Evaluate || stop == Stage::Qap || stop == Stage::All;
    if (needs_reference) {
      try {
        reference = restrict_reference(read_newick_file(c_.reference_tree_path), ids);
        ref_newick = write_newick(reference);
        publish("reference", dir / "reference.nwk", ref_newick + "\n");
      } catch (...) {
        ref_error = std::current_exception();
      }
    }

    for (std::size_t mi = 0; mi < c_.metrics.size(); ++mi) {
      for (int degree : c_.degrees) {
        for (DiagramMethod method : c_.diagram_distances) {
          const Combo k{count, mi, degree, method};
          const ojson where = combo_json(k);
          Slot<DistanceMatrix> matrix;
          try {
            matrix = language_matrix(k);
          } catch (...) {
            for (auto alg : c_.tree_algorithms) {
              ojson w = where;
              w["tree_algorithm"] = tree_algorithm_name(alg);
              fail(w, "langdist", std::current_exception(), c_.tree_metrics);
            }
            continue;
          }
          if ((stop == Stage::Qap || stop == Stage::All) && c_.qap.enabled) run_qap(k, matrix, reference, ref_error);
          if (stop == Stage::LanguageDistances || stop == Stage::Qap) continue;
          for (TreeAlgorithm alg : c_.tree_algorithms) run_tree(k, alg, matrix, reference, ref_newick, ref_error, stop);
        }
      }
    }
  }

  void run_tree(const Combo& k, TreeAlgorithm alg, const Slot<DistanceMatrix>& matrix, const PhyloTree& reference,
                const std::string& ref_newick, const std::exception_ptr& ref_error, Stage stop) {
    ojson where = combo_json(k);
    where["tree_algorithm"] = tree_algorithm_name(alg);
    const std::string name = combo_name(c_.metrics[k.metric_index], k.degree, k.method) + "_" + tree_algorithm_name(alg);
    const fs::path dir = fs::path("n" + std::to_string(k.count));

    PhyloTree tree;
    const std::string tree_key = key_of({"tree", "1", matrix.key, tree_algorithm_name(alg)});
    try {
      const fs::path path = cache_path("trees", tree_key, ".nwk");
      Timer t(stats("trees"));
      if (fs::exists(path)) {
        tree = read_newick_file(path);
        count("trees", true);
      } else {
        tree = build_tree(matrix.value, alg);
        write_file_atomic(path, write_newick(tree) + "\n");
        count("trees", false);
      }
      publish("trees", dir / "trees" / (name + ".nwk"), write_newick(tree) + "\n");
    } catch (...) {
      fail(where, "trees", std::current_exception(), c_.tree_metrics);
      return;
    }
    if (stop == Stage::Trees) return;
    if (ref_error) {
      fail(where, "evaluate", ref_error, c_.tree_metrics);
      return;
    }

    for (TreeDistanceKind kind : c_.tree_metrics) {
      ojson report_where = where;
      report_where["tree_metric"] = tree_distance_name(kind);
      const std::string key = key_of({"report", "1", tree_key, sha256_hex(ref_newick), tree_distance_name(kind),
                                      std::to_string(c_.n_permutations), std::to_string(c_.seed)});
      try {
        const fs::path path = cache_path("reports", key, ".json");
        std::string text;
        {
          Timer t(stats("reports"));
          if (fs::exists(path)) {
            text = read_file(path);
            count("reports", true);
          } else {
            SignificanceReport r = leaf_permutation_test(tree, reference, kind, c_.n_permutations, c_.seed, c_.jobs);
            r.metadata = report_where;
            r.metadata["reference_sha256"] = sha256_hex(ref_newick);
            text = report_to_json(r).dump(2) + "\n";
            write_file_atomic(path, text);
            count("reports", false);
          }
        }
        const fs::path rel = dir / "reports" / (name + "_" + tree_distance_name(kind) + ".json");
        publish("reports", rel, text);
        ojson entry = report_where;
        entry["path"] = rel.generic_string();
        entry["sha256"] = sha256_hex(text);
        reports_.push_back(std::move(entry));
      } catch (...) {
        fail(where, "evaluate", std::current_exception(), {kind});
      }
    }
  }

  void run_qap(const Combo& k, const Slot<DistanceMatrix>& matrix, const PhyloTree& reference,
               const std::exception_ptr& ref_error) {
    ojson where = combo_json(k);
    const std::string name = combo_name(c_.metrics[k.metric_index], k.degree, k.method);
    try {
      if (ref_error) std::rethrow_exception(ref_error);
      const std::string key =
          key_of({"qap", "1", matrix.key, sha256_hex(write_newick(reference)), std::to_string(c_.qap.restarts),
                  std::to_string(c_.qap.stall_limit), std::to_string(c_.qap.n_permutations), std::to_string(c_.seed)});
      const fs::path path = cache_path("qap", key, ".json");
      std::string text;
      {
        Timer t(stats("qap"));
        if (fs::exists(path)) {
          text = read_file(path);
          count("qap", true);
        } else {
          QapOptions options;
          options.restarts = c_.qap.restarts;
          options.stall_limit = c_.qap.stall_limit;
          options.seed = c_.seed;
          options.jobs = c_.jobs;
          const LabelingResult labeling = qap_flip_optimize(reference, matrix.value, options);
          SignificanceReport r =
              labeling_permutation_test(reference, labeling, matrix.value, c_.qap.n_permutations, c_.seed, c_.jobs);
          r.metadata = where;
          ojson doc;
          doc["labeling"] = labeling_to_json(labeling);
          doc["report"] = report_to_json(r);
          text = doc.dump(2) + "\n";
          write_file_atomic(path, text);
          count("qap", false);
        }
      }
      const fs::path rel = fs::path("n" + std::to_string(k.count)) / "qap" / (name + ".json");
      publish("qap", rel, text);
      ojson entry = where;
      entry["path"] = rel.generic_string();
      entry["sha256"] = sha256_hex(text);
      qap_.push_back(std::move(entry));
    } catch (const Error& e) {
      ojson f = where;
      f["stage"] = "qap";
      f["error"] = error_code_name(e.code());
      f["message"] = e.what();
      qap_failures_.push_back(std::move(f));
    }
  }

  const RunConfig& c_;
  int max_degree_;
  std::vector<Slot<DistanceMatrix>> token_;
  std::vector<Slot<std::vector<PersistenceDiagram>>> diagrams_;
  std::mutex mutex_;
  std::map<std::string, StageStats> stats_;
  ojson artifacts_ = ojson::array();
  ojson reports_ = ojson::array();
  ojson qap_ = ojson::array();
  ojson failures_ = ojson::array();
  ojson qap_failures_ = ojson::array();
};

}  // namespace

ojson run_pipeline(const RunConfig& config, Stage stop) {
  Runner runner(config);
  return runner.run(stop);
}

}  // namespace embedshape
