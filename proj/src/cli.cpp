#include "glmp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <system_error>
#include <thread>

#include "glmp/analysis.hpp"
#include "glmp/dsl.hpp"
#include "glmp/ingest.hpp"
#include "glmp/network.hpp"
#include "glmp/report.hpp"

namespace fs = std::filesystem;

namespace glmp::cli {

fs::path resolve_input(const fs::path& path) {
  std::error_code ec;
  if (fs::exists(path, ec) || path.is_absolute()) return path;
  if (const char* root = std::getenv("GLMP_FIXTURES"); root && *root) {
    fs::path candidate = fs::path(root) / path;
    if (fs::exists(candidate, ec)) return candidate;
  }
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || fs::is_directory(path)) {
    throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                            "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  const fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) +
         "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::system_error(errno ? errno : EACCES, std::generic_category(),
                              "cannot write " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw std::system_error(errno ? errno : EIO, std::generic_category(),
                              "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::system_error(ec, "cannot replace " + path.string());
  }
}

namespace {

void print(std::ostream& os, const Diagnostics& ds, int verbosity) {
  for (const auto& d : ds) {
    if (d.severity == Severity::Warning && verbosity == 0) continue;
    os << format(d) << '\n';
  }
}

// Loads and validates a model. Returns an exit code when it cannot be used.
std::optional<int> load_model(const fs::path& path, std::ostream& out, std::ostream& err,
                              int verbosity, std::optional<GlmpModel>& model) {
  ModelSource src;
  try {
    src = ModelSource::from_file(resolve_input(path));
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  ParseResult parsed = parse_model(src);
  print(out, parsed.diagnostics, verbosity);
  if (!parsed.ok()) return kValidationFailure;
  model = std::move(parsed.model);
  return std::nullopt;
}

struct Job {
  const MeasureBundle* bundle;
  std::optional<EvaluationTrace> trace;
  std::string error;
};

}  // namespace

int cmd_validate(const fs::path& model, std::ostream& out, std::ostream& err) {
  std::optional<GlmpModel> m;
  if (auto code = load_model(model, out, err, 1, m)) return *code;
  return kOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.tie_epsilon >= 0.0 && cfg.tie_epsilon < 1.0)) {
    err << "error: --tie-epsilon must lie in [0, 1)\n";
    return kValidationFailure;
  }
  std::optional<GlmpModel> model;
  if (auto code = load_model(cfg.model, err, err, cfg.verbosity, model)) return *code;

  bool failed = false;
  std::vector<MeasureBundle> bundles;
  for (const auto& input : cfg.inputs) {
    const fs::path path = resolve_input(input);
    const auto fmt = format_from_path(path);
    if (!fmt) {
      err << "error: " << path.string() << ": unknown bundle format (expected .json or .csv)\n";
      return kValidationFailure;
    }
    LoadResult loaded;
    try {
      loaded = load_bundles(path, *fmt, *model);
    } catch (const std::system_error& e) {
      err << "error: " << e.what() << '\n';
      return kIoFailure;
    }
    for (auto& d : loaded.diagnostics) {
      if (d.severity == Severity::Warning && cfg.verbosity == 0) continue;
      err << path.filename().string() << ':' << format(d) << '\n';
    }
    failed = failed || has_errors(loaded.diagnostics);
    for (auto& b : loaded.bundles) bundles.push_back(std::move(b));
  }

  const bool fit = std::any_of(model->measures.begin(), model->measures.end(),
                               [](const MeasureSpec& m) { return m.cohort_range; });
  auto shared = std::make_shared<const GlmpModel>(fit ? fit_cohort_bounds(*model, bundles)
                                                      : std::move(*model));

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << cfg.out_dir.string() << ": " << ec.message() << '\n';
    return kIoFailure;
  }

  std::vector<Job> jobs;
  jobs.reserve(bundles.size());
  for (const auto& b : bundles) jobs.push_back({&b, std::nullopt, {}});
  std::atomic<std::size_t> next{0};
  std::atomic<bool> io_failed{false};
  std::mutex io_mutex;
  std::string io_message;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      try {
        job.trace = evaluate_network(shared, *job.bundle, cfg.tie_epsilon);
        const fs::path dest = cfg.out_dir / job.bundle->student / job.bundle->task / "prereport.json";
        write_file_atomic(dest, prereport_to_json(build_prereport(*job.trace)));
      } catch (const std::system_error& e) {
        io_failed = true;
        std::lock_guard lock(io_mutex);
        if (io_message.empty()) io_message = e.what();
      } catch (const std::exception& e) {
        job.trace.reset();
        job.error = e.what();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (io_failed) {
    err << "error: " << io_message << '\n';
    return kIoFailure;
  }

  std::vector<EvaluationTrace> traces;
  std::size_t evaluated = 0;
  for (auto& job : jobs) {
    if (job.trace) {
      ++evaluated;
      for (const auto& w : job.trace->warnings) {
        if (cfg.verbosity > 0) err << "warning: " << job.bundle->student << '/' << job.bundle->task << ": " << w << '\n';
      }
      traces.push_back(std::move(*job.trace));
    } else {
      failed = true;
      err << "error: " << job.error << '\n';
    }
  }
  try {
    write_file_atomic(cfg.out_dir / "labels.csv", cohort_table(traces).to_csv());
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  out << "evaluated " << evaluated << " bundles";
  if (evaluated != bundles.size()) out << " (" << bundles.size() - evaluated << " failed)";
  out << '\n';
  return failed ? kValidationFailure : kOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  const fs::path input = cfg.inputs.empty() ? cfg.out_dir : resolve_input(cfg.inputs.front());
  std::error_code ec;
  if (fs::is_directory(input, ec)) {
    for (auto it = fs::recursive_directory_iterator(input, ec);
         !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
      if (it->is_regular_file() && it->path().filename() == "prereport.json") {
        files.push_back(it->path());
      }
    }
    std::sort(files.begin(), files.end());
    if (ec) {
      err << "error: cannot list " << input.string() << ": " << ec.message() << '\n';
      return kIoFailure;
    }
    if (files.empty()) {
      err << "error: no prereport.json under " << input.string() << '\n';
      return kValidationFailure;
    }
  } else if (fs::exists(input, ec)) {
    files.push_back(input);
  } else {
    err << "error: cannot read " << input.string() << '\n';
    return kIoFailure;
  }

  std::string prompt_template(default_prompt_template());
  std::string prompt_id(kDefaultPromptId);
  try {
    if (cfg.prompt_template) {
      const fs::path p = resolve_input(*cfg.prompt_template);
      prompt_template = read_file(p);
      prompt_id = p.stem().string();
    }
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }

  bool failed = false;
  std::size_t rendered = 0;
  for (const auto& file : files) {
    try {
      const PreReport pre = prereport_from_json(read_file(file));
      const std::string md = render_text(pre).markdown();
      if (auto jargon = find_jargon(md, default_jargon_blocklist()); !jargon.empty()) {
        err << "error: " << file.string() << ": report uses technical terms:";
        for (const auto& j : jargon) err << " '" << j << "'";
        err << '\n';
        failed = true;
        continue;
      }
      write_file_atomic(file.parent_path() / "report.md", md);
      if (cfg.prompt) {
        write_file_atomic(file.parent_path() / "prompt.txt",
                          emit_prompt_package(pre, prompt_template, prompt_id).text);
      }
      ++rendered;
      if (cfg.verbosity > 1) out << "wrote " << (file.parent_path() / "report.md").string() << '\n';
    } catch (const std::system_error& e) {
      err << "error: " << e.what() << '\n';
      return kIoFailure;
    } catch (const SchemaError& e) {
      err << "error: " << file.string() << ": " << e.what() << '\n';
      failed = true;
    }
  }
  out << "rendered " << rendered << " reports\n";
  return failed ? kValidationFailure : kOk;
}

int cmd_correlate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string labels_text, ratings_text, mapping_text;
  try {
    labels_text = read_file(resolve_input(cfg.labels));
    ratings_text = read_file(resolve_input(cfg.ratings));
    if (cfg.mapping) mapping_text = read_file(resolve_input(*cfg.mapping));
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  std::vector<CorrelationRow> rows;
  try {
    const LabelsTable labels = LabelsTable::from_csv(labels_text);
    const RatingsTable ratings = RatingsTable::from_csv(ratings_text);
    const LabelScoreMapping mapping =
        cfg.mapping ? LabelScoreMapping::from_csv(mapping_text) : LabelScoreMapping();
    rows = correlate_all(labels, mapping, ratings);
  } catch (const TableError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
  if (rows.empty()) {
    err << "error: no (group, task) pair of the ratings has label columns\n";
    return kValidationFailure;
  }
  for (const auto& r : rows) {
    const std::string cell = r.group + " " + r.task + " " + r.skill;
    if (!r.r) err << "n/a: " << cell << ": " << r.reason << '\n';
    if (cfg.verbosity == 0) continue;
    const auto list = [&](const std::vector<std::string>& who, const char* what) {
      if (who.empty()) return;
      err << "warning: " << cell << ": " << who.size() << " student(s) " << what << ':';
      for (const auto& s : who) err << ' ' << s;
      err << '\n';
    };
    list(r.unrated, "without a rating");
    list(r.unlabeled, "without a label");
  }
  const std::string csv = correlations_to_csv(rows);
  if (!cfg.output) {
    out << csv;
    return kOk;
  }
  try {
    write_file_atomic(*cfg.output, csv);
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  for (const auto& r : rows) {
    out << r.group << ' ' << r.task << ' ' << r.skill << ": n=" << r.n << " r=";
    if (r.r) out << std::fixed << std::setprecision(2) << *r.r << std::defaultfloat;
    else out << "n/a";
    out << '\n';
  }
  return kOk;
}

}  // namespace glmp::cli
