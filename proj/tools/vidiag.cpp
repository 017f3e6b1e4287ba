#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vidiag/analysis/ops.h"
#include "vidiag/analysis/table.h"
#include "vidiag/corpus/metadata.h"
#include "vidiag/corpus/profiles.h"
#include "vidiag/corpus/prompt.h"
#include "vidiag/diagnosis/report.h"
#include "vidiag/jsonio.h"
#include "vidiag/pipeline/pipeline.h"

namespace fs = std::filesystem;
using namespace vidiag;

namespace {

constexpr int kSchemaExit = 2;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out.good()) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

corpus::MetadataEntry find_metadata(const std::string& corpus_dir, const std::string& meta_id) {
  const auto loaded = corpus::validate_corpus_dir(corpus_dir);
  for (const auto& entry : loaded.entries)
    if (entry.meta_id == meta_id) return entry;
  throw std::runtime_error("metadata id '" + meta_id + "' not found under " + corpus_dir);
}

corpus::UserProfile find_profile(const std::string& profile_id, const EngineConfig& config) {
  std::vector<corpus::UserProfile> pool;
  if (!config.profiles_path.empty())
    pool = corpus::load_profiles(config.profiles_path);
  else
    pool = corpus::builtin_profiles();
  pool.push_back(corpus::neutral_profile());
  for (const auto& p : pool)
    if (p.profile_id == profile_id) return p;
  throw std::runtime_error("profile id '" + profile_id + "' not known");
}

analysis::ResultTable load_table(const std::string& in_path) {
  if (fs::is_directory(in_path)) return analysis::ingest_reports(in_path);
  return analysis::load_csv(in_path);
}

int cmd_validate(const std::string& corpus_dir) {
  const auto result = corpus::validate_corpus_dir(corpus_dir);
  for (const auto& [file, violation] : result.issues)
    std::cerr << file << ": " << violation.path << ": " << violation.message << "\n";
  std::cout << result.entries.size() << " entries, " << result.issues.size()
            << " violations\n";
  return result.ok() ? 0 : kSchemaExit;
}

int cmd_gen_prompt(const std::string& corpus_dir, const std::string& meta_id,
                   const std::string& profile_id, const std::string& backend_name,
                   uint64_t seed, const std::string& config_path) {
  const EngineConfig config = resolve_config(config_path);
  const auto m = find_metadata(corpus_dir, meta_id);
  const auto u = find_profile(profile_id, config);

  std::unique_ptr<corpus::PromptBackend> backend;
  if (backend_name == "template")
    backend = std::make_unique<corpus::TemplatePromptBackend>(config);
  else
    backend = std::make_unique<corpus::RemotePromptBackend>(config);

  try {
    const auto prompt = corpus::generate_prompt(m, u, *backend, config, seed);
    std::cout << prompt.text << "\n";
    return 0;
  } catch (const corpus::PromptRejected& e) {
    std::cerr << e.what() << "\n";
    for (const auto& v : e.gate_report)
      if (!v.passed) std::cerr << "  gate " << v.gate_id << ": " << v.note << "\n";
    return kSchemaExit;
  }
}

int cmd_evaluate(const std::string& corpus_dir, const std::string& video,
                 const std::string& meta_id, const std::string& profile_id,
                 const std::string& judge_name, uint64_t seed, const std::string& out_dir,
                 const std::string& config_path) {
  const EngineConfig config = resolve_config(config_path);
  const auto m = find_metadata(corpus_dir, meta_id);
  const auto u = find_profile(profile_id, config);

  pipeline::PipelineAdapters adapters = pipeline::mock_adapters(seed);
  if (judge_name == "remote") {
    if (config.remote_judge_url.empty())
      throw std::runtime_error("--judge remote needs remote_judge_url in the config");
    adapters.judge = std::make_shared<pipeline::RemoteJudge>(config);
  }

  const auto report = pipeline::run_pipeline(video, m, u, config, adapters, seed, out_dir);
  std::cout << diagnosis::serialize_report(report);
  return 0;
}

int cmd_report(const std::string& run_dir, const std::string& format) {
  const auto report = diagnosis::parse_report(slurp(fs::path(run_dir) / "report.json"));
  if (format == "markdown")
    std::cout << diagnosis::render_markdown(report);
  else
    std::cout << diagnosis::serialize_report(report);
  return 0;
}

int cmd_analyze(const std::string& op, const std::string& in_path, const std::string& out_path) {
  const analysis::ResultTable table = load_table(in_path);
  nlohmann::ordered_json series;
  if (op == "bottlenecks")
    series = analysis::bottlenecks_to_json(analysis::global_bottleneck_ranking(table));
  else if (op == "signature")
    series = analysis::signature_to_json(analysis::cohort_signature(table));
  else if (op == "stratify")
    series = analysis::stratification_to_json(analysis::stratify_by_type(table));
  else if (op == "heatmap")
    series = analysis::heatmap_to_json(
        analysis::column_normalize(analysis::dimension_matrix(table)));
  else
    series = analysis::sensitivity_to_json(
        analysis::profile_sensitivity(table, analysis::sensitivity_profiles()));
  emit(canonical_dump(series), out_path);
  return 0;
}

int cmd_export(const std::string& in_path, const std::string& out_path) {
  emit(analysis::to_csv(load_table(in_path)), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagnostic evaluation engine for long-form generated video"};
  app.require_subcommand(1);

  std::string corpus_dir = "data/corpus";
  std::string config_path;
  app.add_option("--corpus", corpus_dir, "metadata corpus directory")
      ->capture_default_str();
  app.add_option("--config", config_path, "engine config JSON (or $VIDIAG_CONFIG)");

  auto* validate = app.add_subcommand("validate", "validate a metadata corpus directory");
  std::string validate_dir;
  validate->add_option("dir", validate_dir, "corpus directory")->required();

  auto* gen = app.add_subcommand("gen-prompt", "generate a personalized prompt");
  std::string gen_meta, gen_profile, gen_backend = "template";
  uint64_t gen_seed = 0;
  gen->add_option("--meta", gen_meta, "metadata id")->required();
  gen->add_option("--profile", gen_profile, "profile id")->required();
  gen->add_option("--backend", gen_backend, "template|llm")
      ->check(CLI::IsMember({"template", "llm", "remote"}))
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "generation seed");

  auto* eval = app.add_subcommand("evaluate", "run the full evaluation pipeline");
  std::string eval_video, eval_meta, eval_profile, eval_judge = "mock", eval_out;
  uint64_t eval_seed = 0;
  eval->add_option("--video", eval_video, "video file (.y4m)")->required();
  eval->add_option("--meta", eval_meta, "metadata id")->required();
  eval->add_option("--profile", eval_profile, "profile id")->required();
  eval->add_option("--judge", eval_judge, "mock|remote")
      ->check(CLI::IsMember({"mock", "remote"}))
      ->capture_default_str();
  eval->add_option("--seed", eval_seed, "judge seed");
  eval->add_option("--out", eval_out, "run artifact directory");

  auto* rep = app.add_subcommand("report", "render a stored run report");
  std::string rep_run, rep_format = "json";
  rep->add_option("--run", rep_run, "run artifact directory")->required();
  rep->add_option("--format", rep_format, "json|markdown")
      ->check(CLI::IsMember({"json", "markdown"}))
      ->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "cross-run analysis operations");
  std::string an_op, an_in, an_out;
  analyze->add_option("op", an_op, "bottlenecks|signature|stratify|heatmap|sensitivity")
      ->required()
      ->check(CLI::IsMember({"bottlenecks", "signature", "stratify", "heatmap", "sensitivity"}));
  analyze->add_option("--in", an_in, "reports directory or result CSV")->required();
  analyze->add_option("--out", an_out, "output file (stdout when omitted)");

  auto* exp = app.add_subcommand("export", "flatten reports into a result CSV");
  std::string exp_in, exp_out;
  exp->add_option("--in", exp_in, "reports directory or result CSV")->required();
  exp->add_option("--out", exp_out, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(validate_dir);
    if (gen->parsed())
      return cmd_gen_prompt(corpus_dir, gen_meta, gen_profile,
                            gen_backend == "llm" ? "remote" : gen_backend, gen_seed,
                            config_path);
    if (eval->parsed())
      return cmd_evaluate(corpus_dir, eval_video, eval_meta, eval_profile, eval_judge,
                          eval_seed, eval_out, config_path);
    if (rep->parsed()) return cmd_report(rep_run, rep_format);
    if (analyze->parsed()) return cmd_analyze(an_op, an_in, an_out);
    if (exp->parsed()) return cmd_export(exp_in, exp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchemaExit;
  }
  return 0;
}
