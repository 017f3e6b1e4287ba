#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "vidiag/analysis/ops.h"
#include "vidiag/analysis/table.h"
#include "vidiag/corpus/profiles.h"
#include "vidiag/jsonio.h"
#include "vidiag/media/frame.h"
#include "vidiag/media/io.h"
#include "vidiag/pipeline/pipeline.h"

using namespace vidiag;
using namespace vidiag::analysis;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = VIDIAG_FIXTURE_DIR;

struct SmallRng {
  uint64_t state;
  explicit SmallRng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  double uniform() { return static_cast<double>(next() % 1000000) / 999999.0; }
};

ResultRow row(const std::string& system, const std::string& meta, const std::string& cp,
              const std::string& sub, const std::string& dim, double s, double c = 1.0) {
  ResultRow r;
  r.system_id = system;
  r.meta_id = meta;
  r.video_type = video_type_of_meta(meta);
  r.profile_id = "neutral";
  r.checkpoint_id = cp;
  r.sub_metric = sub;
  r.dimension = dim;
  r.s = s;
  r.confidence = c;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("vidiag_analysis_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("CSV interchange is RFC-4180 and lossless") {
  SUBCASE("quoting round trip") {
    ResultTable t;
    ResultRow r = row("sys,with comma", "meta\"quoted\"", "cp_1", "line\nbreak", "script", 0.25);
    t.append(r);
    const std::string csv = to_csv(t);
    const ResultTable back = from_csv(csv);
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0].system_id == "sys,with comma");
    CHECK(back.rows[0].meta_id == "meta\"quoted\"");
    CHECK(back.rows[0].sub_metric == "line\nbreak");
    CHECK(back.rows[0].s == 0.25);
    CHECK(to_csv(back) == csv);
  }
  SUBCASE("record splitting") {
    const auto fields = split_csv_record("a,\"b,c\",\"d\"\"e\",f");
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == "a");
    CHECK(fields[1] == "b,c");
    CHECK(fields[2] == "d\"e");
    CHECK(fields[3] == "f");
  }
  SUBCASE("CRLF and blank lines are tolerated") {
    const std::string csv =
        "system_id,meta_id,video_type,profile_id,checkpoint_id,sub_metric,dimension,s,confidence\r\n"
        "a,m,unknown,p,c,sm,script,0.5,1\r\n"
        "\r\n";
    const ResultTable t = from_csv(csv);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].s == 0.5);
  }
  SUBCASE("schema violations throw") {
    CHECK_THROWS_AS(from_csv(""), AnalysisError);
    CHECK_THROWS_AS(from_csv("wrong,header\n"), AnalysisError);
    const std::string header =
        "system_id,meta_id,video_type,profile_id,checkpoint_id,sub_metric,dimension,s,confidence\n";
    CHECK_THROWS_AS(from_csv(header + "a,m,t,p,c,sm,script,notanumber,1\n"), AnalysisError);
    CHECK_THROWS_AS(from_csv(header + "a,m,t,p,c,sm,script,1.5,1\n"), AnalysisError);
    CHECK_THROWS_AS(from_csv(header + "a,m,t,p,c,sm,script,0.5\n"), AnalysisError);
    CHECK_THROWS_AS(from_csv(header + "a,m,t,p,c,sm,script,0.5,1\na,m,t2,p,c,sm2,visual,0.5,1\n"),
                    AnalysisError);  // duplicate (system, meta, profile, checkpoint)
    CHECK_THROWS_AS(from_csv(header + "a,m,t,p,c,sm,script,\"0.5,1\n"), AnalysisError);
  }
}

TEST_CASE("meta ids map to video types by longest prefix") {
  CHECK(video_type_of_meta("action_001") == "action");
  CHECK(video_type_of_meta("daily_life_002") == "daily_life");
  CHECK(video_type_of_meta("narrative_777") == "narrative");
  CHECK(video_type_of_meta("scifi_001") == "scifi");
  CHECK(video_type_of_meta("mystery_001") == "unknown");
  CHECK(video_type_of_meta("") == "unknown");
}

TEST_CASE("global bottleneck ranking reproduces the pooled statistics") {
  const ResultTable table = load_csv(kFixtures / "paper_rq1.csv");
  const auto ranked = global_bottleneck_ranking(table);
  REQUIRE(ranked.size() == 7);

  CHECK(ranked[0].sub_metric == "transition_quality");
  CHECK(std::abs(ranked[0].mean - 0.256) < 1e-9);
  CHECK(ranked[1].sub_metric == "temporal_coherence");
  CHECK(std::abs(ranked[1].mean - 0.405) < 1e-9);
  CHECK(ranked[2].sub_metric == "video_audio_consistency");
  CHECK(std::abs(ranked[2].mean - 0.416) < 1e-9);
  CHECK(ranked.back().sub_metric == "user_demand_fulfillment");
  CHECK(std::abs(ranked.back().mean - 0.71) < 1e-9);
  for (const auto& stat : ranked) {
    CHECK(stat.n == 4);
    CHECK(stat.std_dev >= 0.0);
  }
  for (size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].mean <= ranked[i].mean);

  SUBCASE("singleton and empty tables") {
    ResultTable one;
    one.append(row("a", "m", "c", "sm", "visual", 0.7));
    const auto r = global_bottleneck_ranking(one);
    REQUIRE(r.size() == 1);
    CHECK(r[0].mean == 0.7);
    CHECK(r[0].std_dev == 0.0);
    CHECK(global_bottleneck_ranking(ResultTable{}).empty());
  }
  SUBCASE("matches a brute-force recomputation") {
    SmallRng rng(2026);
    ResultTable random;
    const char* metrics[3] = {"alpha", "beta", "gamma"};
    for (int i = 0; i < 60; ++i)
      random.append(row("sys" + std::to_string(i % 4), "m" + std::to_string(i / 4),
                        "cp" + std::to_string(i), metrics[i % 3], "visual", rng.uniform()));
    const auto got = global_bottleneck_ranking(random);
    for (const auto& stat : got) {
      double sum = 0.0;
      size_t n = 0;
      for (const auto& r : random.rows)
        if (r.sub_metric == stat.sub_metric) {
          sum += r.s;
          ++n;
        }
      const double mean = sum / static_cast<double>(n);
      double sq = 0.0;
      for (const auto& r : random.rows)
        if (r.sub_metric == stat.sub_metric) sq += (r.s - mean) * (r.s - mean);
      CHECK(stat.mean == doctest::Approx(mean).epsilon(1e-12));
      CHECK(stat.std_dev == doctest::Approx(std::sqrt(sq / static_cast<double>(n))).epsilon(1e-12));
      CHECK(stat.n == n);
    }
  }
}

TEST_CASE("cohort signature") {
  const ResultTable table = load_csv(kFixtures / "paper_rq1.csv");
  const auto sig = cohort_signature(table);
  REQUIRE(sig.systems == std::vector<std::string>{"dreamina", "kling", "movieagent", "vimax"});

  SUBCASE("the text-video row matches the published deltas") {
    const auto mi = static_cast<size_t>(
        std::find(sig.sub_metrics.begin(), sig.sub_metrics.end(), "text_video_consistency") -
        sig.sub_metrics.begin());
    REQUIRE(mi < sig.sub_metrics.size());
    const auto wi = static_cast<size_t>(
        std::find(sig.systems.begin(), sig.systems.end(), "kling") - sig.systems.begin());
    REQUIRE(sig.cells[mi][wi].delta.has_value());
    CHECK(std::abs(*sig.cells[mi][wi].delta - 0.08) < 1e-9);
    CHECK(sig.cells[mi][wi].best);
  }
  SUBCASE("every full row centers to zero") {
    for (size_t mi = 0; mi < sig.sub_metrics.size(); ++mi) {
      double sum = 0.0;
      int best_marks = 0;
      for (const auto& cell : sig.cells[mi]) {
        REQUIRE(cell.delta.has_value());
        sum += *cell.delta;
        best_marks += cell.best ? 1 : 0;
      }
      CHECK(std::abs(sum) < 1e-9);
      CHECK(best_marks == 1);
    }
  }
  SUBCASE("identical systems give an all-zero signature") {
    ResultTable twin;
    twin.append(row("a", "m", "c1", "sm", "visual", 0.4));
    twin.append(row("b", "m", "c1", "sm", "visual", 0.4));
    const auto z = cohort_signature(twin);
    for (const auto& r : z.cells)
      for (const auto& cell : r) CHECK(std::abs(*cell.delta) < 1e-12);
  }
  SUBCASE("missing cells are excluded from the cohort mean") {
    ResultTable sparse;
    sparse.append(row("a", "m", "c1", "sm", "visual", 0.2));
    sparse.append(row("b", "m", "c1", "sm", "visual", 0.6));
    sparse.append(row("a", "m", "c2", "other", "visual", 0.5));
    sparse.append(row("b", "m", "c2", "other", "visual", 0.5));
    sparse.append(row("c", "m", "c2", "other", "visual", 0.5));
    const auto z = cohort_signature(sparse);
    const auto mi = static_cast<size_t>(
        std::find(z.sub_metrics.begin(), z.sub_metrics.end(), "sm") - z.sub_metrics.begin());
    REQUIRE(z.systems == std::vector<std::string>{"a", "b", "c"});
    CHECK(*z.cells[mi][0].delta == doctest::Approx(-0.2));
    CHECK(*z.cells[mi][1].delta == doctest::Approx(0.2));
    CHECK_FALSE(z.cells[mi][2].delta.has_value());
  }
  SUBCASE("a single system is rejected") {
    ResultTable solo;
    solo.append(row("only", "m", "c", "sm", "visual", 0.4));
    CHECK_THROWS_AS(cohort_signature(solo), AnalysisError);
  }
}

TEST_CASE("type stratification reproduces the published spread") {
  const ResultTable table = load_csv(kFixtures / "paper_types.csv");
  const auto means = stratify_by_type(table);
  REQUIRE(means.size() == 4);
  CHECK(std::abs(means.at("action") - 0.455) < 1e-9);
  CHECK(std::abs(means.at("cinematic") - 0.509) < 1e-9);
  CHECK(std::abs(means.at("commercial") - 0.484) < 1e-9);
  CHECK(std::abs(means.at("educational") - 0.489) < 1e-9);
  double lo = 2.0, hi = -1.0;
  std::string lo_t, hi_t;
  for (const auto& [t, v] : means) {
    if (v < lo) lo = v, lo_t = t;
    if (v > hi) hi = v, hi_t = t;
  }
  CHECK(lo_t == "action");
  CHECK(hi_t == "cinematic");

  SUBCASE("matches a brute-force recomputation") {
    std::map<std::string, std::vector<ResultRow>> runs;
    for (const auto& r : table.rows)
      runs[r.system_id + "|" + r.meta_id + "|" + r.profile_id].push_back(r);
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& [k, rows] : runs) {
      acc[rows.front().video_type].first += run_overall(rows);
      acc[rows.front().video_type].second += 1;
    }
    for (const auto& [t, slot] : acc)
      CHECK(means.at(t) == doctest::Approx(slot.first / slot.second).epsilon(1e-12));
  }
  SUBCASE("confidence weighting flows through the per-run overall") {
    std::vector<ResultRow> mixed = {row("a", "m", "c1", "sm", "script", 0.8, 1.0),
                                    row("a", "m", "c2", "sm", "script", 0.4, 0.5)};
    CHECK(run_overall(mixed) == doctest::Approx((0.8 + 0.2) / 1.5));
  }
  SUBCASE("single type") {
    ResultTable one;
    one.append(row("a", "action_009", "c", "sm", "script", 0.5));
    const auto m = stratify_by_type(one);
    REQUIRE(m.size() == 1);
    CHECK(m.at("action") == doctest::Approx(0.5));
  }
}

TEST_CASE("column normalization") {
  SUBCASE("endpoints and constants") {
    DimensionMatrix m;
    m.systems = {"a", "b", "c"};
    m.dimensions = {"script", "visual"};
    m.values = {{0.2, 0.5}, {0.8, 0.5}, {0.5, 0.5}};
    const auto n = column_normalize(m);
    CHECK(*n.normalized[0][0] == doctest::Approx(0.0));
    CHECK(*n.normalized[1][0] == doctest::Approx(1.0));
    CHECK(*n.normalized[2][0] == doctest::Approx(0.5));
    CHECK(n.best_system[0] == "b");
    for (int i = 0; i < 3; ++i) CHECK(*n.normalized[i][1] == doctest::Approx(0.5));
    CHECK(n.best_system[1].empty());  // constant column has no winner
  }
  SUBCASE("random matrices hit 0 and 1 per column") {
    SmallRng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
      DimensionMatrix m;
      m.systems = {"a", "b", "c"};
      m.dimensions = {"script", "visual"};
      m.values.assign(3, std::vector<std::optional<double>>(2));
      for (auto& r : m.values)
        for (auto& v : r) v = rng.uniform();
      const auto n = column_normalize(m);
      for (size_t di = 0; di < 2; ++di) {
        double lo = 2.0, hi = -1.0;
        for (size_t si = 0; si < 3; ++si) {
          lo = std::min(lo, *n.normalized[si][di]);
          hi = std::max(hi, *n.normalized[si][di]);
        }
        CHECK(lo == doctest::Approx(0.0));
        CHECK(hi == doctest::Approx(1.0));
      }
    }
  }
  SUBCASE("matrix construction pools confidence-weighted rows") {
    ResultTable t;
    t.append(row("a", "m1", "c1", "sm", "script", 0.8, 1.0));
    t.append(row("a", "m1", "c2", "sm", "script", 0.4, 0.5));
    t.append(row("b", "m1", "c1", "sm", "script", 0.6, 1.0));
    t.append(row("b", "m1", "c3", "sm", "visual", 0.2, 0.0));  // zero confidence: not evaluated
    const auto m = dimension_matrix(t);
    CHECK(m.systems == std::vector<std::string>{"a", "b"});
    CHECK(m.dimensions == std::vector<std::string>{"script"});
    CHECK(*m.values[0][0] == doctest::Approx(1.0 / 1.5));
    CHECK(*m.values[1][0] == doctest::Approx(0.6));
  }
  SUBCASE("a single system is rejected") {
    DimensionMatrix m;
    m.systems = {"a"};
    m.dimensions = {"script"};
    m.values = {{0.5}};
    CHECK_THROWS_AS(column_normalize(m), AnalysisError);
  }
}

TEST_CASE("profile sensitivity over the shipped profiles") {
  const ResultTable table = load_csv(kFixtures / "sensitivity_cases.csv");
  const auto rows = profile_sensitivity(table, sensitivity_profiles());
  REQUIRE(rows.size() == 2);
  CHECK(sensitivity_profiles().size() == 7);

  const auto& flat = rows[0];
  CHECK(flat.meta_id == "case_flat_001");
  CHECK(flat.min == doctest::Approx(0.6));
  CHECK(flat.max == doctest::Approx(0.6));
  CHECK(flat.neutral == doctest::Approx(0.6));
  CHECK(flat.width == doctest::Approx(0.0));

  const auto& skew = rows[1];
  CHECK(skew.meta_id == "case_skew_001");
  CHECK(std::abs(skew.max - 0.63) < 1e-9);
  CHECK(skew.argmax_profile == "story_first");
  CHECK(std::abs(skew.min - 0.39) < 1e-9);
  CHECK(skew.argmin_profile == "visual_heavy");
  CHECK(std::abs(skew.neutral - 0.45) < 1e-9);
  CHECK(skew.width == doctest::Approx(0.24));

  for (const auto& r : rows) {
    CHECK(r.neutral >= r.min - 1e-12);
    CHECK(r.neutral <= r.max + 1e-12);
  }
  ResultTable copy = table;
  CHECK_THROWS_AS(profile_sensitivity(copy, {corpus::neutral_profile()}), AnalysisError);
}

TEST_CASE("report ingestion and round trip") {
  const fs::path dir = fresh_dir("ingest");

  std::vector<media::Frame> frames;
  for (int seg = 0; seg < 2; ++seg)
    for (int i = 0; i < 20; ++i)
      frames.push_back(media::solid_frame(48, 32, seg ? 40 : 220, 90, seg ? 210 : 60));
  const fs::path video = dir / "clip.y4m";
  media::write_y4m(video, frames, 20);
  std::vector<double> samples(2 * 8000);
  for (size_t i = 0; i < samples.size(); ++i)
    samples[i] = 0.3 * std::sin(2.0 * 3.14159265358979 * 330.0 * i / 8000.0);
  media::write_wav(media::audio_sidecar_for(video), samples, 8000);

  corpus::MetadataEntry m;
  m.meta_id = "narrative_777";
  m.duration_sec = 2.0;
  m.video_type = corpus::VideoType::narrative;
  m.main_instruction = "Two colour fields trade places.";

  const fs::path reports = dir / "reports";
  EngineConfig config;
  run_pipeline(video.string(), m, corpus::neutral_profile(), config,
               pipeline::mock_adapters(3), 3, (reports / "alpha" / "run_n").string());
  const auto story = corpus::builtin_profiles().front();
  run_pipeline(video.string(), m, story, config, pipeline::mock_adapters(3), 3,
               (reports / "alpha" / "run_s").string());
  run_pipeline(video.string(), m, corpus::neutral_profile(), config,
               pipeline::mock_adapters(9), 9, (reports / "beta" / "run_n").string());

  const ResultTable table = ingest_reports(reports);
  REQUIRE_FALSE(table.empty());

  std::set<std::string> systems;
  const auto& registry = rubric::builtin_registry();
  for (const auto& r : table.rows) {
    systems.insert(r.system_id);
    CHECK(r.meta_id == "narrative_777");
    CHECK(r.video_type == "narrative");
    const auto* cp = registry.find(r.checkpoint_id);
    REQUIRE(cp != nullptr);
    CHECK(r.sub_metric == cp->sub_metric);
    CHECK(r.dimension == cp->dimension);
  }
  CHECK(systems == std::set<std::string>{"alpha", "beta"});

  SUBCASE("CSV round trip is lossless") {
    const std::string csv = to_csv(table);
    const ResultTable back = from_csv(csv);
    REQUIRE(back.rows.size() == table.rows.size());
    CHECK(to_csv(back) == csv);
    for (size_t i = 0; i < table.rows.size(); ++i) {
      CHECK(back.rows[i].s == table.rows[i].s);
      CHECK(back.rows[i].confidence == table.rows[i].confidence);
      CHECK(back.rows[i].checkpoint_id == table.rows[i].checkpoint_id);
    }
    const fs::path csv_path = dir / "table.csv";
    save_csv(table, csv_path);
    CHECK(to_csv(load_csv(csv_path)) == csv);
  }
  SUBCASE("duplicate runs for one key are rejected") {
    fs::create_directories(reports / "alpha" / "run_dup");
    fs::copy_file(reports / "alpha" / "run_n" / "report.json",
                  reports / "alpha" / "run_dup" / "report.json");
    CHECK_THROWS_AS(ingest_reports(reports), AnalysisError);
  }
  SUBCASE("missing directory is a schema error") {
    CHECK_THROWS_AS(ingest_reports(dir / "nowhere"), AnalysisError);
  }
}

TEST_CASE("plot series are deterministic JSON") {
  const ResultTable table = load_csv(kFixtures / "paper_rq1.csv");

  const auto bottlenecks = bottlenecks_to_json(global_bottleneck_ranking(table));
  CHECK(bottlenecks.at("op") == "global_bottleneck_ranking");
  CHECK(bottlenecks.at("series").size() == 7);
  CHECK(bottlenecks.at("series")[0].at("sub_metric") == "transition_quality");

  const auto sig = signature_to_json(cohort_signature(table));
  CHECK(sig.at("systems").size() == 4);
  CHECK(sig.at("delta").size() == sig.at("sub_metrics").size());

  const auto strat =
      stratification_to_json(stratify_by_type(load_csv(kFixtures / "paper_types.csv")));
  CHECK(strat.at("means").size() == 4);

  const auto heat = heatmap_to_json(column_normalize(dimension_matrix(table)));
  CHECK(heat.at("dimensions").size() == 4);  // script, visual, crossmodal, stability
  CHECK(heat.at("normalized").size() == 4);

  const auto sens = sensitivity_to_json(
      profile_sensitivity(load_csv(kFixtures / "sensitivity_cases.csv"), sensitivity_profiles()));
  CHECK(sens.at("series").size() == 2);

  for (const auto& j : {bottlenecks, sig, strat, heat, sens}) {
    const std::string once = canonical_dump(j);
    CHECK(canonical_dump(nlohmann::ordered_json::parse(once)) == once);
  }
}
