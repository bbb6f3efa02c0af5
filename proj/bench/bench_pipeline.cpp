// Serial vs OpenMP-parallel document-level prediction on a replicated copy
// of the synthetic corpus, using stages trained on the original documents.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>
#include <vector>

#include "promptee/harness.hpp"

using namespace promptee;

namespace {

struct Fixture {
  Schema schema;
  Corpus corpus;
  PipelineConfig config;
  TrainedStages trained;
  std::vector<std::string> doc_ids;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    const std::filesystem::path dir = PROMPTEE_DATA_DIR "/synthetic";
    Fixture out;
    out.config = PipelineConfig::from_json(read_json_file(dir / "config.json"), dir);
    out.schema = load_schema(out.config.schema_path);
    const auto base = ingest(out.config.corpus_path, out.schema);
    run_pipeline(base, out.schema, out.config, mock_backend_factory(), &out.trained);
    // 16 copies of every document under fresh ids.
    for (int copy = 0; copy < 16; ++copy) {
      for (const auto& d : base.documents) {
        auto doc = d;
        doc.doc_id = d.doc_id + "-" + std::to_string(copy);
        for (auto m : base.mentions_of(d.doc_id)) {
          m.doc_id = doc.doc_id;
          out.corpus.mentions.push_back(std::move(m));
        }
        out.doc_ids.push_back(doc.doc_id);
        out.corpus.documents.push_back(std::move(doc));
      }
    }
    return out;
  }();
  return f;
}

void BM_Predict(benchmark::State& state, Execution execution) {
  const auto& f = fixture();
  const std::vector<std::string> ids(f.doc_ids.begin(), f.doc_ids.begin() + state.range(0));
  for (auto _ : state) {
    auto result = predict_documents(f.trained.view(), f.corpus, ids, f.schema, f.config, Regime::kEndToEnd, execution);
    benchmark::DoNotOptimize(result.predictions.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BuildPrompts(benchmark::State& state, Execution execution) {
  const auto& f = fixture();
  for (auto _ : state) {
    Diagnostics diag;
    auto sets = build_training_sets(f.corpus, f.doc_ids, f.schema, f.config, diag, false, execution);
    benchmark::DoNotOptimize(sets.argument.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.doc_ids.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Predict, serial, Execution::kSerial)->Arg(40)->Arg(320)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, parallel, Execution::kParallel)->Arg(40)->Arg(320)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildPrompts, serial, Execution::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildPrompts, parallel, Execution::kParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
