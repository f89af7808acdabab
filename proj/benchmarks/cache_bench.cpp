#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "vthink/common/hash.hpp"
#include "vthink/pipeline/cache.hpp"

namespace {

namespace fs = std::filesystem;

void BM_CacheKey(benchmark::State& state) {
  vthink::gateway::GenParams p{30, 4.0, 1.0, 42};
  for (auto _ : state) {
    benchmark::DoNotOptimize(vthink::pipeline::thought_cache_key(
        "9f86d081884c7d659a2feaa0c55ad015a3bf4f1b2b0b822cd15d6c15b0f00a08", "Zoom into the central region", p));
  }
}
BENCHMARK(BM_CacheKey);

void BM_CacheStoreLookup(benchmark::State& state) {
  auto root = fs::temp_directory_path() / ("vthink-bench-" + std::to_string(std::random_device{}()));
  vthink::pipeline::ThoughtCache cache(root);
  vthink::Bytes image(static_cast<std::size_t>(state.range(0)), 0x7f);
  vthink::pipeline::CachedThought thought{"source", image, "Deblur the image", {}};
  int i = 0;
  for (auto _ : state) {
    thought.instruction = "Deblur the image " + std::to_string(i++ % 64);
    auto key = vthink::pipeline::thought_cache_key(thought.source_image_hash, thought.instruction, thought.params);
    cache.store(key, thought);
    benchmark::DoNotOptimize(cache.lookup(key));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
  fs::remove_all(root);
}
BENCHMARK(BM_CacheStoreLookup)->Arg(4096)->Arg(1 << 20);

}  // namespace
