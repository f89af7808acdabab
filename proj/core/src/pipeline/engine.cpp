#include "vthink/pipeline/engine.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vthink/common/hash.hpp"

namespace vthink::pipeline {

std::string_view to_string(WriterMode m) {
  switch (m) {
    case WriterMode::Off: return "off";
    case WriterMode::Library: return "library";
    case WriterMode::Auto: return "auto";
  }
  return "library";
}

std::optional<WriterMode> parse_writer_mode(std::string_view s) {
  for (auto m : {WriterMode::Off, WriterMode::Library, WriterMode::Auto}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string_view to_string(EditFailurePolicy p) {
  return p == EditFailurePolicy::Fail ? "fail" : "fallback";
}

std::optional<EditFailurePolicy> parse_edit_failure_policy(std::string_view s) {
  if (s == "fail") return EditFailurePolicy::Fail;
  if (s == "fallback") return EditFailurePolicy::Fallback;
  return std::nullopt;
}

std::string_view to_string(PipelineErrc e) {
  return e == PipelineErrc::InvalidConfig ? "InvalidConfig" : "FailFastAbort";
}

std::int64_t default_seed(std::string_view sample_id) {
  return static_cast<std::int64_t>(stable_hash64(sample_id) & 0x7fffffffULL);
}

namespace {

[[noreturn]] void invalid_config(const std::string& msg) {
  throw PipelineError(PipelineErrc::InvalidConfig, "InvalidConfig: " + msg);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config, Backends backends, PipelineResources resources)
    : config_(std::move(config)), backends_(backends), resources_(resources) {
  if (config_.parallelism < 1) invalid_config("parallelism must be >= 1");
  try {
    config_.gen.validate();
  } catch (const std::invalid_argument& e) {
    invalid_config(e.what());
  }
  if (backends_.understand == nullptr) invalid_config("an understand backend is required");
  if (resources_.images == nullptr) invalid_config("an image source is required");
  if (needs_thought(config_.strategy)) {
    if (backends_.edit == nullptr) invalid_config("replace/concat need an edit backend");
    if (resources_.library == nullptr) invalid_config("replace/concat need a prompt library");
    if (config_.writer_mode == WriterMode::Auto) {
      if (backends_.writer == nullptr) invalid_config("writer mode 'auto' needs a writer backend");
      if (resources_.demonstrations == nullptr) invalid_config("writer mode 'auto' needs demonstrations");
      try {
        writer::validate(config_.writer, resources_.demonstrations->size());
      } catch (const writer::WriterError& e) {
        invalid_config(e.what());
      }
    }
  }
}

PromptProvenance Pipeline::choose_prompt(const bench::Sample& sample, const bench::ImageBlob& image,
                                         RunRecord& record) const {
  const auto& library = *resources_.library;

  if (config_.writer_mode == WriterMode::Auto) {
    auto t0 = std::chrono::steady_clock::now();
    auto written = writer::write_edit_prompt(sample, image, *resources_.demonstrations, config_.writer,
                                             *backends_.writer, library);
    record.latency.write_ms = ms_since(t0);
    record.flags.leakage_rejections += written.leakage_rejections;
    record.flags.diversity_rejections += written.diversity_rejections;
    record.flags.semantic_rejections += written.semantic_rejections;
    if (written.source == writer::CandidateSource::Writer) {
      return {"", written.text, PromptSource::Writer};
    }
    record.flags.writer_fallback = true;
    return {written.fallback_key, written.text, PromptSource::Fallback};
  }

  const auto& chosen =
      config_.writer_mode == WriterMode::Off ? library.fallback() : library.route(sample);
  try {
    return {chosen.key, prompts::render_prompt(chosen, sample), PromptSource::Library};
  } catch (const prompts::PromptError& e) {
    if (e.code() != prompts::PromptErrc::LeakageDetected) throw;
    ++record.flags.leakage_rejections;
    const auto& fb = library.fallback();
    return {fb.key, prompts::render_prompt(fb, sample), PromptSource::Fallback};
  }
}

RunRecord Pipeline::run_sample(const bench::Sample& sample) const {
  RunRecord record;
  record.sample_id = sample.sample_id;
  record.strategy = config_.strategy;

  auto original = resources_.images->load(sample.image_ref);

  gateway::UnderstandRequest understand;
  understand.question = sample.question;
  understand.options = sample.options;
  understand.mode = config_.strategy == ContextStrategy::TextualCoT ? gateway::AnswerMode::TextualCot
                                                                     : gateway::AnswerMode::Plain;

  bool degraded = false;
  if (needs_thought(config_.strategy)) {
    record.prompt = choose_prompt(sample, original, record);

    gateway::GenParams params = config_.gen;
    if (!params.seed) params.seed = default_seed(sample.sample_id);

    VisualThought thought;
    thought.instruction = record.prompt->text;
    thought.params = params;
    thought.source = record.prompt->source;
    thought.cache_key = thought_cache_key(original.content_hash, thought.instruction, params);

    bool have_image = false;
    if (resources_.cache != nullptr) {
      auto hit = resources_.cache->lookup(thought.cache_key);
      if (hit.status == LookupStatus::Hit) {
        thought.image = std::move(hit.thought->image);
        record.cache_hit = true;
        have_image = true;
        if (resources_.observer != nullptr) {
          resources_.observer->on_cache_hit(sample, gateway::EditResponse{thought.image, params, 0.0});
        }
      } else if (hit.status == LookupStatus::Corrupt) {
        spdlog::warn("CacheCorrupt: entry {} for sample '{}' failed verification; regenerating",
                     thought.cache_key, sample.sample_id);
      }
    }

    if (!have_image) {
      gateway::CallTrace trace;
      try {
        auto response = backends_.edit->edit({original.bytes, thought.instruction, params},
                                             sample.sample_id, &trace);
        record.edit_attempts = trace.attempts;
        thought.image = std::move(response.image);
        thought.latency_ms = trace.latency_ms;
        record.latency.edit_ms = trace.latency_ms;
        have_image = true;
        if (resources_.cache != nullptr) {
          resources_.cache->store(thought.cache_key,
                                  {original.content_hash, thought.image, thought.instruction, params});
        }
      } catch (const gateway::GatewayError& e) {
        record.edit_attempts = e.attempts();
        if (config_.on_edit_failure != EditFailurePolicy::Fallback) throw;
        spdlog::warn("edit failed for sample '{}', degrading to baseline: {}", sample.sample_id, e.what());
        record.flags.edit_fallback = true;
        degraded = true;
      }
    }

    if (have_image) {
      thought.image_sha256 = sha256_hex(ByteView(thought.image));
      if (config_.strategy == ContextStrategy::Concat) understand.images.push_back(original.bytes);
      understand.images.push_back(thought.image);
      record.thought = std::move(thought);
    }
  }

  if (!needs_thought(config_.strategy) || degraded) understand.images = {original.bytes};

  gateway::CallTrace trace;
  try {
    auto response = backends_.understand->understand(understand, sample.sample_id, &trace);
    record.understand_attempts = trace.attempts;
    record.latency.understand_ms = trace.latency_ms;
    record.raw_answer = std::move(response.answer_text);
  } catch (const gateway::GatewayError& e) {
    record.understand_attempts = e.attempts();
    throw;
  }

  record.extraction = scoring::extract_answer(record.raw_answer, sample.options);
  record.correct = scoring::is_correct(record.extraction, sample);
  return record;
}

BatchResult Pipeline::run_batch(const bench::Manifest& manifest) const {
  const auto& samples = manifest.samples();
  BatchResult result;
  result.records.resize(samples.size());

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<bool> stop{false};
  std::mutex error_mu;
  std::exception_ptr fatal;

  auto errored = [&](const bench::Sample& s, std::string message) {
    RunRecord r;
    r.sample_id = s.sample_id;
    r.strategy = config_.strategy;
    r.error = std::move(message);
    return r;
  };

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) return;
      const auto& sample = samples[i];
      if (stop.load()) {
        result.records[i] = errored(sample, "skipped: batch aborted");
        continue;
      }
      try {
        result.records[i] = run_sample(sample);
      } catch (const gateway::GatewayError& e) {
        result.records[i] = errored(sample, e.what());
      } catch (const writer::WriterError& e) {
        result.records[i] = errored(sample, e.what());
      } catch (const prompts::PromptError& e) {
        result.records[i] = errored(sample, e.what());
      } catch (const bench::ImageError& e) {
        result.records[i] = errored(sample, e.what());
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!fatal) fatal = std::current_exception();
        stop = true;
        return;
      }
      if (result.records[i].errored()) {
        ++failed;
        if (config_.fail_fast) stop = true;
      }
      if (resources_.observer != nullptr) resources_.observer->on_sample_done(result.records[i]);
    }
  };

  std::size_t workers = std::min(config_.parallelism, std::max<std::size_t>(samples.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (fatal) std::rethrow_exception(fatal);
  result.failed = failed.load();
  result.aborted = config_.fail_fast && stop.load();
  if (result.aborted) {
    for (const auto& r : result.records) {
      if (r.error && r.error->starts_with("skipped")) ++result.failed;
    }
  }
  return result;
}

}  // namespace vthink::pipeline
