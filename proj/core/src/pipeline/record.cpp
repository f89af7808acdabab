#include "vthink/pipeline/record.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace vthink::pipeline {

using nlohmann::json;

std::string_view to_string(ContextStrategy s) {
  switch (s) {
    case ContextStrategy::Baseline: return "baseline";
    case ContextStrategy::Replace: return "replace";
    case ContextStrategy::Concat: return "concat";
    case ContextStrategy::TextualCoT: return "textual-cot";
  }
  return "baseline";
}

std::optional<ContextStrategy> parse_strategy(std::string_view s) {
  for (auto v : {ContextStrategy::Baseline, ContextStrategy::Replace, ContextStrategy::Concat,
                 ContextStrategy::TextualCoT}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string_view to_string(PromptSource s) {
  switch (s) {
    case PromptSource::Library: return "library";
    case PromptSource::Writer: return "writer";
    case PromptSource::Fallback: return "fallback";
  }
  return "library";
}

std::optional<PromptSource> parse_prompt_source(std::string_view s) {
  for (auto v : {PromptSource::Library, PromptSource::Writer, PromptSource::Fallback}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

json record_to_json(const RunRecord& r) {
  json j;
  j["sample_id"] = r.sample_id;
  j["strategy"] = to_string(r.strategy);
  if (r.prompt) {
    j["prompt"] = {{"key", r.prompt->key}, {"text", r.prompt->text}, {"source", to_string(r.prompt->source)}};
  } else {
    j["prompt"] = nullptr;
  }
  if (r.thought) {
    j["thought"] = {{"image_sha256", r.thought->image_sha256},
                    {"instruction", r.thought->instruction},
                    {"params", gateway::to_json(r.thought->params)},
                    {"source", to_string(r.thought->source)},
                    {"cache_key", r.thought->cache_key},
                    {"latency_ms", r.thought->latency_ms}};
  } else {
    j["thought"] = nullptr;
  }
  j["raw_answer"] = r.raw_answer;
  j["answer"] = r.extraction.answer ? json(*r.extraction.answer) : json(nullptr);
  j["extraction_rule"] = scoring::to_string(r.extraction.rule);
  j["correct"] = r.correct;
  j["latency_ms"] = {{"write", r.latency.write_ms},
                     {"edit", r.latency.edit_ms},
                     {"understand", r.latency.understand_ms}};
  j["cache_hit"] = r.cache_hit;
  j["flags"] = {{"writer_fallback", r.flags.writer_fallback},
                {"edit_fallback", r.flags.edit_fallback},
                {"leakage_rejections", r.flags.leakage_rejections},
                {"diversity_rejections", r.flags.diversity_rejections},
                {"semantic_rejections", r.flags.semantic_rejections}};
  j["attempts"] = {{"edit", r.edit_attempts}, {"understand", r.understand_attempts}};
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  try {
    r.sample_id = j.at("sample_id").get<std::string>();
    auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (!strategy) throw std::invalid_argument("unknown strategy");
    r.strategy = *strategy;
    if (const auto& p = j.at("prompt"); !p.is_null()) {
      auto src = parse_prompt_source(p.at("source").get<std::string>());
      if (!src) throw std::invalid_argument("unknown prompt source");
      r.prompt = PromptProvenance{p.at("key").get<std::string>(), p.at("text").get<std::string>(), *src};
    }
    if (const auto& t = j.at("thought"); !t.is_null()) {
      VisualThought vt;
      vt.image_sha256 = t.at("image_sha256").get<std::string>();
      vt.instruction = t.at("instruction").get<std::string>();
      vt.params = gateway::gen_params_from_json(t.at("params"));
      auto src = parse_prompt_source(t.at("source").get<std::string>());
      if (!src) throw std::invalid_argument("unknown thought source");
      vt.source = *src;
      vt.cache_key = t.at("cache_key").get<std::string>();
      vt.latency_ms = t.at("latency_ms").get<double>();
      r.thought = std::move(vt);
    }
    r.raw_answer = j.at("raw_answer").get<std::string>();
    if (const auto& a = j.at("answer"); !a.is_null()) r.extraction.answer = a.get<std::string>();
    auto rule = scoring::parse_extraction_rule(j.at("extraction_rule").get<std::string>());
    if (!rule) throw std::invalid_argument("unknown extraction rule");
    r.extraction.rule = *rule;
    r.correct = j.at("correct").get<bool>();
    const auto& lat = j.at("latency_ms");
    r.latency = {lat.at("write").get<double>(), lat.at("edit").get<double>(),
                 lat.at("understand").get<double>()};
    r.cache_hit = j.at("cache_hit").get<bool>();
    const auto& f = j.at("flags");
    r.flags.writer_fallback = f.at("writer_fallback").get<bool>();
    r.flags.edit_fallback = f.at("edit_fallback").get<bool>();
    r.flags.leakage_rejections = f.at("leakage_rejections").get<int>();
    r.flags.diversity_rejections = f.at("diversity_rejections").get<int>();
    r.flags.semantic_rejections = f.at("semantic_rejections").get<int>();
    r.edit_attempts = j.at("attempts").at("edit").get<int>();
    r.understand_attempts = j.at("attempts").at("understand").get<int>();
    if (const auto& e = j.at("error"); !e.is_null()) r.error = e.get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("run record: {}", e.what()));
  }
  return r;
}

}  // namespace vthink::pipeline
