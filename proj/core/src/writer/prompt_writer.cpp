#include "vthink/writer/prompt_writer.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vthink/common/text.hpp"

namespace vthink::writer {

using nlohmann::json;

std::string_view to_string(WriterErrc e) {
  switch (e) {
    case WriterErrc::InsufficientDemonstrations: return "InsufficientDemonstrations";
    case WriterErrc::InvalidConfig: return "InvalidConfig";
    case WriterErrc::InvalidDemonstration: return "InvalidDemonstration";
    case WriterErrc::BackendUnavailable: return "BackendUnavailable";
  }
  return "InvalidConfig";
}

std::vector<Demonstration> load_demonstrations(std::istream& in) {
  std::vector<Demonstration> demos;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto j = json::parse(line, nullptr, false);
    auto str = [&](const char* f) -> std::string {
      if (!j.is_object() || !j.contains(f) || !j[f].is_string() ||
          text::trim(j[f].get<std::string>()).empty()) {
        throw WriterError(WriterErrc::InvalidDemonstration,
                          fmt::format("InvalidDemonstration at line {}: '{}' must be a non-empty string",
                                      line_no, f));
      }
      return j[f].get<std::string>();
    };
    demos.push_back({str("image"), str("question"), str("prompt")});
  }
  return demos;
}

std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw WriterError(WriterErrc::InvalidDemonstration,
                      fmt::format("cannot open demonstration bank '{}'", path.string()));
  }
  return load_demonstrations(in);
}

void validate(const WriterConfig& c, std::size_t available) {
  if (c.k < 1) throw WriterError(WriterErrc::InvalidConfig, "InvalidConfig: k must be >= 1");
  if (c.max_attempts < 1) throw WriterError(WriterErrc::InvalidConfig, "InvalidConfig: max_attempts must be >= 1");
  if (!(c.diversity_threshold > 0.0 && c.diversity_threshold <= 1.0)) {
    throw WriterError(WriterErrc::InvalidConfig, "InvalidConfig: diversity_threshold must be in (0, 1]");
  }
  if (available < c.k) {
    throw WriterError(WriterErrc::InsufficientDemonstrations,
                      fmt::format("InsufficientDemonstrations: need {}, have {}", c.k, available));
  }
}

gateway::WriteRequest compose_writer_request(const bench::Sample& sample, const bench::ImageBlob& image,
                                             const std::vector<Demonstration>& demos,
                                             const WriterConfig& config) {
  validate(config, demos.size());
  gateway::WriteRequest req;
  req.question = sample.question;
  req.image = image.bytes;
  req.instruction = std::string(kWriterInstruction);
  for (std::size_t i = 0; i < config.k; ++i) {
    req.demonstrations.push_back({demos[i].question, demos[i].prompt});
  }
  return req;
}

FilterResult filter_leakage(std::string_view candidate, const bench::Sample& sample) {
  auto leak = prompts::check_leakage(candidate, sample);
  if (leak.leaked) return {false, "leakage: candidate " + leak.reason, 0};
  return {};
}

double jaccard(std::string_view a, std::string_view b) {
  auto ta = text::word_tokens(a);
  auto tb = text::word_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

FilterResult filter_diversity(std::string_view candidate, const std::vector<Demonstration>& demos,
                              const WriterConfig& config) {
  double worst = 0;
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    double r = jaccard(candidate, demos[i].prompt);
    if (r > worst) {
      worst = r;
      worst_index = i;
    }
  }
  if (worst > config.diversity_threshold) {
    return {false,
            fmt::format("diversity: overlap {:.4f} with demonstration #{} exceeds {:.4f}", worst,
                        worst_index + 1, config.diversity_threshold),
            worst};
  }
  return {true, {}, worst};
}

namespace {

// Word stems of editing verbs drawn from the operation catalog.
constexpr std::array<std::string_view, 38> kEditStems = {
    "enhanc", "sharpen", "deblur", "denois", "zoom",     "magnif",  "crop",     "remov",
    "eras",   "outpaint", "extend", "expand", "inpaint", "fill",    "restor",   "coloriz",
    "colour", "color",    "saturat", "bright", "darken", "expos",   "contrast", "adjust",
    "textur", "render",   "rotat",   "view",   "draw",   "outlin",  "highlight", "mark",
    "reconstruct", "clarif", "increas", "reduc", "balanc", "synthes"};

}  // namespace

FilterResult filter_semantic(std::string_view candidate) {
  for (const auto& token : text::word_tokens(candidate)) {
    for (auto stem : kEditStems) {
      if (std::string_view(token).starts_with(stem)) return {};
    }
  }
  return {false, "semantic: no editing verb from the operation vocabulary", 0};
}

WrittenPrompt write_edit_prompt(const bench::Sample& sample, const bench::ImageBlob& image,
                                const std::vector<Demonstration>& demos, const WriterConfig& config,
                                const gateway::BackendClient& writer,
                                const prompts::PromptLibrary& library) {
  auto request = compose_writer_request(sample, image, demos, config);
  WrittenPrompt out;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    out.attempts = attempt;
    std::string candidate;
    try {
      candidate = text::trim(writer.write(request, sample.sample_id).prompt);
    } catch (const gateway::GatewayError& e) {
      throw WriterError(WriterErrc::BackendUnavailable,
                        fmt::format("BackendUnavailable: writer '{}': {}", writer.endpoint().id, e.what()));
    }
    if (candidate.empty() || !filter_semantic(candidate).pass) {
      ++out.semantic_rejections;
      continue;
    }
    if (!filter_leakage(candidate, sample).pass) {
      ++out.leakage_rejections;
      continue;
    }
    if (!filter_diversity(candidate, demos, config).pass) {
      ++out.diversity_rejections;
      continue;
    }
    out.text = std::move(candidate);
    out.source = CandidateSource::Writer;
    return out;
  }

  // Every candidate was rejected: route through the library instead.
  out.source = CandidateSource::Fallback;
  const auto* routed = &library.route(sample);
  try {
    out.text = prompts::render_prompt(*routed, sample);
  } catch (const prompts::PromptError& e) {
    if (e.code() != prompts::PromptErrc::LeakageDetected) throw;
    ++out.leakage_rejections;
    routed = &library.fallback();
    out.text = prompts::render_prompt(*routed, sample);
  }
  out.fallback_key = routed->key;
  return out;
}

}  // namespace vthink::writer
