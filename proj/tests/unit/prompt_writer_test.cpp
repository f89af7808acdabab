#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "vthink/gateway/client.hpp"
#include "vthink/gateway/mock.hpp"
#include "vthink/writer/prompt_writer.hpp"

namespace vthink::writer {
namespace {

std::vector<Demonstration> demos(std::size_t n) {
  const std::vector<std::string> prompts = {
      "Zoom in on the countertop and sharpen the outline of each mug.",
      "Enlarge the area around the door and deblur the lettering on the sign.",
      "Brighten the shadows beneath the tree and denoise the dark regions.",
      "Rotate the viewpoint to the left side so the rear blocks become visible.",
      "Draw horizontal guide lines from the top of each bar to the value axis.",
      "Boost the saturation of the flower bed while keeping the fence unchanged."};
  std::vector<Demonstration> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"demo" + std::to_string(i) + ".png", "Question " + std::to_string(i) + "?", prompts[i % 6]});
  }
  return out;
}

struct WriterRig {
  std::shared_ptr<gateway::MockBackend> mock = std::make_shared<gateway::MockBackend>();
  gateway::BackendClient client{{"w", "mock://w", {gateway::Capability::Write}}, mock,
                                {std::chrono::milliseconds(0), std::chrono::milliseconds(0), [](auto) {}}};
  prompts::PromptLibrary library = prompts::PromptLibrary::builtin();
  bench::ImageBlob image{testing::tiny_png(1, 2, 3), "h", bench::ImageFormat::Png};
};

bench::Sample blue_sample() {
  auto s = testing::mc_sample("blue", "color recognition");
  s.options = {{"A", "blue"}, {"B", "green"}, {"C", "amber"}, {"D", "violet"}};
  return s;
}

TEST(Compose, TakesFirstKDemosInOrder) {
  auto d = demos(5);
  auto req = compose_writer_request(testing::mc_sample("x"), {}, d, {});
  ASSERT_EQ(req.demonstrations.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(req.demonstrations[i].prompt, d[i].prompt);
}

TEST(Compose, InsufficientDemonstrations) {
  try {
    compose_writer_request(testing::mc_sample("x"), {}, demos(3), {});
    FAIL();
  } catch (const WriterError& e) {
    EXPECT_EQ(e.code(), WriterErrc::InsufficientDemonstrations);
  }
}

TEST(Compose, SerializedRequestNeverContainsAnswerOrOptions) {
  for (const auto& s : testing::synthetic_samples(40, 4)) {
    auto body = gateway::encode(compose_writer_request(s, {}, demos(5), {})).dump();
    for (const auto& o : s.options) EXPECT_EQ(body.find(o.text), std::string::npos) << o.text;
    EXPECT_EQ(body.find("\"answer\""), std::string::npos);
    EXPECT_EQ(body.find("options"), std::string::npos);
  }
}

TEST(LeakageFilter, Examples) {
  auto s = blue_sample();
  EXPECT_TRUE(filter_leakage("Increase saturation", s).pass);
  EXPECT_FALSE(filter_leakage("Highlight the blue car", s).pass);

  auto one_char = testing::mc_sample("b");
  one_char.options = {{"A", "A"}, {"B", "B"}, {"C", "C"}, {"D", "D"}};
  one_char.gold_answer = "B";
  one_char.gold_normalized = "B";
  EXPECT_TRUE(filter_leakage("Mark option B", one_char).pass);
}

TEST(LeakageFilter, FreeFormGoldAnswer) {
  auto s = testing::mc_sample("ff");
  s.options.clear();
  s.gold_answer = "blue";
  s.gold_normalized = "BLUE";
  EXPECT_TRUE(filter_leakage("Increase saturation", s).pass);
  EXPECT_FALSE(filter_leakage("Make the  BLUE  areas brighter", s).pass);
}

TEST(DiversityFilter, Examples) {
  auto d = demos(5);
  WriterConfig cfg;
  auto echo = filter_diversity(d[1].prompt, d, cfg);
  EXPECT_FALSE(echo.pass);
  EXPECT_DOUBLE_EQ(echo.overlap, 1.0);
  auto disjoint = filter_diversity("Colorize everything vividly", {{"", "", "zoom on mugs"}}, cfg);
  EXPECT_TRUE(disjoint.pass);
  EXPECT_DOUBLE_EQ(disjoint.overlap, 0.0);
}

TEST(Jaccard, HandComputed) {
  // {a,b,c,d,e,f} vs {a,b,c,d,g,h}: intersection 4, union 8.
  EXPECT_DOUBLE_EQ(jaccard("a b c d e f", "a b c d g h"), 0.5);
  EXPECT_TRUE(filter_diversity("a b c d e f", {{"", "", "a b c d g h"}}, {}).pass);
  EXPECT_DOUBLE_EQ(jaccard("Zoom, zoom IN", "in zoom"), 1.0);
}

TEST(DiversityFilter, MonotoneInThreshold) {
  auto d = demos(6);
  const std::vector<std::string> candidates = {
      "Zoom in on the countertop and sharpen each mug.", "Brighten the shadows and denoise the regions.",
      "Rotate the view to expose hidden blocks.", "Draw lines.", d[3].prompt, "Something else entirely."};
  for (const auto& c : candidates) {
    bool failed_before = false;
    for (double t = 1.0; t >= 0.0; t -= 0.05) {
      WriterConfig cfg;
      cfg.diversity_threshold = t;
      bool pass = filter_diversity(c, d, cfg).pass;
      if (failed_before) {
        EXPECT_FALSE(pass) << c << " @ " << t;
      }
      failed_before = failed_before || !pass;
    }
  }
}

TEST(SemanticFilter, NeedsEditVerb) {
  EXPECT_TRUE(filter_semantic("Deblur the image and increase contrast").pass);
  EXPECT_TRUE(filter_semantic("Outpainting the borders").pass);
  EXPECT_FALSE(filter_semantic("The answer is probably B").pass);
}

TEST(WriteEditPrompt, CleanCandidateAcceptedVerbatim) {
  WriterRig rig;
  rig.mock->on(gateway::kWriteRoute, gateway::mock::scripted_writer({"Deblur the image and increase contrast"}));
  auto out = write_edit_prompt(blue_sample(), rig.image, demos(5), {}, rig.client, rig.library);
  EXPECT_EQ(out.text, "Deblur the image and increase contrast");
  EXPECT_EQ(out.source, CandidateSource::Writer);
  EXPECT_EQ(out.attempts, 1);
}

TEST(WriteEditPrompt, LeakingCandidatesFallBackToRoutedPrompt) {
  WriterRig rig;
  rig.mock->on(gateway::kWriteRoute, gateway::mock::scripted_writer({"Enhance the blue object",
                                                                     "Sharpen the blue region",
                                                                     "Zoom on the blue thing"}));
  auto s = blue_sample();
  auto out = write_edit_prompt(s, rig.image, demos(5), {}, rig.client, rig.library);
  EXPECT_EQ(out.source, CandidateSource::Fallback);
  EXPECT_EQ(out.leakage_rejections, 3);
  EXPECT_EQ(out.fallback_key, rig.library.route(s).key);
  EXPECT_EQ(rig.mock->calls(gateway::kWriteRoute), 3);
}

TEST(WriteEditPrompt, DemoEchoRejectedThenNextAttemptUsed) {
  WriterRig rig;
  auto d = demos(5);
  rig.mock->on(gateway::kWriteRoute, gateway::mock::scripted_writer({d[1].prompt, "Denoise the picture gently"}));
  auto out = write_edit_prompt(blue_sample(), rig.image, d, {}, rig.client, rig.library);
  EXPECT_EQ(out.text, "Denoise the picture gently");
  EXPECT_EQ(out.diversity_rejections, 1);
  EXPECT_EQ(out.attempts, 2);
}

TEST(WriteEditPrompt, BackendFailureIsBackendUnavailable) {
  WriterRig rig;
  rig.mock->on(gateway::kWriteRoute, gateway::mock::scripted_writer({"x"}));
  rig.mock->inject(gateway::kWriteRoute, {gateway::MockBackend::FaultKind::ServerError});
  try {
    write_edit_prompt(blue_sample(), rig.image, demos(5), {}, rig.client, rig.library);
    FAIL();
  } catch (const WriterError& e) {
    EXPECT_EQ(e.code(), WriterErrc::BackendUnavailable);
  }
}

TEST(WriteEditPrompt, DeterministicUnderScriptedMocks) {
  std::vector<std::string> texts;
  for (int run = 0; run < 2; ++run) {
    WriterRig rig;
    rig.mock->on(gateway::kWriteRoute, gateway::mock::hashed_writer());
    for (const auto& s : testing::synthetic_samples(10)) {
      texts.push_back(write_edit_prompt(s, rig.image, demos(5), {}, rig.client, rig.library).text);
    }
  }
  EXPECT_TRUE(std::equal(texts.begin(), texts.begin() + 10, texts.begin() + 10));
}

TEST(Demonstrations, LoadAndValidate) {
  std::istringstream in(R"({"image":"a.png","question":"q?","prompt":"Zoom in."})"
                        "\n"
                        R"({"image":"b.png","question":"q2?"})");
  EXPECT_THROW(load_demonstrations(in), WriterError);
  auto bank = load_demonstrations(testing::data_dir().parent_path().parent_path() / "data" / "demonstrations.jsonl");
  EXPECT_GE(bank.size(), 5u);
}

TEST(Config, Validation) {
  WriterConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(validate(cfg, 5), WriterError);
  cfg = {};
  cfg.diversity_threshold = 1.5;
  EXPECT_THROW(validate(cfg, 5), WriterError);
  cfg = {};
  cfg.max_attempts = 0;
  EXPECT_THROW(validate(cfg, 5), WriterError);
}

}  // namespace
}  // namespace vthink::writer
