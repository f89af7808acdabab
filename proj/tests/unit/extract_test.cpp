#include <random>

#include <gtest/gtest.h>

#include "vthink/scoring/extract.hpp"

namespace vthink::scoring {
namespace {

const std::vector<bench::Option> kCars = {
    {"A", "a blue truck"}, {"B", "a green bus"}, {"C", "a red car"}, {"D", "a bicycle"}};

Extraction ex(std::string_view raw, const std::vector<bench::Option>& opts = kCars) {
  return extract_answer(raw, opts);
}

TEST(Extract, OptionLabel) {
  EXPECT_EQ(ex("The answer is (B)."), (Extraction{"B", ExtractionRule::OptionLabel}));
  EXPECT_EQ(ex("B"), (Extraction{"B", ExtractionRule::OptionLabel}));
  EXPECT_EQ(ex("Clearly A GREEN BUS"), (Extraction{"A", ExtractionRule::OptionLabel}));
  EXPECT_EQ(ex("[c]"), (Extraction{"C", ExtractionRule::OptionLabel}));
  EXPECT_EQ(ex("Answer: D."), (Extraction{"D", ExtractionRule::OptionLabel}));
  EXPECT_EQ(ex("**A**"), (Extraction{"A", ExtractionRule::OptionLabel}));
}

TEST(Extract, OptionText) {
  EXPECT_EQ(ex("It shows a red car"), (Extraction{"C", ExtractionRule::OptionText}));
  EXPECT_EQ(ex("It is a GREEN BUS, parked."), (Extraction{"B", ExtractionRule::OptionText}));
}

TEST(Extract, LongestOptionTextWins) {
  std::vector<bench::Option> opts = {{"A", "red"}, {"B", "dark red"}};
  EXPECT_EQ(ex("it is dark red", opts).answer, "B");
}

TEST(Extract, LowercaseArticleIsNotALabel) {
  EXPECT_EQ(ex("a bicycle, I think").answer, "D");
  EXPECT_EQ(ex("a").answer, "A");
  EXPECT_EQ(ex("(a)").answer, "A");
}

TEST(Extract, Unparseable) {
  EXPECT_EQ(ex("I cannot tell"), (Extraction{std::nullopt, ExtractionRule::Unparseable}));
  EXPECT_EQ(ex(""), (Extraction{std::nullopt, ExtractionRule::Unparseable}));
}

TEST(Extract, YesNo) {
  std::vector<bench::Option> yn = {{"A", "Yes"}, {"B", "No"}};
  EXPECT_EQ(ex("no, it does not", {}), (Extraction{"NO", ExtractionRule::YesNo}));
  EXPECT_EQ(ex("Yes.", {}), (Extraction{"YES", ExtractionRule::YesNo}));
  EXPECT_EQ(ex("I'd say no", yn).answer, "B");
  EXPECT_EQ(ex("no", kCars).rule, ExtractionRule::Unparseable);
}

TEST(Extract, Correctness) {
  bench::Sample s;
  s.options = kCars;
  s.gold_answer = "C";
  s.gold_normalized = "C";
  EXPECT_TRUE(is_correct(ex("The answer is C"), s));
  EXPECT_FALSE(is_correct(ex("B"), s));
  EXPECT_FALSE(is_correct(ex("no idea"), s));
}

TEST(Extract, TotalOverArbitraryInput) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 80);
  for (int i = 0; i < 2000; ++i) {
    std::string raw(static_cast<std::size_t>(len(rng)), '\0');
    for (auto& c : raw) c = static_cast<char>(byte(rng));
    Extraction e;
    ASSERT_NO_THROW(e = ex(raw));
    EXPECT_EQ(e.answer.has_value(), e.rule != ExtractionRule::Unparseable);
    if (e.rule == ExtractionRule::OptionLabel || e.rule == ExtractionRule::OptionText) {
      EXPECT_TRUE(*e.answer == "A" || *e.answer == "B" || *e.answer == "C" || *e.answer == "D");
    }
  }
}

TEST(Extract, RuleNames) {
  for (auto r : {ExtractionRule::OptionLabel, ExtractionRule::OptionText, ExtractionRule::YesNo,
                 ExtractionRule::Unparseable}) {
    EXPECT_EQ(parse_extraction_rule(to_string(r)), r);
  }
  EXPECT_FALSE(parse_extraction_rule("nope"));
}

}  // namespace
}  // namespace vthink::scoring
