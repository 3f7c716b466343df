#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace simrag;
using testing_support::kDataDir;
using testing_support::kGoldenDir;
using testing_support::slurp;

namespace {

std::vector<SentencePair> table_one() {
  return parse_split_file(slurp(kDataDir / "table1.tsv"), "table1.tsv");
}

}  // namespace

TEST(Prompt, GoldenSystemPromptWithoutExamples) {
  const auto sp = build_system_prompt(table_one(), 0, 0);
  EXPECT_EQ(sp.text, slurp(kGoldenDir / "system_k0.golden.txt"));
  EXPECT_EQ(sp.text, "You are a helpful assistant who helps retrieve similarity scores between two sentences.");
  EXPECT_TRUE(sp.example_ids.empty());
}

TEST(Prompt, GoldenSystemPromptFirstTwo) {
  const auto sp = build_system_prompt(table_one(), 2, 0, SelectionMode::first_k);
  EXPECT_EQ(sp.text, slurp(kGoldenDir / "system_k2_first_k.golden.txt"));
}

TEST(Prompt, GoldenUserPrompt) {
  EXPECT_EQ(build_user_prompt(table_one()[1]), slurp(kGoldenDir / "user_table1_row2.golden.txt"));
}

TEST(Prompt, ExampleLineMatchesPublishedExample) {
  // The reference example line drops the final period of sentence 2; given that
  // text, the line must come out character for character.
  SentencePair p{0, "The oncogenic activity of mutant Kras appears dependent on functional Craf.",
                 "Oncogenic KRAS mutations are common in cancer", 2.2};
  EXPECT_EQ(format_example(p),
            "The sentence \"The oncogenic activity of mutant Kras appears dependent on functional "
            "Craf.\" and the sentence \"Oncogenic KRAS mutations are common in cancer\" have a "
            "similarty score of 2.2");
}

TEST(Prompt, IntegerScoresRenderWithoutDecimals) {
  SentencePair p{0, "a", "b", 4.0};
  const auto line = format_example(p);
  EXPECT_TRUE(line.ends_with("have a similarty score of 4")) << line;
  EXPECT_EQ(render_score(0.0), "0");
  EXPECT_EQ(render_score(2.2), "2.2");
  EXPECT_EQ(render_score(3.75), "3.75");
}

TEST(Prompt, MarkerCountEqualsK) {
  const auto& train = testing_support::fixture().train;
  for (std::size_t k : {0u, 1u, 10u, 20u, 60u, 64u}) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
      const auto sp = build_system_prompt(train, k, seed);
      EXPECT_EQ(count_occurrences(sp.text, kExampleMarker), k);
      EXPECT_EQ(sp.example_ids.size(), k);
      EXPECT_EQ(std::set<int>(sp.example_ids.begin(), sp.example_ids.end()).size(), k);
      EXPECT_TRUE(sp.text.starts_with(kSystemPreamble));
      EXPECT_FALSE(sp.text.ends_with("\n"));
    }
  }
}

TEST(Prompt, SamplingIsDeterministicAndSeedSensitive) {
  const auto& train = testing_support::fixture().train;
  const auto a = build_system_prompt(train, 20, 5);
  const auto b = build_system_prompt(train, 20, 5);
  const auto c = build_system_prompt(train, 20, 6);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.example_ids, b.example_ids);
  EXPECT_NE(a.example_ids, c.example_ids);
}

TEST(Prompt, FullSampleCoversTrainSplit) {
  const auto& train = testing_support::fixture().train;
  const auto sp = build_system_prompt(train, train.size(), 3);
  std::set<int> ids(sp.example_ids.begin(), sp.example_ids.end());
  std::set<int> expected;
  for (const auto& p : train) expected.insert(p.id);
  EXPECT_EQ(ids, expected);
}

TEST(Prompt, TooManyExamples) {
  const auto& train = testing_support::fixture().train;
  try {
    build_system_prompt(train, 65, 0);
    FAIL();
  } catch (const KTooLarge& e) {
    EXPECT_EQ(e.category(), ErrorCategory::config);
  }
}

TEST(Prompt, ExamplesOnlyFromTrainSplit) {
  const auto& ds = testing_support::fixture();
  std::set<int> train_ids;
  for (const auto& p : ds.train) train_ids.insert(p.id);
  for (int id : build_system_prompt(ds.train, 64, 11).example_ids) EXPECT_TRUE(train_ids.count(id));
}

TEST(Prompt, UserPromptCarriesFormatDirective) {
  for (const auto& p : testing_support::fixture().test) {
    const auto u = build_user_prompt(p);
    EXPECT_NE(u.find("Similarity score :"), std::string::npos);
    EXPECT_NE(u.find("\"" + p.sentence1 + "\""), std::string::npos);
    EXPECT_NE(u.find("\"" + p.sentence2 + "\""), std::string::npos);
  }
}

TEST(Prompt, BundleAgreesWithParts) {
  const auto& ds = testing_support::fixture();
  const auto b = build_prompt_bundle(ds.train, ds.test[3], 10, 8);
  EXPECT_EQ(b.system_prompt, build_system_prompt(ds.train, 10, 8).text);
  EXPECT_EQ(b.user_prompt, build_user_prompt(ds.test[3]));
}
