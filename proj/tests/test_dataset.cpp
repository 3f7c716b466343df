#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace simrag;
using testing_support::TempDir;

namespace {

std::string single(std::initializer_list<std::string> rows) {
  std::string text = "sentence1\tsentence2\tscore\tsplit\n";
  for (const auto& r : rows) text += r + "\n";
  return text;
}

const std::string kCanonicalTail = "b\tc\t1\tvalidation\nd\te\t0.5\ttest";

}  // namespace

TEST(Dataset, TableOneRowsParse) {
  const auto ds = parse_single_file(single(
      {"The oncogenic activity of mutant Kras appears dependent on functional Craf.\tOncogenic KRAS "
       "mutations are common in cancer.\t2.2\ttrain",
       "The up-regulation of miR-146a was also detected in cervical cancer tissues.\tThe expression of "
       "miR-146a has been found to be up-regulated in cervical cancer.\t4\ttrain",
       kCanonicalTail}));
  ASSERT_EQ(ds.train.size(), 2u);
  EXPECT_EQ(ds.train[0].reference_score, 2.2);
  EXPECT_EQ(ds.train[0].sentence2, "Oncogenic KRAS mutations are common in cancer.");
  EXPECT_EQ(ds.train[1].reference_score, 4.0);
}

TEST(Dataset, ScoreBounds) {
  EXPECT_NO_THROW(parse_single_file(single({"a\tb\t0\ttrain", kCanonicalTail})));
  EXPECT_NO_THROW(parse_single_file(single({"a\tb\t4.0\ttrain", kCanonicalTail})));
  EXPECT_THROW(parse_single_file(single({"a\tb\t4.5\ttrain", kCanonicalTail})), MalformedRow);
  EXPECT_THROW(parse_single_file(single({"a\tb\t-0.1\ttrain", kCanonicalTail})), MalformedRow);
  EXPECT_THROW(parse_single_file(single({"a\tb\tfour\ttrain", kCanonicalTail})), MalformedRow);
  EXPECT_THROW(parse_single_file(single({"a\tb\t2,5\ttrain", kCanonicalTail})), MalformedRow);
}

TEST(Dataset, MalformedRowNamesLine) {
  try {
    parse_single_file(single({"a\tb\t1\ttrain", "only\ttwo", kCanonicalTail}), "x.tsv");
    FAIL() << "expected MalformedRow";
  } catch (const MalformedRow& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("x.tsv"), std::string::npos);
    EXPECT_EQ(e.category(), ErrorCategory::data);
  }
  EXPECT_THROW(parse_single_file(single({"a\tb\t1\tdev", kCanonicalTail})), MalformedRow);
  EXPECT_THROW(parse_single_file("s1\ts2\tscore\tsplit\n"), MalformedRow);
}

TEST(Dataset, EmptySplitRejected) {
  EXPECT_THROW(parse_single_file(single({"a\tb\t1\ttrain", "c\td\t2\ttest"})), EmptySplit);
}

TEST(Dataset, IdsFollowFileOrder) {
  const auto ds = parse_single_file(single({"a\tb\t1\ttest", "c\td\t2\ttrain", "e\tf\t3\tvalidation"}));
  EXPECT_EQ(ds.test[0].id, 0);
  EXPECT_EQ(ds.train[0].id, 1);
  EXPECT_EQ(ds.validation[0].id, 2);
}

TEST(Dataset, CrlfAndBlankLinesTolerated) {
  const auto ds = parse_single_file(
      "sentence1\tsentence2\tscore\tsplit\r\na\tb\t1\ttrain\r\n\r\nc\td\t2\tvalidation\r\ne\tf\t3\ttest\r\n");
  EXPECT_EQ(ds.train[0].sentence2, "b");
  EXPECT_EQ(ds.test[0].reference_score, 3.0);
}

TEST(Dataset, FixtureHasCanonicalCounts) {
  const auto& ds = testing_support::fixture();
  const auto c = validate_counts(ds);
  EXPECT_TRUE(c.canonical);
  EXPECT_EQ(c.train, 64u);
  EXPECT_EQ(c.validation, 16u);
  EXPECT_EQ(c.test, 20u);
  for (Split s : kAllSplits) {
    for (const auto& p : ds.split(s)) {
      EXPECT_GE(p.reference_score, 0.0);
      EXPECT_LE(p.reference_score, 4.0);
    }
  }
}

TEST(Dataset, NonCanonicalCountsWarnButLoad) {
  std::vector<std::string> rows;
  for (int i = 0; i < 6; ++i) rows.push_back("t" + std::to_string(i) + "\tu\t1\ttrain");
  for (int i = 0; i < 2; ++i) rows.push_back("v" + std::to_string(i) + "\tu\t2\tvalidation");
  for (int i = 0; i < 2; ++i) rows.push_back("x" + std::to_string(i) + "\tu\t3\ttest");
  std::string text = "sentence1\tsentence2\tscore\tsplit\n";
  for (const auto& r : rows) text += r + "\n";
  const auto c = validate_counts(parse_single_file(text));
  EXPECT_FALSE(c.canonical);
  EXPECT_NE(c.warning.find("6/2/2"), std::string::npos);
}

TEST(Dataset, SerializeRoundTrip) {
  const auto& ds = testing_support::fixture();
  const auto again = parse_single_file(serialize_single_file(ds));
  for (Split s : kAllSplits) EXPECT_EQ(again.split(s), ds.split(s));
  EXPECT_EQ(dataset_fingerprint(again), dataset_fingerprint(ds));
}

TEST(Dataset, FuzzedScoresAcceptedIffInRange) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::round(u(rng) * 100) / 100;
    const std::string text = format_decimal(std::abs(v));
    const std::string field = v < 0 ? "-" + text : text;
    const auto doc = single({"a\tb\t" + field + "\ttrain", kCanonicalTail});
    if (v >= 0.0 && v <= 4.0) {
      const auto ds = parse_single_file(doc);
      EXPECT_EQ(ds.train[0].reference_score, std::abs(v)) << field;
    } else {
      EXPECT_THROW(parse_single_file(doc), MalformedRow) << field;
    }
  }
}

TEST(Dataset, PreSplitDirectory) {
  TempDir dir;
  testing_support::spit(dir / "train.tsv", "sentence1\tsentence2\tscore\na\tb\t1\nc\td\t2\n");
  testing_support::spit(dir / "validation.tsv", "sentence1\tsentence2\tscore\ne\tf\t3\n");
  testing_support::spit(dir / "test.tsv", "sentence1\tsentence2\tscore\ng\th\t4\n");
  const auto ds = load_dataset(dir.path(), DatasetFormat::pre_split);
  EXPECT_EQ(ds.train[1].id, 1);
  EXPECT_EQ(ds.validation[0].id, 2);
  EXPECT_EQ(ds.test[0].id, 3);
  EXPECT_EQ(ds.test[0].reference_score, 4.0);

  std::filesystem::remove(dir / "test.tsv");
  EXPECT_THROW(load_dataset(dir.path(), DatasetFormat::pre_split), MissingFile);
}

TEST(Dataset, MissingFile) {
  try {
    load_dataset("/nonexistent/biosses.tsv");
    FAIL();
  } catch (const MissingFile& e) {
    EXPECT_EQ(e.category(), ErrorCategory::config);
  }
}
