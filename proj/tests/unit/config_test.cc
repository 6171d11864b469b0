#include "mpbandit/config.h"

#include <gtest/gtest.h>

#include "mpbandit/errors.h"

namespace mpbandit {
namespace {

TEST(ConfigTest, ParsesSectionsAndScalars) {
  const auto doc = ConfigDocument::Parse(R"toml(
# top comment
[environment]
num_players = 2        # trailing comment
horizon = 1_000_000
feedback = "reward_only"
dummy_action = false
means = [0.9, 0.8,
         0.3, 0.2]

[algorithm]
name = "doubling(alg1)"
delta = +1e-1
)toml");
  EXPECT_DOUBLE_EQ(doc.Find("environment", "num_players")->as_number(), 2);
  EXPECT_DOUBLE_EQ(doc.Find("environment", "horizon")->as_number(), 1e6);
  EXPECT_EQ(doc.Find("environment", "feedback")->as_string(), "reward_only");
  EXPECT_FALSE(doc.Find("environment", "dummy_action")->as_bool());
  const auto& means = doc.Find("environment", "means")->as_array();
  ASSERT_EQ(means.size(), 4u);
  EXPECT_DOUBLE_EQ(means[3].as_number(), 0.2);
  EXPECT_EQ(doc.Find("algorithm", "name")->line, 12);
  EXPECT_DOUBLE_EQ(doc.Find("algorithm", "delta")->as_number(), 0.1);
  EXPECT_EQ(doc.Find("algorithm", "missing"), nullptr);
  EXPECT_EQ(doc.Find("nope", "name"), nullptr);
}

TEST(ConfigTest, NestedArraysAndEscapes) {
  const auto doc = ConfigDocument::Parse(
      "[e]\nrows = [[0.1, 0.2], [0.3, 0.4],]\ns = \"a\\\"b\\\\c\\n\"\n");
  const auto& rows = doc.Find("e", "rows")->as_array();
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[1].as_array()[0].as_number(), 0.3);
  EXPECT_EQ(doc.Find("e", "s")->as_string(), "a\"b\\c\n");
  // A '#' inside a string is not a comment.
  EXPECT_EQ(ConfigDocument::Parse("[e]\nx = \"a#b\"\n").Find("e", "x")->as_string(),
            "a#b");
}

TEST(ConfigTest, SyntaxErrorsNameTheLine) {
  for (const char* text : {"[e\nx = 1\n", "[e]\nx 1\n", "[e]\nx = 1\nx = 2\n",
                           "[e]\nx = [1, 2\n", "[e]\nx = \"open\n", "[e]\nx = 1x\n"}) {
    try {
      ConfigDocument::Parse(text);
      FAIL() << text;
    } catch (const ConfigError& e) {
      ASSERT_FALSE(e.violations().empty());
      EXPECT_EQ(e.violations()[0].rfind("line ", 0), 0u) << e.violations()[0];
    }
  }
}

TEST(ConfigTest, ParseValueAndSet) {
  EXPECT_TRUE(ConfigDocument::ParseValue("true").as_bool());
  EXPECT_DOUBLE_EQ(ConfigDocument::ParseValue("-3.5").as_number(), -3.5);
  EXPECT_EQ(ConfigDocument::ParseValue("[1, 2]").as_array().size(), 2u);
  ConfigDocument doc;
  doc.Set("algorithm", "c_scale", ConfigDocument::ParseValue("0.01"));
  EXPECT_DOUBLE_EQ(doc.Find("algorithm", "c_scale")->as_number(), 0.01);
}

TEST(ConfigTest, MissingFileIsAnIoError) {
  EXPECT_THROW(ConfigDocument::ParseFile("/nonexistent/x.toml"), IoError);
}

}  // namespace
}  // namespace mpbandit
