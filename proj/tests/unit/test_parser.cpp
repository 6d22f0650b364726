#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "actrchr/parser.hpp"
#include "random_models.hpp"

using namespace actr;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(ACTRCHR_FIXTURES) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Parser, CountingModel) {
  auto m = parse_model(read_fixture("counting.actr"), "counting.actr");
  EXPECT_EQ(m.types.size(), 3u);
  EXPECT_EQ(m.chunks.size(), 6u);
  EXPECT_EQ(m.declarative, (std::vector<Symbol>{Symbol("b"), Symbol("c")}));
  ASSERT_EQ(m.buffers.size(), 2u);
  EXPECT_TRUE(m.buffers[1].pending);
  ASSERT_EQ(m.rules.size(), 1u);
  const Rule& inc = m.rules[0];
  EXPECT_EQ(inc.name, Symbol("inc"));
  ASSERT_EQ(inc.lhs.size(), 2u);
  EXPECT_EQ(inc.lhs[1].pairs[0].value, Value(Variable("X")));
  ASSERT_EQ(inc.rhs.size(), 2u);
  EXPECT_EQ(inc.rhs[0].kind, ActionKind::Modify);
  EXPECT_EQ(inc.rhs[1].kind, ActionKind::Request);
  EXPECT_EQ(inc.rhs[1].type, Symbol("succ"));
  EXPECT_TRUE(validate(m).empty());
}

TEST(Parser, MissingColonReportsSpan) {
  try {
    parse_model(read_fixture("broken.actr"), "broken.actr");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().line, 2u);
    EXPECT_EQ(e.span().column, 9u);
    EXPECT_STREQ(e.what(), "broken.actr:2:9: error: expected ':', found 'number'");
  }
}

TEST(Parser, CommentsAndHashInsideIdentifiers) {
  auto m = parse_model("# leading comment\ntype t { a } # trailing\nchunk x#1 : t { a: nil }\n");
  ASSERT_EQ(m.chunks.size(), 1u);
  EXPECT_EQ(m.chunks[0].id, Symbol("x#1"));
}

TEST(Parser, KeywordsAreContextual) {
  auto m = parse_model("type rule { type }\nchunk buffer : rule { type: nil }\nbuffer modify = buffer\n");
  EXPECT_EQ(m.types[0].name, Symbol("rule"));
  EXPECT_EQ(m.buffers[0].name, Symbol("modify"));
  EXPECT_TRUE(validate(m).empty());
}

TEST(Parser, UnexpectedEndOfInput) {
  EXPECT_THROW(parse_model("rule r {\n  goal: g { current: X }\n"), ParseError);
  EXPECT_THROW(parse_model("type t { a"), ParseError);
}

TEST(Parser, PrintParseRoundTripOnFixture) {
  auto m = parse_model(read_fixture("counting.actr"));
  auto printed = print_model(m);
  EXPECT_EQ(parse_model(printed), m);
  EXPECT_EQ(print_model(parse_model(printed)), printed);
}

TEST(Parser, PrintParseRoundTripOnRandomModels) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto m = gen::random_model(rng);
    auto printed = print_model(m);
    Model back;
    ASSERT_NO_THROW(back = parse_model(printed)) << printed;
    EXPECT_EQ(print_model(back), printed);
    EXPECT_TRUE(validate(back).empty()) << printed;
  }
}

TEST(Parser, PrintRuleFormat) {
  auto m = parse_model(read_fixture("counting.actr"));
  EXPECT_EQ(print_rule(m.rules[0], m.type_table()),
            "rule inc {\n"
            "  goal: g { current: X }\n"
            "  retrieval: succ { number: X, successor: Y }\n"
            "  ==>\n"
            "  modify goal { current: Y }\n"
            "  request retrieval succ { number: Y }\n"
            "}\n");
}
