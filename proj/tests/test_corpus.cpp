#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "semfunc/corpus.hpp"
#include "semfunc/errors.hpp"

using namespace semfunc;

TEST_CASE("triple loading keeps good lines and records bad ones") {
  std::istringstream in(
      "# header comment\n"
      "Dog\tCHASE\tcat\r\n"
      "\n"
      "dog\tchase\tmouse\textra\n"
      "_\tsleep\t_\n"
      "cat\t_\tmouse\n"
      "cat\teat\t_\n"
      "\tdrink\twater\n"
      "mouse\thide\tcheese\n"
      "dog\teat\tbone\n"
      "horse\teat\thay\n"
      "cow\teat\tgrass\n"
      "bird\tsing\t_\n"
      "fish\tswim\t_\n"
      "dog\tbark\t_\n"
      "cat\tpurr\t_\n"
      "owl\thoot\t_\n"
      "bee\tbuzz\t_\n"
      "ant\tmarch\t_\n"
      "fox\tjump\t_\n"
      "elk\trun\t_\n"
      "ram\tbutt\t_\n"
      "hen\tcluck\t_\n"
      "pig\toink\t_\n"
      "owl\tblink\t_\n"
      "cat\tnap\t_\n"
      "dog\tdig\t_\n"
      "fox\ttrot\t_\n"
      "bee\tsting\t_\n"
      "ant\tlift\t_\n"
      "hen\tpeck\t_\n"
      "pig\troll\t_\n"
      "elk\tleap\t_\n"
      "ram\tgraze\t_\n"
      "owl\tglide\t_\n"
      "fox\tyip\t_\n"
      "bee\thum\t_\n"
      "hen\tscratch\t_\n"
      "pig\tsnore\t_\n"
      "elk\twade\t_\n"
      "ram\tstamp\t_\n"
      "hen\tstrut\t_\n");
  const TripleLoadResult result = load_triples(in);

  CHECK(result.data_lines == 40);
  REQUIRE(result.malformed.size() == 4);
  CHECK(result.malformed[0].line == 4);
  CHECK(result.malformed[0].reason ==
        "expected 3 tab-separated fields, got 4");
  CHECK(result.malformed[1].line == 5);
  CHECK(result.malformed[1].reason ==
        "both arguments missing; at least one is required");
  CHECK(result.malformed[2].line == 6);
  CHECK(result.malformed[2].reason == "missing verb");
  CHECK(result.malformed[3].line == 8);
  CHECK(result.malformed[3].reason == "empty argument field");

  REQUIRE(result.triples.size() == 36);
  // case folded, carriage return stripped
  CHECK(result.triples[0].subject == "dog");
  CHECK(result.triples[0].verb == "chase");
  CHECK(result.triples[0].object == "cat");
  CHECK(result.triples[0].transitive());

  // "_" in one slot leaves that side empty
  const TripleRecord& eat = result.triples[1];
  CHECK(eat.subject == "cat");
  CHECK_FALSE(eat.object.has_value());
  CHECK_FALSE(eat.transitive());
}

TEST_CASE("a corpus that is mostly garbage is rejected outright") {
  std::istringstream in(
      "dog\tchase\tcat\n"
      "not a triple\n"
      "also wrong\n"
      "dog\teat\tbone\n");
  CHECK_THROWS_WITH_AS(load_triples(in),
                       doctest::Contains("over the 10% limit"), InputError);
}

TEST_CASE("exactly ten percent malformed is still accepted") {
  std::ostringstream corpus;
  for (int i = 0; i < 9; ++i) {
    corpus << "dog\tchase\tcat\n";
  }
  corpus << "broken line\n";
  std::istringstream in(corpus.str());
  const TripleLoadResult result = load_triples(in);
  CHECK(result.data_lines == 10);
  CHECK(result.malformed.size() == 1);
  CHECK(result.triples.size() == 9);
}

TEST_CASE("missing corpus files raise a clean error") {
  CHECK_THROWS_AS(load_triples_file("/nonexistent/corpus.tsv"), InputError);
}

TEST_CASE("role tags keep noun and verb lemmas apart") {
  CHECK(noun_predicate("run") == "run_n");
  CHECK(verb_predicate("run") == "run_v");
  CHECK(noun_predicate("run") != verb_predicate("run"));
}

TEST_CASE("vocabulary accumulates counts in first-occurrence order") {
  Vocabulary v;
  v.add("b_n");
  v.add("a_n", 2.0);
  v.add("b_n", 0.5);
  CHECK(v.size() == 2);
  CHECK(v.ids() == (std::vector<std::string>{"b_n", "a_n"}));
  CHECK(v.frequency("b_n") == 1.5);
  CHECK(v.frequency("a_n") == 2.0);
  CHECK(v.index_of("b_n") == 0);
  CHECK(v.index_of("a_n") == 1);
  CHECK(v.contains("a_n"));
  CHECK_FALSE(v.contains("c_n"));
  CHECK_THROWS_AS(v.frequency("c_n"), LookupError);
  CHECK_THROWS_AS(v.index_of("c_n"), LookupError);
}

namespace {

TripleRecord svo(const char* s, const char* v, const char* o) {
  TripleRecord t;
  t.subject = s;
  t.verb = v;
  t.object = o;
  return t;
}

}  // namespace

TEST_CASE("pruning drops rare predicates and the triples that carry them") {
  const std::vector<TripleRecord> triples{
      svo("a", "v", "b"), svo("a", "v", "b"), svo("a", "v", "c")};
  const VocabularyBuildResult result = build_vocabulary(triples, 2);

  // c_n occurs once, so the third triple goes; a and v survive at count 2
  CHECK(result.dropped == 1);
  REQUIRE(result.kept.size() == 2);
  CHECK(result.vocab.size() == 3);
  CHECK(result.vocab.frequency("a_n") == 2.0);
  CHECK(result.vocab.frequency("v_v") == 2.0);
  CHECK(result.vocab.frequency("b_n") == 2.0);
  CHECK_FALSE(result.vocab.contains("c_n"));
}

TEST_CASE("pruning cascades when dropped triples starve other predicates") {
  // b_n appears twice but both carriers also mention a singleton, so the
  // second pass removes b_n as well and nothing survives
  const std::vector<TripleRecord> triples{
      svo("b", "u", "x"), svo("b", "w", "y")};
  const VocabularyBuildResult result = build_vocabulary(triples, 2);
  CHECK(result.kept.empty());
  CHECK(result.vocab.size() == 0);
  CHECK(result.dropped == 2);
}

TEST_CASE("min count one keeps everything and counts stay exact") {
  std::vector<TripleRecord> triples{svo("a", "v", "b")};
  TripleRecord intransitive;
  intransitive.subject = "a";
  intransitive.verb = "v";
  triples.push_back(intransitive);

  const VocabularyBuildResult result = build_vocabulary(triples, 1);
  CHECK(result.dropped == 0);
  CHECK(result.kept.size() == 2);
  CHECK(result.vocab.frequency("a_n") == 2.0);
  CHECK(result.vocab.frequency("v_v") == 2.0);
  CHECK(result.vocab.frequency("b_n") == 1.0);
}

TEST_CASE("similarity files are strict about scores") {
  std::istringstream good(
      "# pair gold\n"
      "Dog\tCat\t8.5\r\n"
      "dog\tbone\t2.25\n");
  const std::vector<SimilarityPair> pairs = load_similarity(good);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].word1 == "dog");
  CHECK(pairs[0].word2 == "cat");
  CHECK(pairs[0].gold == 8.5);
  CHECK(pairs[1].gold == 2.25);

  std::istringstream bad_score("dog\tcat\t1.0x\n");
  CHECK_THROWS_WITH_AS(load_similarity(bad_score),
                       doctest::Contains("not a finite number"), InputError);

  std::istringstream missing_field("dog\tcat\n");
  CHECK_THROWS_AS(load_similarity(missing_field), InputError);

  std::istringstream inf_score("dog\tcat\tinf\n");
  CHECK_THROWS_AS(load_similarity(inf_score), InputError);
}

TEST_CASE("relpron files parse roles and splits strictly") {
  std::istringstream good(
      "# term hypernym verb argument role split\n"
      "Saw\tTool\tCut\tWood\tSBJ\tdev\r\n"
      "meat\tfood\tcut\tknife\tOBJ\tTEST\n");
  const std::vector<RelpronEntry> entries = load_relpron(good);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].term == "saw");
  CHECK(entries[0].hypernym == "tool");
  CHECK(entries[0].verb == "cut");
  CHECK(entries[0].argument == "wood");
  CHECK(entries[0].role == ArgRole::Subject);
  CHECK(entries[0].split == RelpronSplit::Dev);
  CHECK(entries[1].role == ArgRole::Object);
  CHECK(entries[1].split == RelpronSplit::Test);

  std::istringstream bad_role("saw\ttool\tcut\twood\tSUBJ\tdev\n");
  CHECK_THROWS_WITH_AS(load_relpron(bad_role),
                       doctest::Contains("must be SBJ or OBJ"), InputError);

  std::istringstream bad_split("saw\ttool\tcut\twood\tSBJ\ttrain\n");
  CHECK_THROWS_WITH_AS(load_relpron(bad_split),
                       doctest::Contains("must be dev or test"), InputError);

  std::istringstream short_line("saw\ttool\tcut\twood\tSBJ\n");
  CHECK_THROWS_AS(load_relpron(short_line), InputError);

  std::istringstream empty_field("saw\t\tcut\twood\tSBJ\tdev\n");
  CHECK_THROWS_WITH_AS(load_relpron(empty_field),
                       doctest::Contains("empty field"), InputError);
}
