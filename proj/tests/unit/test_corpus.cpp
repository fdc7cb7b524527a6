#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "livrank/corpus.hpp"
#include "livrank/error.hpp"

using namespace livrank;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("two-row manifest loads in file order") {
  std::istringstream in("id,name,province,county,image_ref\nb,B,P,C,b.png\na,A,P,C,a.png\n");
  const Cohort c = parse_manifest(in, "m.csv");
  REQUIRE(c.size() == 2);
  CHECK(c.items()[0].id == "b");
  CHECK(c.items()[1].id == "a");
  CHECK_FALSE(c.has_latent_scores());
  CHECK(c.at("a").name == "A");
  CHECK_THROWS_AS(c.at("zzz"), DataError);
}

TEST_CASE("duplicate id names the id and both lines") {
  std::istringstream in("id,name,province,county,image_ref\nv01,A,P,C,a.png\nv02,B,P,C,b.png\nv01,C,P,C,c.png\n");
  const std::string msg = error_of([&] { parse_manifest(in, "m.csv"); });
  CHECK(msg.find("\"v01\"") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("line 4") != std::string::npos);
}

TEST_CASE("malformed manifest rows are reported with their line") {
  std::istringstream in("id,name,province,county,image_ref\nv1,A,P\n");
  const std::string msg = error_of([&] { parse_manifest(in, "m.csv"); });
  CHECK(msg.find("m.csv:2") != std::string::npos);

  std::istringstream bad_header("id,name\nv1,A\n");
  CHECK_THROWS_AS(parse_manifest(bad_header, "m.csv"), DataError);

  std::istringstream empty_id("id,name,province,county,image_ref\n,A,P,C,x\n");
  CHECK_THROWS_AS(parse_manifest(empty_id, "m.csv"), DataError);
}

TEST_CASE("latent scores must be present for every item or none") {
  std::istringstream in("id,name,province,county,image_ref,latent_score\na,A,P,C,x,0.5\nb,B,P,C,y,\n");
  CHECK_THROWS_AS(parse_manifest(in, "m.csv"), DataError);
  std::istringstream bad("id,name,province,county,image_ref,latent_score\na,A,P,C,x,high\n");
  CHECK_THROWS_AS(parse_manifest(bad, "m.csv"), DataError);
}

TEST_CASE("missing manifest file is a data error") {
  CHECK_THROWS_AS(load_manifest(fixtures::data("does_not_exist.csv")), DataError);
}

TEST_CASE("the twenty-village manifest loads") {
  const Cohort c = load_manifest(fixtures::data("village20_manifest.csv"));
  CHECK(c.size() == 20);
  CHECK(c.contains("Jiangsu-Jianhe"));
  CHECK(c.contains("Yunnan-Xiaoguan"));
  CHECK(c.has_latent_scores());
  CHECK(c.at("Sichuan-Tounian").province == "Sichuan");
}

TEST_CASE("manifest write/read round-trip is identity") {
  const Cohort original = fixtures::latent_cohort(50, 3);
  std::ostringstream out;
  write_manifest(out, original);
  std::istringstream in(out.str());
  CHECK(parse_manifest(in, "rt") == original);

  std::vector<Item> items{{"q\"1", "has, comma", "P", "C", "https://example.org/a.jpg", std::nullopt},
                          {"q2", "plain", "P", "C", "dir/b.png", std::nullopt}};
  const Cohort awkward(items);
  std::ostringstream out2;
  write_manifest(out2, awkward);
  std::istringstream in2(out2.str());
  CHECK(parse_manifest(in2, "rt") == awkward);
}

TEST_CASE("image references resolve relative to the manifest") {
  const Cohort c({{"a", "", "", "", "img/a.png", std::nullopt}, {"b", "", "", "", "http://h/b.png", std::nullopt}},
                 "/data/set/manifest.csv");
  CHECK(c.resolve_image(c.at("a")) == "/data/set/img/a.png");
  CHECK(c.resolve_image(c.at("b")) == "http://h/b.png");
  CHECK(is_url("https://x"));
  CHECK_FALSE(is_url("file.png"));
}

TEST_CASE("the 94-row survey fixture loads with two missing Fin values") {
  const auto rows = load_survey(fixtures::data("survey94.csv"));
  CHECK(rows.size() == 94);
  std::size_t missing = 0;
  for (const auto& r : rows) missing += r.fin ? 0 : 1;
  CHECK(missing == 2);
  CHECK(rows.front().livability.has_value());
}

TEST_CASE("survey parsing rejects NaN with the data-row index") {
  std::istringstream in("county_id,tem,ter,fin,cinc,vinc\nC1,10,1,1,1,1\nC2,NaN,1,1,1,1\n");
  const std::string msg = error_of([&] { parse_survey(in, "s.csv"); });
  CHECK(msg.find("s.csv:3") != std::string::npos);
  CHECK(msg.find("row 2") != std::string::npos);
}

TEST_CASE("survey without livability column loads with absent dependent variable") {
  std::istringstream in("county_id,tem,ter,fin,cinc,vinc\nC1,10,1,,1,1\n");
  const auto rows = parse_survey(in, "s.csv");
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].livability.has_value());
  CHECK_FALSE(rows[0].fin.has_value());
  CHECK(rows[0].ter.value() == 1.0);
}

TEST_CASE("survey edge cases") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_survey(empty, "s.csv"), DataError);
  std::istringstream header_only("county_id,tem,ter,fin,cinc,vinc\n");
  CHECK_THROWS_AS(parse_survey(header_only, "s.csv"), DataError);
  std::istringstream no_tem("county_id,tem,ter,fin,cinc,vinc\nC1,,1,1,1,1\n");
  CHECK_THROWS_AS(parse_survey(no_tem, "s.csv"), DataError);
  std::istringstream text("county_id,tem,ter,fin,cinc,vinc\nC1,10,flat,1,1,1\n");
  CHECK_THROWS_AS(parse_survey(text, "s.csv"), DataError);
}

TEST_CASE("survey write/read round-trip is identity") {
  std::vector<SurveyRow> rows{{"C1", 12.5, 3.0, std::nullopt, 20.0, 1.5, 40.25},
                              {"C2", -1.0, std::nullopt, 1.7, std::nullopt, std::nullopt, std::nullopt}};
  std::ostringstream out;
  write_survey(out, rows);
  std::istringstream in(out.str());
  CHECK(parse_survey(in, "rt") == rows);
}
