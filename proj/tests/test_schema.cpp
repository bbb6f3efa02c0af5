#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "promptee/errors.hpp"

using namespace promptee;
using nlohmann::json;

namespace {

json small_schema_json() {
  return json::parse(R"({
    "main_types": ["Justice"],
    "subtypes": [{"name": "Justice.Convict", "parent": "Justice",
                  "trigger_question_template": "The convict trigger is [MASK_SLOT] ."}],
    "roles": [{"name": "Defendant", "event_subtype": "Justice.Convict",
               "description_template": "The defendant is [MASK_SLOT] ."}]
  })");
}

}  // namespace

TEST_CASE("synthetic schema has the fixture shape") {
  const auto s = fixtures::synthetic_schema();
  CHECK(s.main_types().size() == 3);
  CHECK(s.subtypes().size() == 5);
  CHECK(s.roles().size() == 6);
  CHECK(s.subtypes_of("Justice").size() == 2);
  CHECK(s.roles_for("Life.Injure").empty());
}

TEST_CASE("ACE-style schema counts") {
  const auto s = fixtures::ace_schema();
  CHECK(s.main_types().size() == 8);
  CHECK(s.subtypes().size() == 33);
  CHECK(s.role_names().size() == 35);
  CHECK(s.roles_for("Movement.Transport").size() == 14);
}

TEST_CASE("roles_for lists roles in schema order") {
  const auto s = fixtures::ace_schema();
  const auto roles = s.roles_for("Justice.Convict");
  std::vector<std::string> names;
  for (const auto* r : roles) names.push_back(r->name);
  CHECK(std::find(names.begin(), names.end(), "Defendant") != names.end());
  CHECK(std::find(names.begin(), names.end(), "Adjudicator") != names.end());
  CHECK(s.role_allowed("Justice.Convict", "Defendant"));
  CHECK_FALSE(s.role_allowed("Justice.Convict", "Victim"));
}

TEST_CASE("main_type_of and labels") {
  const auto s = fixtures::ace_schema();
  CHECK(s.main_type_of("Justice.Convict") == "Justice");
  CHECK(s.subtype("Justice.Convict").label() == "Convict");
  CHECK(s.subtype("Business.Declare-Bankruptcy").label() == "Declare-Bankruptcy");
  CHECK_THROWS_AS(s.main_type_of("Justice.Nope"), ValidationError);
  CHECK_THROWS_AS(s.main_type("Sports"), ValidationError);
}

TEST_CASE("main types default their trigger question") {
  const auto s = Schema::from_json(small_schema_json());
  CHECK(count_occurrences(s.main_type("Justice").trigger_question_template, tokens::kMaskSlot) == 1);
  CHECK(s.main_type("Justice").trigger_question_template.find("Justice") != std::string::npos);
}

TEST_CASE("template with two mask slots is rejected") {
  auto j = small_schema_json();
  j["roles"][0]["description_template"] = "[MASK_SLOT] and [MASK_SLOT]";
  try {
    (void)Schema::from_json(j);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("template must contain exactly one mask slot") != std::string::npos);
  }
  j["roles"][0]["description_template"] = "no slot here";
  CHECK_THROWS_AS(Schema::from_json(j), ValidationError);
}

TEST_CASE("structural schema errors") {
  auto dup = small_schema_json();
  dup["subtypes"].push_back(dup["subtypes"][0]);
  CHECK_THROWS_WITH_AS(Schema::from_json(dup), doctest::Contains("duplicate subtype"), ValidationError);

  auto unknown = small_schema_json();
  unknown["roles"][0]["event_subtype"] = "Justice.Sentence";
  CHECK_THROWS_WITH_AS(Schema::from_json(unknown), doctest::Contains("unknown subtype"), ValidationError);

  auto orphan = small_schema_json();
  orphan["subtypes"][0]["parent"] = "Life";
  CHECK_THROWS_AS(Schema::from_json(orphan), ValidationError);

  CHECK_THROWS_AS(Schema::from_json(json::array()), ValidationError);
  CHECK_THROWS_AS(load_schema("/nonexistent/schema.json"), ValidationError);
}

TEST_CASE("schema JSON round-trip") {
  const auto s = fixtures::ace_schema();
  CHECK(Schema::from_json(s.to_json()) == s);
  const auto path = std::filesystem::temp_directory_path() / "promptee_schema_roundtrip.json";
  save_schema(s, path);
  CHECK(load_schema(path) == s);
  std::filesystem::remove(path);
}

TEST_CASE("custom phrases survive a round-trip") {
  auto j = small_schema_json();
  j["phrases"] = {{"bridge", "Given the text ,"}};
  const auto s = Schema::from_json(j);
  CHECK(s.phrases().bridge == "Given the text ,");
  CHECK(s.phrases().event_statement == PromptPhrases{}.event_statement);
  CHECK(Schema::from_json(s.to_json()) == s);
}
