#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "bcropt/instance.hpp"
#include "bcropt/instance_gen.hpp"
#include "bcropt/instance_io.hpp"
#include "tests/support/fixtures.hpp"

using namespace bcropt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "bcropt_instance_test";
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("opening cost follows bed count and borough multiplier") {
  ShelterProfile s;
  s.id = 42;
  s.kind = ShelterKind::new_candidate;
  s.bed_capacity = 8;
  CostParams params;
  params.annual_bed_cost = 10000.0;
  CHECK(opening_cost(s, params, 1.0) == Catch::Approx(80000.0));     // Queens
  CHECK(opening_cost(s, params, 1.85) == Catch::Approx(148000.0));   // Manhattan
  CHECK(opening_cost(s, params, 0.789) == Catch::Approx(63120.0));   // Bronx
  s.kind = ShelterKind::status_quo;
  CHECK_THROWS_AS(opening_cost(s, params, 1.0), NotACandidate);
}

TEST_CASE("partial returns scale the opening cost") {
  CHECK(partial_return(80000.0, 4.0) == Catch::Approx(320000.0));
  CHECK(partial_return(12345.0, 0.0) == 0.0);
  CHECK(partial_return(100000.0, 5.67) == Catch::Approx(567000.0));
}

TEST_CASE("borough multipliers carry the published values") {
  const auto b = nyc_boroughs();
  REQUIRE(b.size() == 5);
  CHECK(b[0].cost_multiplier == 1.85);   // Manhattan
  CHECK(b[1].cost_multiplier == 1.38);   // Brooklyn
  CHECK(b[2].cost_multiplier == 1.0);    // Queens
  CHECK(b[3].cost_multiplier == 0.830);  // Staten Island
  CHECK(b[4].cost_multiplier == 0.789);  // Bronx
}

TEST_CASE("youth benefit formula") {
  const Instance toy = bcropt::testing::make_toy_instance();
  // defaults: medicaid 4763, labor 194732
  SECTION("zero delay, unit frequency") {
    // youth 1, beds: earliest 1, frequency 1
    CHECK(youth_benefit(toy, 1, 1, 0) == Catch::Approx(199495.0));
  }
  SECTION("delay discount") {
    // youth 0, beds: earliest 0, frequency 2: at t=1 -> (M+P)/(2*2)
    CHECK(youth_benefit(toy, 0, 1, 0) == Catch::Approx(199495.0 / 4.0));
  }
  SECTION("outside the start window") {
    CHECK_THROWS_AS(youth_benefit(toy, 1, 0, 0), OutOfWindow);
    CHECK_THROWS_AS(youth_benefit(toy, 1, 3, 0), OutOfWindow);
  }
  SECTION("unknown request") {
    CHECK_THROWS_AS(youth_benefit(toy, 1, 1, 1), MissingParameter);
  }
}

TEST_CASE("generation is deterministic per seed") {
  GeneratorConfig cfg;
  cfg.num_youth = 12;
  cfg.horizon = 12;
  cfg.num_services = 6;
  cfg.base_candidates = 4;
  const Instance a = generate_instance(cfg, 42);
  const Instance b = generate_instance(cfg, 42);
  const Instance c = generate_instance(cfg, 43);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_json(a).dump() != to_json(c).dump());
}

TEST_CASE("generated instances pass validation across seeds") {
  GeneratorConfig cfg;
  cfg.num_youth = 20;
  cfg.num_services = 13;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance inst = generate_instance(cfg, seed);  // validates internally
    CHECK(inst.youth.size() == 20);
    CHECK(static_cast<int>(inst.services.size()) == 13);
    // every youth's requested services exist and respect windows (re-check)
    CHECK_NOTHROW(inst.validate());
  }
}

TEST_CASE("archetype 4 bed draws average near twenty") {
  Rng rng(2024);
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i) sum += bcropt::detail::draw_archetype_beds(rng, 3);
  const double mean = sum / 1000.0;
  CHECK(mean > 18.0);
  CHECK(mean < 22.0);
}

TEST_CASE("candidate pool scales with youth count") {
  GeneratorConfig cfg;
  cfg.base_candidates = 10;
  cfg.num_youth = 500;
  CHECK(cfg.scaled_candidates() == 10);
  cfg.num_youth = 750;
  CHECK(cfg.scaled_candidates() == 15);
  cfg.num_youth = 1000;
  CHECK(cfg.scaled_candidates() == 20);
  cfg.num_youth = 100;
  CHECK(cfg.scaled_candidates() == 10);
}

TEST_CASE("save and load round-trip exactly") {
  GeneratorConfig cfg;
  cfg.num_youth = 8;
  cfg.horizon = 10;
  cfg.num_services = 5;
  const Instance inst = generate_instance(cfg, 7);
  const auto path = temp_dir() / "roundtrip.json";
  save_instance(inst, path);
  const Instance loaded = load_instance(path);
  CHECK(to_json(inst).dump() == to_json(loaded).dump());
  // byte-identical when saved again
  const auto path2 = temp_dir() / "roundtrip2.json";
  save_instance(loaded, path2);
  CHECK(file_bytes(path) == file_bytes(path2));
}

TEST_CASE("tampered delta fails on load") {
  const Instance inst = bcropt::testing::make_toy_instance();
  auto j = to_json(inst);
  j["delta"] = 0.0;
  const auto path = temp_dir() / "tampered.json";
  std::ofstream(path) << j.dump(2);
  CHECK_THROWS_AS(load_instance(path), ValidationError);
}

TEST_CASE("unsupported schema version is rejected") {
  const Instance inst = bcropt::testing::make_toy_instance();
  auto j = to_json(inst);
  j["schema_version"] = 9;
  const auto path = temp_dir() / "version.json";
  std::ofstream(path) << j.dump(2);
  CHECK_THROWS_AS(load_instance(path), SchemaVersionMismatch);
}

TEST_CASE("missing service reference names the youth and service") {
  Instance inst = bcropt::testing::make_toy_instance();
  inst.youth[1].requests[0].service = 17;
  try {
    inst.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("youth 1") != std::string::npos);
    CHECK(what.find("17") != std::string::npos);
  }
}

TEST_CASE("generator config validation") {
  GeneratorConfig cfg;
  SECTION("zero youth") {
    cfg.num_youth = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
  }
  SECTION("too many services") {
    cfg.num_services = 15;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
  }
  SECTION("request bounds") {
    cfg.min_requests = 5;
    cfg.max_requests = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
  }
  SECTION("unknown json key is named") {
    ordered_json j;
    j["num_youth"] = 5;
    j["not_a_real_key"] = 1;
    try {
      generator_config_from_json(j);
      FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
      CHECK(std::string(e.what()).find("not_a_real_key") != std::string::npos);
    }
  }
}

TEST_CASE("capacity materialization") {
  Instance toy = bcropt::testing::make_toy_instance();
  SECTION("status quo is delta-scaled") {
    // base 5 at delta 0.2 -> one free unit, no jitter
    CHECK(toy.capacity(0, 0, 0) == 1);
    CHECK(toy.capacity(0, 1, 3) == 1);
  }
  SECTION("delta override rescales") {
    CHECK(toy.capacity(0, 0, 0, 0.6) == 2);  // clamped by mu = 2
    CHECK(toy.capacity(0, 0, 0, 0.05) == 0);
  }
  SECTION("candidates contribute their base capacity") {
    CHECK(toy.capacity(1, 0, 2) == 2);
  }
  SECTION("referrals absorb everyone") {
    CHECK(toy.capacity(2, 0, 0) == static_cast<int>(toy.youth.size()));
  }
}
