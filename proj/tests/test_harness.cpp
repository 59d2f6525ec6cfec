// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bfia/errors.hpp"
#include "bfia/harness.hpp"

using namespace bfia;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.scenario.kind = ChannelType::IC;
  cfg.scenario.users = 2;
  cfg.scenario.extension = 3;
  cfg.d = 2;
  cfg.constellation = "qpsk";
  cfg.detectors = {DetectorKind::MdKnown, DetectorKind::MdEstimated,
                   DetectorKind::MlFullCsir, DetectorKind::MlBlindMarginal};
  cfg.snr_db = {0.0, 20.0};
  cfg.realizations = 6;
  cfg.blocks_per_realization = 120;
  cfg.seed = 7;
  cfg.em_restarts = 2;
  cfg.min_est_samples = 50;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool same_tallies(const BerTable& a, const BerTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (a.rows[i].bit_errors != b.rows[i].bit_errors ||
        a.rows[i].bits_total != b.rows[i].bits_total ||
        a.rows[i].failures != b.rows[i].failures)
      return false;
  return true;
}

}  // namespace

TEST_CASE("identical tallies across 1, 2 and 8 workers") {
  SimConfig cfg = small_config();
  cfg.threads = 1;
  const BerTable serial = run_ber(cfg);
  cfg.threads = 2;
  const BerTable two = run_ber(cfg);
  cfg.threads = 8;
  const BerTable eight = run_ber(cfg);
  CHECK(same_tallies(serial, two));
  CHECK(same_tallies(serial, eight));
  CHECK(same_tallies(serial, run_ber_serial(cfg)));

  // The CSV bodies must be byte-identical too.
  write_results(serial, "/tmp/bfia_t1.csv", config_metadata(resolve_config(cfg)));
  write_results(eight, "/tmp/bfia_t8.csv", config_metadata(resolve_config(cfg)));
  CHECK(slurp("/tmp/bfia_t1.csv") == slurp("/tmp/bfia_t8.csv"));
  std::remove("/tmp/bfia_t1.csv");
  std::remove("/tmp/bfia_t8.csv");
}

TEST_CASE("near-zero noise gives zero errors for genie detectors") {
  SimConfig cfg = small_config();
  cfg.detectors = {DetectorKind::MdKnown, DetectorKind::MlFullCsir};
  cfg.snr_db = {300.0};  // sigma2 = 1e-30
  cfg.realizations = 4;
  cfg.blocks_per_realization = 60;
  const BerTable t = run_ber(cfg);
  for (const BerRow& r : t.rows) {
    CHECK(r.bit_errors == 0);
    CHECK(r.bits_total > 0);
  }
}

TEST_CASE("genie detectors upper-bound their blind versions") {
  SimConfig cfg = small_config();
  cfg.snr_db = {10.0, 20.0};
  cfg.realizations = 12;
  cfg.blocks_per_realization = 150;
  const BerTable t = run_ber(cfg);
  auto row = [&](double snr, DetectorKind k) {
    for (const BerRow& r : t.rows)
      if (r.snr_db == snr && r.detector == k) return r;
    REQUIRE(false);
    return BerRow{};
  };
  for (double snr : cfg.snr_db) {
    const BerRow md_known = row(snr, DetectorKind::MdKnown);
    const BerRow md_est = row(snr, DetectorKind::MdEstimated);
    const BerRow ml_known = row(snr, DetectorKind::MlFullCsir);
    const BerRow ml_blind = row(snr, DetectorKind::MlBlindMarginal);
    CHECK(md_known.ber <= md_est.ber + 3.0 * (md_known.std_error + md_est.std_error) + 1e-9);
    CHECK(ml_known.ber <=
          ml_blind.ber + 3.0 * (ml_known.std_error + ml_blind.std_error) + 1e-9);
    CHECK(md_known.failures == 0);
    CHECK(ml_blind.failures == 0);
  }
}

TEST_CASE("results round trip through the CSV") {
  SimConfig cfg = small_config();
  cfg.detectors = {DetectorKind::MdKnown};
  cfg.realizations = 3;
  cfg.blocks_per_realization = 40;
  const BerTable t = run_ber(cfg);
  write_results(t, "/tmp/bfia_rt.csv");
  const BerTable back = read_results("/tmp/bfia_rt.csv");
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i].snr_db == t.rows[i].snr_db);
    CHECK(back.rows[i].detector == t.rows[i].detector);
    CHECK(back.rows[i].bits_total == t.rows[i].bits_total);
    CHECK(back.rows[i].bit_errors == t.rows[i].bit_errors);
    CHECK(back.rows[i].ber == t.rows[i].ber);
  }
  std::remove("/tmp/bfia_rt.csv");
}

TEST_CASE("empty table writes a header-only file with 10 columns") {
  write_results(BerTable{}, "/tmp/bfia_empty.csv");
  const std::string body = slurp("/tmp/bfia_empty.csv");
  CHECK(body == "snr_db,detector,k,l,d,realizations,blocks,bits_total,bit_errors,ber\n");
  std::remove("/tmp/bfia_empty.csv");

  SimConfig cfg = small_config();
  cfg.detectors = {DetectorKind::MdKnown};
  cfg.realizations = 2;
  cfg.blocks_per_realization = 30;
  write_results(run_ber(cfg), "/tmp/bfia_cols.csv");
  std::ifstream f("/tmp/bfia_cols.csv");
  std::string line;
  while (std::getline(f, line)) {
    const long commas = std::count(line.begin(), line.end(), ',');
    CHECK(commas == 9);
  }
  std::remove("/tmp/bfia_cols.csv");
}

TEST_CASE("config resolution catches misuse") {
  SimConfig cfg = small_config();
  cfg.d = 3;  // beyond d_max = 2
  CHECK_THROWS_AS(run_ber(cfg), param_error);
  cfg.d = 3;
  cfg.allow_infeasible = true;  // blind detectors cannot run on that layout
  CHECK_THROWS_AS(run_ber(cfg), param_error);
  cfg = small_config();
  cfg.snr_db.clear();
  CHECK_THROWS_AS(run_ber(cfg), param_error);
  cfg = small_config();
  cfg.detectors.clear();
  CHECK_THROWS_AS(run_ber(cfg), param_error);
  cfg = small_config();
  cfg.scenario.rx_antennas = 2;  // SIMO with blind detectors
  CHECK_THROWS_AS(run_ber(cfg), param_error);
  cfg = small_config();
  cfg.unitary.kind = UnitarySource::Kind::ComplexRandom;
  CHECK_THROWS_AS(run_ber(cfg), param_error);  // ml-blind needs real tied angles
  cfg = small_config();
  cfg.d = 0;
  const SimConfig resolved = resolve_config(cfg);
  CHECK(resolved.d == 2);
}

TEST_CASE("infeasible stream counts run when forced") {
  SimConfig cfg;
  cfg.scenario.kind = ChannelType::IC;
  cfg.scenario.users = 2;
  cfg.scenario.extension = 1;
  cfg.d = 1;
  cfg.constellation = "qpsk";
  cfg.detectors = {DetectorKind::MdKnown, DetectorKind::MlFullCsir};
  cfg.snr_db = {20.0};
  cfg.realizations = 10;
  cfg.blocks_per_realization = 100;
  cfg.seed = 9;
  CHECK_THROWS_AS(run_ber(cfg), param_error);
  cfg.allow_infeasible = true;
  const BerTable t = run_ber(cfg);
  REQUIRE(t.rows.size() == 2);
  // The MD detector faces in-line interference; the genie ML does not.
  CHECK(t.rows[0].ber > t.rows[1].ber);
}

TEST_CASE("four-stream blind path runs end to end") {
  // d = 4 uses the quaternion tied family; the blind detector scores three
  // mixed dimensions with one shared 256-component marginal.
  SimConfig cfg;
  cfg.scenario.kind = ChannelType::IC;
  cfg.scenario.users = 2;
  cfg.scenario.extension = 5;
  cfg.d = 4;
  cfg.constellation = "qpsk";
  cfg.detectors = {DetectorKind::MdKnown, DetectorKind::MlBlindMarginal};
  cfg.snr_db = {20.0};
  cfg.realizations = 2;
  cfg.blocks_per_realization = 300;
  cfg.seed = 31;
  cfg.em_restarts = 1;
  cfg.em_max_iters = 60;
  const BerTable t = run_ber(cfg);
  REQUIRE(t.rows.size() == 2);
  for (const BerRow& r : t.rows) {
    CHECK(r.failures == 0);
    CHECK(r.bits_total == 2ull * 300 * 4 * 2);
    CHECK(r.ber <= 0.5);
  }
}

TEST_CASE("odd stream counts run with genie detectors") {
  SimConfig cfg;
  cfg.scenario.kind = ChannelType::IC;
  cfg.scenario.users = 2;
  cfg.scenario.extension = 4;
  cfg.d = 3;
  cfg.constellation = "qpsk";
  cfg.detectors = {DetectorKind::MdKnown};
  cfg.snr_db = {20.0};
  cfg.realizations = 3;
  cfg.blocks_per_realization = 50;
  cfg.seed = 32;
  const BerTable t = run_ber(cfg);
  CHECK(t.rows[0].bits_total == 3ull * 50 * 3 * 2);
  // Blind detection is rejected for odd d > 1.
  cfg.detectors.push_back(DetectorKind::MlBlindMarginal);
  CHECK_THROWS_AS(run_ber(cfg), param_error);
}

TEST_CASE("config files parse and mirror the flags") {
  const char* path = "/tmp/bfia_cfg_test.cfg";
  {
    std::ofstream f(path);
    f << "# sample config\n"
      << "scenario = ic\n"
      << "k = 3\n"
      << "l = 4\n"
      << "d = 2\n"
      << "constellation = qpsk\n"
      << "detectors = md-known,ml-blind\n"
      << "snr_db_list = 0,10,20\n"
      << "realizations = 5\n"
      << "blocks_per_realization = 100\n"
      << "seed = 42\n"
      << "unitary = seeded-random:3\n"
      << "alpha_interf = 0.5\n";
  }
  bool seed_seen = false;
  const SimConfig cfg = load_config_file(path, &seed_seen);
  CHECK(seed_seen);
  CHECK(cfg.scenario.users == 3);
  CHECK(cfg.scenario.extension == 4);
  CHECK(cfg.d == 2);
  CHECK(cfg.detectors.size() == 2);
  CHECK(cfg.snr_db.size() == 3);
  CHECK(cfg.seed == 42);
  CHECK(cfg.unitary.kind == UnitarySource::Kind::SeededRandom);
  CHECK(cfg.unitary.seed == 3);
  CHECK(cfg.alpha_interf == 0.5);
  std::remove(path);

  CHECK_THROWS_AS(load_config_file("/tmp/definitely_missing.cfg"), param_error);
  SimConfig c2;
  CHECK_FALSE(apply_config_entry(c2, "bogus", "1"));
  CHECK_THROWS_AS(apply_config_entry(c2, "scenario", "xc"), param_error);

  // Metadata lines mirror the config keys and omit the worker count.
  const auto meta = config_metadata(resolve_config(cfg));
  bool found_seed = false;
  for (const auto& m : meta) {
    CHECK(m.find("threads") == std::string::npos);
    if (m == "seed=42") found_seed = true;
  }
  CHECK(found_seed);
}

TEST_CASE("unitary source parsing") {
  const UnitarySource a = parse_unitary_source("seeded-random:17");
  CHECK(a.kind == UnitarySource::Kind::SeededRandom);
  CHECK(a.seed == 17);
  const UnitarySource b = parse_unitary_source("angles:0.5;-1.25;3");
  CHECK(b.kind == UnitarySource::Kind::ExplicitAngles);
  REQUIRE(b.angles.size() == 3);
  CHECK(b.angles[1] == doctest::Approx(-1.25));
  CHECK(parse_unitary_source(b.str()).angles == b.angles);
  CHECK_THROWS_AS(parse_unitary_source("random"), param_error);
  CHECK_THROWS_AS(parse_unitary_source("seeded-random:x"), param_error);
}

TEST_CASE("explicit angles pin the unitaries across realizations") {
  SimConfig cfg = small_config();
  cfg.detectors = {DetectorKind::MdKnown};
  cfg.unitary.kind = UnitarySource::Kind::ExplicitAngles;
  cfg.unitary.angles = {0.7};
  cfg.realizations = 3;
  cfg.blocks_per_realization = 50;
  const BerTable t = run_ber(cfg);
  CHECK(t.rows.size() == cfg.snr_db.size());
  for (const BerRow& r : t.rows) CHECK(r.bits_total > 0);
}
