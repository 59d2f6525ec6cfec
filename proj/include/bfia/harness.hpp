// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bfia/detect.hpp"
#include "bfia/estimate.hpp"
#include "bfia/precoder.hpp"
#include "bfia/types.hpp"

namespace bfia {

/// Where the per-user unitaries come from. Seeded-random draws are held
/// constant within a channel realization and redrawn across realizations;
/// explicit angles pin one tied-angle matrix for every user and realization.
struct UnitarySource {
  enum class Kind { SeededRandom, ExplicitAngles, ComplexRandom };
  Kind kind = Kind::SeededRandom;
  std::uint64_t seed = 0;
  std::vector<double> angles;  // ExplicitAngles only, d-1 radians

  std::string str() const;
};

UnitarySource parse_unitary_source(const std::string& spec);

struct SimConfig {
  Scenario scenario;
  int d = 0;  // 0 resolves to d_max
  std::string constellation = "qpsk";
  std::vector<DetectorKind> detectors = {DetectorKind::MdKnown, DetectorKind::MlFullCsir};
  std::vector<double> snr_db = {0.0, 10.0, 20.0, 30.0};
  int realizations = 500;
  int blocks_per_realization = 500;
  std::uint64_t seed = 1;
  UnitarySource unitary;
  double alpha_desired = 1.0;
  double alpha_interf = 1.0;
  bool allow_infeasible = false;
  bool all_users = false;
  int threads = 1;  // 1 = serial reference path, 0 = all hardware threads
  int em_restarts = 5;
  int em_max_iters = 200;
  bool auto_components = false;
  int min_est_samples = 100;
  std::size_t search_space_cap = kDefaultEnumCap;  // |X|^d, ML hypotheses, mixture means
  bool keep_realization_detail = false;            // fill BerRow::realization_ber
};

struct BerRow {
  double snr_db = 0.0;
  DetectorKind detector = DetectorKind::MdKnown;
  int users = 0;
  int extension = 0;
  int streams = 0;
  int realizations = 0;
  int blocks = 0;
  std::uint64_t bits_total = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  double std_error = 0.0;  // Monte Carlo standard error over realizations
  double wallclock_s = 0.0;
  std::uint64_t failures = 0;  // estimator/detector failures, never dropped silently
  std::vector<double> realization_ber;  // per-realization BERs when detail is kept
};

struct BerTable {
  std::vector<BerRow> rows;
};

/// Monte Carlo BER sweep. Each (SNR, realization) job draws its channel and
/// unitaries from counter-based substreams, estimates any blind statistics
/// from its own blocks, then scores every requested detector. Results are
/// bit-identical for a fixed seed regardless of the worker count.
BerTable run_ber(const SimConfig& cfg);

/// Plain-loop reference implementation; run_ber with threads == 1 uses it.
BerTable run_ber_serial(const SimConfig& cfg);

/// Fills in defaults (d = d_max), validates detector/scenario compatibility.
SimConfig resolve_config(const SimConfig& cfg);

/// CSV with header snr_db,detector,k,l,d,realizations,blocks,bits_total,
/// bit_errors,ber. Metadata lines, when given, are written first as
/// '# key=value' comments.
void write_results(const BerTable& t, const std::string& path,
                   const std::vector<std::string>& metadata = {});

/// Parses a write_results file back (comments skipped).
BerTable read_results(const std::string& path);

/// One 'key=value' line per config knob, in canonical order. Worker count is
/// runtime-only and excluded, so outputs stay byte-identical across it.
std::vector<std::string> config_metadata(const SimConfig& cfg);

/// Flat key=value config file; '#' starts a comment. When given, `seed_seen`
/// reports whether the file set the seed explicitly.
SimConfig load_config_file(const std::string& path, bool* seed_seen = nullptr);

/// Applies one config entry; returns false for unknown keys.
bool apply_config_entry(SimConfig& cfg, const std::string& key, const std::string& value);

}  // namespace bfia
