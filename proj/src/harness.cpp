// SPDX-License-Identifier: Apache-2.0

#include "bfia/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bfia/channel.hpp"
#include "bfia/errors.hpp"
#include "bfia/rotations.hpp"

namespace bfia {

std::string UnitarySource::str() const {
  switch (kind) {
    case Kind::SeededRandom: return "seeded-random:" + std::to_string(seed);
    case Kind::ComplexRandom: return "complex-random:" + std::to_string(seed);
    case Kind::ExplicitAngles: {
      std::string s = "angles:";
      for (std::size_t i = 0; i < angles.size(); ++i) {
        if (i) s += ';';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", angles[i]);
        s += buf;
      }
      return s;
    }
  }
  return "?";
}

UnitarySource parse_unitary_source(const std::string& spec) {
  UnitarySource u;
  auto seed_tail = [&](const std::string& tail) {
    try {
      return static_cast<std::uint64_t>(std::stoull(tail));
    } catch (const std::exception&) {
      throw param_error("bad seed in unitary source '" + spec + "'");
    }
  };
  if (spec.rfind("seeded-random:", 0) == 0) {
    u.kind = UnitarySource::Kind::SeededRandom;
    u.seed = seed_tail(spec.substr(14));
    return u;
  }
  if (spec.rfind("complex-random:", 0) == 0) {
    u.kind = UnitarySource::Kind::ComplexRandom;
    u.seed = seed_tail(spec.substr(15));
    return u;
  }
  if (spec.rfind("angles:", 0) == 0) {
    u.kind = UnitarySource::Kind::ExplicitAngles;
    std::stringstream ss(spec.substr(7));
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      if (tok.empty()) continue;
      try {
        u.angles.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw param_error("bad angle '" + tok + "' in unitary source");
      }
    }
    if (u.angles.empty()) throw param_error("unitary source 'angles:' needs at least one angle");
    return u;
  }
  throw param_error("unknown unitary source '" + spec +
                    "' (expected seeded-random:<seed>|complex-random:<seed>|angles:<a;b;..>)");
}

namespace {

bool uses(const SimConfig& cfg, DetectorKind k) {
  return std::find(cfg.detectors.begin(), cfg.detectors.end(), k) != cfg.detectors.end();
}

std::vector<CMat> draw_unitaries(const SimConfig& cfg, int d, Rng& urng) {
  const int k = cfg.scenario.users;
  std::vector<CMat> us;
  us.reserve(k);
  for (int u = 0; u < k; ++u) {
    switch (cfg.unitary.kind) {
      case UnitarySource::Kind::SeededRandom: {
        if (d == 1) {
          us.push_back(CMat::Identity(1, 1));
        } else if (d % 2 == 0) {
          std::vector<double> angles(d - 1);
          for (double& a : angles) a = urng.uniform(-kPi, kPi);
          us.push_back(useful_unitary(d, angles).matrix.cast<cplx>());
        } else {
          // Odd d > 1 has no tied-angle form; fall back to a general
          // orthogonal draw (genie detectors only).
          RMat g(d, d);
          for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) g(r, c) = urng.gaussian();
          Eigen::HouseholderQR<RMat> qr(g);
          us.push_back(RMat(qr.householderQ()).cast<cplx>());
        }
        break;
      }
      case UnitarySource::Kind::ExplicitAngles: {
        if (d == 1)
          us.push_back(CMat::Identity(1, 1));
        else
          us.push_back(useful_unitary(d, cfg.unitary.angles).matrix.cast<cplx>());
        break;
      }
      case UnitarySource::Kind::ComplexRandom: {
        CMat g(d, d);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) g(r, c) = urng.cnormal(1.0);
        Eigen::HouseholderQR<CMat> qr(g);
        us.push_back(CMat(qr.householderQ()));
        break;
      }
    }
  }
  return us;
}

struct RunContext {
  Constellation c;
  std::vector<CVec> candidates;
  std::vector<std::vector<int>> labels;  // per candidate, per stream
  std::vector<Constellation> per_user;
  RMat alphas;
  int d = 0;
};

struct DetectorTally {
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  std::uint64_t failures = 0;
  double seconds = 0.0;
};

using JobTallies = std::vector<DetectorTally>;  // one per configured detector

std::uint64_t score_blocks(const std::vector<ReceivedBlock>& blocks, int receiver,
                           const RunContext& ctx, const auto& detector) {
  std::uint64_t errors = 0;
  for (const ReceivedBlock& blk : blocks) {
    const int got = detector.detect(blk.received[receiver]);
    const auto& truth = blk.sent[receiver];
    const auto& lab = ctx.labels[got];
    for (int t = 0; t < ctx.d; ++t) errors += static_cast<std::uint64_t>(bit_distance(lab[t], truth[t]));
  }
  return errors;
}

JobTallies run_one_job(const SimConfig& cfg, const RunContext& ctx, int snr_idx,
                       int realization) {
  const Scenario& s = cfg.scenario;
  const std::uint64_t job =
      static_cast<std::uint64_t>(snr_idx) * cfg.realizations + realization;
  const double sigma2 = std::pow(10.0, -cfg.snr_db[snr_idx] / 10.0);  // SNR = 1/sigma2

  Rng chan_rng(cfg.seed, job * 4 + 0);
  Rng tx_rng(cfg.seed, job * 4 + 1);
  Rng unit_rng(cfg.unitary.seed, job * 4 + 2);
  const std::uint64_t em_seed = substream_seed(cfg.seed, job * 4 + 3);

  const ChannelRealization ch = draw_channel(s, ctx.alphas, sigma2, chan_rng);
  const std::vector<CMat> us = draw_unitaries(cfg, ctx.d, unit_rng);
  const PrecoderSet p = build_precoders(s, ctx.d, us, cfg.allow_infeasible);

  std::vector<ReceivedBlock> blocks;
  blocks.reserve(cfg.blocks_per_realization);
  std::vector<std::vector<int>> labels(s.users, std::vector<int>(ctx.d));
  for (int b = 0; b < cfg.blocks_per_realization; ++b) {
    for (int u = 0; u < s.users; ++u)
      for (int t = 0; t < ctx.d; ++t)
        labels[u][t] = static_cast<int>(tx_rng.below(ctx.c.size()));
    blocks.push_back(transmit(ch, p, labels, ctx.c, tx_rng));
  }

  std::vector<int> receivers;
  if (cfg.all_users)
    for (int u = 0; u < s.users; ++u) receivers.push_back(u);
  else
    receivers.push_back(0);

  const std::uint64_t bits_per_rx = static_cast<std::uint64_t>(cfg.blocks_per_realization) *
                                    ctx.d * ctx.c.bits_per_symbol;
  JobTallies tallies(cfg.detectors.size());
  for (std::size_t di = 0; di < cfg.detectors.size(); ++di) {
    DetectorTally& tl = tallies[di];
    const auto t0 = std::chrono::steady_clock::now();
    for (int rx : receivers) {
      try {
        switch (cfg.detectors[di]) {
          case DetectorKind::MdKnown: {
            MdDetector det(effective_matrix(ch, p, rx, rx),
                           exact_interference_cov(ch, p, rx), ctx.candidates);
            tl.errors += score_blocks(blocks, rx, ctx, det);
            tl.bits += bits_per_rx;
            break;
          }
          case DetectorKind::MdEstimated: {
            const CovEstimate est = estimate_covariance(blocks, rx, s, p, sigma2);
            MdDetector det(effective_matrix(ch, p, rx, rx), est.cov, ctx.candidates);
            tl.errors += score_blocks(blocks, rx, ctx, det);
            tl.bits += bits_per_rx;
            break;
          }
          case DetectorKind::MlFullCsir: {
            MlFullDetector det(ch, p, ctx.per_user, rx, cfg.search_space_cap);
            tl.errors += score_blocks(blocks, rx, ctx, det);
            tl.bits += bits_per_rx;
            break;
          }
          case DetectorKind::MlBlindMarginal: {
            EmConfig em;
            em.restarts = cfg.em_restarts;
            em.max_iters = cfg.em_max_iters;
            em.seed = substream_seed(em_seed, static_cast<std::uint64_t>(rx));
            const GmmPdf interference = estimate_interference_pdf(
                blocks, rx, s, p, ctx.c, sigma2, em, cfg.min_est_samples,
                cfg.auto_components, cfg.search_space_cap);
            const GmmPdf noise{{cplx{0.0, 0.0}}, sigma2};
            const ReceiverDims dims = classify_dims(s, p, rx);
            MarginalProductDetector det(effective_matrix(ch, p, rx, rx),
                                        blind_dim_map(dims, noise, interference),
                                        ctx.candidates);
            tl.errors += score_blocks(blocks, rx, ctx, det);
            tl.bits += bits_per_rx;
            break;
          }
        }
      } catch (const estimation_error&) {
        tl.failures += 1;
      } catch (const numeric_error&) {
        tl.failures += 1;
      } catch (const search_space_error&) {
        tl.failures += 1;
      }
    }
    tl.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return tallies;
}

BerTable aggregate(const SimConfig& cfg, const std::vector<JobTallies>& jobs) {
  BerTable table;
  for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
    for (std::size_t di = 0; di < cfg.detectors.size(); ++di) {
      BerRow row;
      row.snr_db = cfg.snr_db[si];
      row.detector = cfg.detectors[di];
      row.users = cfg.scenario.users;
      row.extension = cfg.scenario.extension;
      row.streams = cfg.d;
      row.realizations = cfg.realizations;
      row.blocks = cfg.blocks_per_realization;
      std::vector<double> per_real;
      per_real.reserve(cfg.realizations);
      for (int r = 0; r < cfg.realizations; ++r) {
        const DetectorTally& tl = jobs[si * cfg.realizations + r][di];
        row.bits_total += tl.bits;
        row.bit_errors += tl.errors;
        row.failures += tl.failures;
        row.wallclock_s += tl.seconds;
        if (tl.bits > 0)
          per_real.push_back(static_cast<double>(tl.errors) / static_cast<double>(tl.bits));
      }
      row.ber = row.bits_total > 0
                    ? static_cast<double>(row.bit_errors) / static_cast<double>(row.bits_total)
                    : 0.0;
      if (per_real.size() > 1) {
        double mean = 0.0;
        for (double x : per_real) mean += x;
        mean /= per_real.size();
        double ss = 0.0;
        for (double x : per_real) ss += (x - mean) * (x - mean);
        row.std_error = std::sqrt(ss / (per_real.size() * (per_real.size() - 1.0)));
      }
      if (cfg.keep_realization_detail) row.realization_ber = per_real;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace

SimConfig resolve_config(const SimConfig& in) {
  SimConfig cfg = in;
  cfg.scenario.validate();
  if (cfg.realizations < 1) throw param_error("realizations must be >= 1");
  if (cfg.blocks_per_realization < 1) throw param_error("blocks_per_realization must be >= 1");
  if (cfg.snr_db.empty()) throw param_error("SNR list must not be empty");
  for (double snr : cfg.snr_db)
    if (!(snr >= -300.0 && snr <= 300.0))
      throw param_error("snr_db out of the supported [-300, 300] range");
  if (cfg.detectors.empty()) throw param_error("detector list must not be empty");
  const Constellation c = parse_constellation(cfg.constellation);  // validates the string
  (void)c;
  if (cfg.d == 0) cfg.d = max_spac(cfg.scenario).d_max;
  if (cfg.d < 1 || cfg.d > cfg.scenario.tx_dims())
    throw param_error("stream count d out of range");
  if (cfg.unitary.kind == UnitarySource::Kind::ExplicitAngles && cfg.d > 1) {
    if (cfg.d % 2 != 0)
      throw param_error("explicit tied-angle unitaries need even d or d=1");
    if (cfg.unitary.angles.size() != static_cast<std::size_t>(cfg.d) - 1)
      throw param_error("explicit unitary angles: need d-1 = " + std::to_string(cfg.d - 1) +
                        " values, got " + std::to_string(cfg.unitary.angles.size()));
  }
  if (!cfg.allow_infeasible) {
    const int dmax = max_spac(cfg.scenario).d_max;
    if (cfg.d > dmax)
      throw param_error("d=" + std::to_string(cfg.d) + " exceeds d_max=" +
                        std::to_string(dmax) + "; pass allow_infeasible to force");
  }
  const bool blind = uses(cfg, DetectorKind::MdEstimated) ||
                     uses(cfg, DetectorKind::MlBlindMarginal);
  if (blind) {
    if (!cfg.scenario.siso())
      throw param_error("blind statistics estimation (md-est, ml-blind) is implemented "
                        "for SISO links only");
    if (cfg.allow_infeasible)
      throw param_error("blind detectors need the feasible two-group layout; drop "
                        "allow_infeasible or the blind detectors");
  }
  if (uses(cfg, DetectorKind::MlBlindMarginal)) {
    if (cfg.unitary.kind == UnitarySource::Kind::ComplexRandom)
      throw param_error("ml-blind shares one marginal across dimensions, which needs "
                        "real tied-angle unitaries; complex-random disables it");
    if (cfg.d != 1 && cfg.d != 2 && cfg.d != 4)
      throw param_error("ml-blind relies on marginal sharing, validated for d in "
                        "{1, 2, 4}; got d=" + std::to_string(cfg.d));
  }
  if (cfg.threads < 0) throw param_error("threads must be >= 0");
  return cfg;
}

namespace {

RunContext make_context(const SimConfig& cfg) {
  RunContext ctx;
  ctx.c = parse_constellation(cfg.constellation);
  ctx.d = cfg.d;
  ctx.candidates = enumerate_vectors(ctx.c, cfg.d, cfg.search_space_cap);
  ctx.labels.reserve(ctx.candidates.size());
  for (std::size_t v = 0; v < ctx.candidates.size(); ++v)
    ctx.labels.push_back(vector_labels(ctx.c, cfg.d, v));
  ctx.per_user.assign(cfg.scenario.users, ctx.c);
  ctx.alphas = uniform_alphas(cfg.scenario.users, cfg.alpha_desired, cfg.alpha_interf);
  return ctx;
}

}  // namespace

BerTable run_ber_serial(const SimConfig& in) {
  const SimConfig cfg = resolve_config(in);
  const RunContext ctx = make_context(cfg);
  const std::size_t total = cfg.snr_db.size() * static_cast<std::size_t>(cfg.realizations);
  std::vector<JobTallies> jobs(total);
  for (std::size_t j = 0; j < total; ++j)
    jobs[j] = run_one_job(cfg, ctx, static_cast<int>(j / cfg.realizations),
                          static_cast<int>(j % cfg.realizations));
  return aggregate(cfg, jobs);
}

BerTable run_ber(const SimConfig& in) {
  const SimConfig cfg = resolve_config(in);
  if (cfg.threads == 1) return run_ber_serial(cfg);

  const RunContext ctx = make_context(cfg);
  const std::size_t total = cfg.snr_db.size() * static_cast<std::size_t>(cfg.realizations);
  std::vector<JobTallies> jobs(total);
#ifdef _OPENMP
  const int threads = cfg.threads == 0 ? omp_get_max_threads() : cfg.threads;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long j = 0; j < static_cast<long long>(total); ++j)
    jobs[j] = run_one_job(cfg, ctx, static_cast<int>(j / cfg.realizations),
                          static_cast<int>(j % cfg.realizations));
#else
  for (std::size_t j = 0; j < total; ++j)
    jobs[j] = run_one_job(cfg, ctx, static_cast<int>(j / cfg.realizations),
                          static_cast<int>(j % cfg.realizations));
#endif
  return aggregate(cfg, jobs);
}

void write_results(const BerTable& t, const std::string& path,
                   const std::vector<std::string>& metadata) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw numeric_error("cannot open output file: " + path);
  for (const auto& m : metadata) f << "# " << m << "\n";
  f << "snr_db,detector,k,l,d,realizations,blocks,bits_total,bit_errors,ber\n";
  char num[64];
  for (const BerRow& r : t.rows) {
    std::snprintf(num, sizeof num, "%.10g", r.snr_db);
    f << num << ',' << detector_name(r.detector) << ',' << r.users << ',' << r.extension
      << ',' << r.streams << ',' << r.realizations << ',' << r.blocks << ',' << r.bits_total
      << ',' << r.bit_errors << ',';
    std::snprintf(num, sizeof num, "%.17g", r.ber);
    f << num << "\n";
  }
  if (!f) throw numeric_error("write failed: " + path);
}

BerTable read_results(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw param_error("cannot open results file: " + path);
  BerTable t;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "snr_db,detector,k,l,d,realizations,blocks,bits_total,bit_errors,ber")
        throw param_error("unexpected results header: " + line);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (cols.size() != 10) throw param_error("results row has " + std::to_string(cols.size()) +
                                             " columns, expected 10");
    BerRow r;
    r.snr_db = std::stod(cols[0]);
    r.detector = parse_detector(cols[1]);
    r.users = std::stoi(cols[2]);
    r.extension = std::stoi(cols[3]);
    r.streams = std::stoi(cols[4]);
    r.realizations = std::stoi(cols[5]);
    r.blocks = std::stoi(cols[6]);
    r.bits_total = std::stoull(cols[7]);
    r.bit_errors = std::stoull(cols[8]);
    r.ber = std::stod(cols[9]);
    t.rows.push_back(r);
  }
  if (!header_seen) throw param_error("results file has no header: " + path);
  return t;
}

std::vector<std::string> config_metadata(const SimConfig& cfg) {
  std::vector<std::string> m;
  auto add = [&](const std::string& k, const std::string& v) { m.push_back(k + "=" + v); };
  add("scenario", cfg.scenario.kind == ChannelType::BC ? "bc" : "ic");
  add("k", std::to_string(cfg.scenario.users));
  add("m", std::to_string(cfg.scenario.tx_antennas));
  add("n", std::to_string(cfg.scenario.rx_antennas));
  add("l", std::to_string(cfg.scenario.extension));
  add("d", std::to_string(cfg.d));
  add("constellation", cfg.constellation);
  {
    std::string s;
    for (std::size_t i = 0; i < cfg.detectors.size(); ++i) {
      if (i) s += ',';
      s += detector_name(cfg.detectors[i]);
    }
    add("detectors", s);
  }
  {
    std::string s;
    char num[64];
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
      if (i) s += ',';
      std::snprintf(num, sizeof num, "%.10g", cfg.snr_db[i]);
      s += num;
    }
    add("snr_db_list", s);
  }
  add("realizations", std::to_string(cfg.realizations));
  add("blocks_per_realization", std::to_string(cfg.blocks_per_realization));
  add("seed", std::to_string(cfg.seed));
  add("unitary", cfg.unitary.str());
  char num[64];
  std::snprintf(num, sizeof num, "%.10g", cfg.alpha_desired);
  add("alpha_desired", num);
  std::snprintf(num, sizeof num, "%.10g", cfg.alpha_interf);
  add("alpha_interf", num);
  add("allow_infeasible", cfg.allow_infeasible ? "1" : "0");
  add("all_users", cfg.all_users ? "1" : "0");
  add("em_restarts", std::to_string(cfg.em_restarts));
  add("em_max_iters", std::to_string(cfg.em_max_iters));
  add("components", cfg.auto_components ? "auto" : "alphabet");
  add("min_est_samples", std::to_string(cfg.min_est_samples));
  add("search_space_cap", std::to_string(cfg.search_space_cap));
  return m;
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw param_error("bad boolean '" + v + "' for key " + key);
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw param_error("bad number '" + tok + "' for key " + key);
    }
  }
  if (out.empty()) throw param_error("empty list for key " + key);
  return out;
}

long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw param_error("bad integer '" + v + "' for key " + key);
  }
}

}  // namespace

bool apply_config_entry(SimConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    if (value == "bc")
      cfg.scenario.kind = ChannelType::BC;
    else if (value == "ic")
      cfg.scenario.kind = ChannelType::IC;
    else
      throw param_error("scenario must be bc or ic, got '" + value + "'");
  } else if (key == "k") {
    cfg.scenario.users = static_cast<int>(parse_int(value, key));
  } else if (key == "m") {
    cfg.scenario.tx_antennas = static_cast<int>(parse_int(value, key));
  } else if (key == "n") {
    cfg.scenario.rx_antennas = static_cast<int>(parse_int(value, key));
  } else if (key == "l") {
    cfg.scenario.extension = static_cast<int>(parse_int(value, key));
  } else if (key == "d") {
    cfg.d = static_cast<int>(parse_int(value, key));
  } else if (key == "constellation") {
    cfg.constellation = value;
  } else if (key == "detectors") {
    cfg.detectors = parse_detector_list(value);
  } else if (key == "snr_db_list") {
    cfg.snr_db = parse_double_list(value, key);
  } else if (key == "realizations") {
    cfg.realizations = static_cast<int>(parse_int(value, key));
  } else if (key == "blocks_per_realization") {
    cfg.blocks_per_realization = static_cast<int>(parse_int(value, key));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
  } else if (key == "unitary") {
    cfg.unitary = parse_unitary_source(value);
  } else if (key == "alpha_desired") {
    cfg.alpha_desired = std::stod(value);
  } else if (key == "alpha_interf") {
    cfg.alpha_interf = std::stod(value);
  } else if (key == "allow_infeasible") {
    cfg.allow_infeasible = parse_bool(value, key);
  } else if (key == "all_users") {
    cfg.all_users = parse_bool(value, key);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_int(value, key));
  } else if (key == "em_restarts") {
    cfg.em_restarts = static_cast<int>(parse_int(value, key));
  } else if (key == "em_max_iters") {
    cfg.em_max_iters = static_cast<int>(parse_int(value, key));
  } else if (key == "components") {
    if (value == "auto")
      cfg.auto_components = true;
    else if (value == "alphabet")
      cfg.auto_components = false;
    else
      throw param_error("components must be auto or alphabet");
  } else if (key == "min_est_samples") {
    cfg.min_est_samples = static_cast<int>(parse_int(value, key));
  } else if (key == "search_space_cap") {
    const long long v = parse_int(value, key);
    if (v < 2) throw param_error("search_space_cap must be >= 2");
    cfg.search_space_cap = static_cast<std::size_t>(v);
  } else {
    return false;
  }
  return true;
}

SimConfig load_config_file(const std::string& path, bool* seed_seen) {
  std::ifstream f(path);
  if (!f) throw param_error("cannot open config file: " + path);
  SimConfig cfg;
  if (seed_seen) *seed_seen = false;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    };
    strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw param_error("config line " + std::to_string(lineno) + " is not key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    strip(key);
    strip(value);
    if (!apply_config_entry(cfg, key, value))
      throw param_error("unknown config key '" + key + "' at line " + std::to_string(lineno));
    if (seed_seen && key == "seed") *seed_seen = true;
  }
  return cfg;
}

}  // namespace bfia
