// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: spac, build, check, theorem3, estimate-demo,
// simulate. Exit codes: 0 success, 1 parameter error, 2 runtime/numeric
// failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfia/channel.hpp"
#include "bfia/detect.hpp"
#include "bfia/errors.hpp"
#include "bfia/estimate.hpp"
#include "bfia/harness.hpp"
#include "bfia/precoder.hpp"
#include "bfia/rng.hpp"
#include "bfia/rotations.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "bfia 1.0.0";

struct ScenarioFlags {
  std::string kind = "ic";
  int k = 2;
  int m = 1;
  int n = 1;
  int l = 3;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--scenario", f.kind, "channel model: bc|ic")
      ->check(CLI::IsMember({"bc", "ic"}));
  cmd->add_option("--k", f.k, "number of users K");
  cmd->add_option("--m", f.m, "transmit antennas M");
  cmd->add_option("--n", f.n, "receive antennas N");
  cmd->add_option("--l", f.l, "symbol extension factor L");
}

bfia::Scenario to_scenario(const ScenarioFlags& f) {
  bfia::Scenario s;
  s.kind = f.kind == "bc" ? bfia::ChannelType::BC : bfia::ChannelType::IC;
  s.users = f.k;
  s.tx_antennas = f.m;
  s.rx_antennas = f.n;
  s.extension = f.l;
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_means(const std::vector<bfia::cplx>& means, std::size_t limit = 32) {
  std::vector<bfia::cplx> m = means;
  std::sort(m.begin(), m.end(), [](const bfia::cplx& a, const bfia::cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t i = 0; i < m.size() && i < limit; ++i)
    std::printf("  (%s, %s)\n", fmt(m[i].real()).c_str(), fmt(m[i].imag()).c_str());
  if (m.size() > limit) std::printf("  ... %zu more\n", m.size() - limit);
}

int run_spac(const ScenarioFlags& f, bool as_json) {
  const bfia::SpacResult r = bfia::max_spac(to_scenario(f));
  if (as_json) {
    json j{{"d_max", r.d_max},
           {"spac", r.spac.str()},
           {"spac_value", r.spac.value()},
           {"formula", r.formula}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("d_max=%d spac=%s formula=\"%s\"\n", r.d_max, r.spac.str().c_str(),
                r.formula.c_str());
  }
  return 0;
}

int run_build(const ScenarioFlags& f, int d, const std::string& unitary_spec, bool as_json) {
  const bfia::Scenario s = to_scenario(f);
  if (d == 0) d = bfia::max_spac(s).d_max;
  const bfia::UnitarySource src = bfia::parse_unitary_source(unitary_spec);
  bfia::Rng rng(src.seed, 0);
  std::vector<bfia::CMat> us;
  for (int u = 0; u < s.users; ++u) {
    if (d == 1) {
      us.push_back(bfia::CMat::Identity(1, 1));
    } else if (src.kind == bfia::UnitarySource::Kind::ExplicitAngles) {
      us.push_back(bfia::useful_unitary(d, src.angles).matrix.cast<bfia::cplx>());
    } else {
      std::vector<double> angles(d - 1);
      for (double& a : angles) a = rng.uniform(-bfia::kPi, bfia::kPi);
      us.push_back(bfia::useful_unitary(d, angles).matrix.cast<bfia::cplx>());
    }
  }
  const bfia::PrecoderSet p = bfia::build_precoders(s, d, us);

  std::vector<std::vector<int>> cells(s.users);
  for (int u = 0; u < s.users; ++u) {
    cells[u].push_back(p.group1[u]);
    for (int g : p.group2) cells[u].push_back(g);
  }
  if (as_json) {
    json j{{"scenario", s.str()}, {"d", d},
           {"group1", p.group1},  {"group2", p.group2},
           {"cells", cells},      {"unitary", src.str()}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("layout %s d=%d unitary=%s\n", s.str().c_str(), d, src.str().c_str());
    for (int u = 0; u < s.users; ++u) {
      std::printf("user %d cells:", u);
      for (int c : cells[u]) std::printf(" %d", c);
      std::printf("\n");
    }
    std::printf("group2 shared:");
    for (int g : p.group2) std::printf(" %d", g);
    std::printf("%s\n", p.group2.empty() ? " (none)" : "");
  }
  return 0;
}

int run_check(const ScenarioFlags& f, int d, std::uint64_t seed, int draws, double snr_db,
              double tol, bool allow_infeasible, bool as_json) {
  const bfia::Scenario s = to_scenario(f);
  if (d == 0) d = bfia::max_spac(s).d_max;
  const double sigma2 = std::pow(10.0, -snr_db / 10.0);
  const bfia::RMat alphas = bfia::uniform_alphas(s.users, 1.0, 1.0);
  int passed = 0;
  bfia::AlignmentReport last;
  for (int t = 0; t < draws; ++t) {
    bfia::Rng chan_rng(seed, 2 * static_cast<std::uint64_t>(t));
    bfia::Rng unit_rng(seed, 2 * static_cast<std::uint64_t>(t) + 1);
    const bfia::ChannelRealization ch = bfia::draw_channel(s, alphas, sigma2, chan_rng);
    std::vector<bfia::CMat> us;
    for (int u = 0; u < s.users; ++u) {
      if (d == 1) {
        us.push_back(bfia::CMat::Identity(1, 1));
      } else if (d % 2 == 0) {
        std::vector<double> angles(d - 1);
        for (double& a : angles) a = unit_rng.uniform(-bfia::kPi, bfia::kPi);
        us.push_back(bfia::useful_unitary(d, angles).matrix.cast<bfia::cplx>());
      } else {
        bfia::RMat g(d, d);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) g(r, c) = unit_rng.gaussian();
        us.push_back(bfia::RMat(Eigen::HouseholderQR<bfia::RMat>(g).householderQ())
                         .cast<bfia::cplx>());
      }
    }
    const bfia::PrecoderSet p = bfia::build_precoders(s, d, us, allow_infeasible);
    last = bfia::check_alignment(ch, p, tol);
    if (last.pass) ++passed;
  }
  if (as_json) {
    json rx = json::array();
    for (const auto& r : last.per_receiver)
      rx.push_back({{"receiver", r.receiver},
                    {"rank_desired", r.rank_desired},
                    {"rank_interference", r.rank_interference},
                    {"rank_joint", r.rank_joint},
                    {"intersection_dim", r.intersection_dim}});
    json j{{"scenario", to_scenario(f).str()}, {"d", d},     {"draws", draws},
           {"passed", passed},                 {"tol", tol}, {"last_report", rx},
           {"pass", passed == draws}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("%s", last.str().c_str());
    std::printf("draws=%d passed=%d\n", draws, passed);
  }
  return 0;
}

int run_theorem3(int m, const std::string& alphabet, std::uint64_t seed, int draws,
                 double tol, bool untied, bool as_json) {
  const bfia::Constellation c = bfia::parse_constellation(alphabet);
  bfia::Rng rng(seed, 0);
  if (!untied) {
    double worst = 0.0;
    bool all_pass = true;
    for (int t = 0; t < draws; ++t) {
      std::vector<double> angles(m - 1);
      for (double& a : angles) a = rng.uniform(-bfia::kPi, bfia::kPi);
      const auto rep = bfia::verify_theorem3(bfia::useful_unitary(m, angles), c, tol);
      worst = std::max(worst, rep.max_mismatch);
      all_pass = all_pass && rep.pass;
    }
    if (as_json) {
      json j{{"mode", "tied"}, {"m", m},     {"alphabet", c.name()},
             {"draws", draws}, {"tol", tol}, {"max_mismatch", worst},
             {"pass", all_pass}};
      std::printf("%s\n", j.dump().c_str());
    } else {
      std::printf("%s m=%d alphabet=%s draws=%d max_mismatch=%s\n",
                  all_pass ? "PASS" : "FAIL", m, c.name().c_str(), draws,
                  fmt(worst).c_str());
    }
    return 0;
  }
  // Untied mode: hunt for a general-orthogonal counterexample.
  for (int t = 0; t < draws; ++t) {
    bfia::RMat u = bfia::RMat::Identity(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        u = u * bfia::givens(m, i, j, rng.uniform(-bfia::kPi, bfia::kPi));
    const auto rep = bfia::verify_row_multisets(u, c, tol);
    if (rep.max_mismatch > 1e-6) {
      if (as_json) {
        json j{{"mode", "untied"},          {"m", m},
               {"alphabet", c.name()},      {"found_after", t + 1},
               {"max_mismatch", rep.max_mismatch}, {"counterexample", true}};
        std::printf("%s\n", j.dump().c_str());
      } else {
        std::printf("counterexample found after %d draws: max_mismatch=%s "
                    "(untied angles break the shared marginal)\n",
                    t + 1, fmt(rep.max_mismatch).c_str());
      }
      return 0;
    }
  }
  if (as_json)
    std::printf("%s\n", json{{"mode", "untied"}, {"counterexample", false}}.dump().c_str());
  else
    std::printf("no counterexample found in %d draws\n", draws);
  return 0;
}

int run_estimate_demo(const ScenarioFlags& f, int d, const std::string& alphabet,
                      double snr_db, int blocks, std::uint64_t seed, bool as_json) {
  bfia::Scenario s = to_scenario(f);
  if (d == 0) d = bfia::max_spac(s).d_max;
  const bfia::Constellation c = bfia::parse_constellation(alphabet);
  const double sigma2 = std::pow(10.0, -snr_db / 10.0);

  bfia::Rng chan_rng(seed, 0);
  bfia::Rng unit_rng(seed, 1);
  bfia::Rng tx_rng(seed, 2);
  const bfia::ChannelRealization ch =
      bfia::draw_channel(s, bfia::uniform_alphas(s.users, 1.0, 1.0), sigma2, chan_rng);
  std::vector<bfia::CMat> us;
  for (int u = 0; u < s.users; ++u) {
    if (d == 1) {
      us.push_back(bfia::CMat::Identity(1, 1));
    } else {
      std::vector<double> angles(d - 1);
      for (double& a : angles) a = unit_rng.uniform(-bfia::kPi, bfia::kPi);
      us.push_back(bfia::useful_unitary(d, angles).matrix.cast<bfia::cplx>());
    }
  }
  const bfia::PrecoderSet p = bfia::build_precoders(s, d, us);

  std::vector<bfia::ReceivedBlock> recv;
  std::vector<std::vector<int>> labels(s.users, std::vector<int>(d));
  for (int b = 0; b < blocks; ++b) {
    for (int u = 0; u < s.users; ++u)
      for (int t = 0; t < d; ++t) labels[u][t] = static_cast<int>(tx_rng.below(c.size()));
    recv.push_back(bfia::transmit(ch, p, labels, c, tx_rng));
  }

  const bfia::GmmPdf truth = bfia::exact_interference_pdf(ch, p, 0, c);
  bfia::EmConfig em;
  em.seed = bfia::substream_seed(seed, 3);
  const bfia::GmmPdf fitted =
      bfia::estimate_interference_pdf(recv, 0, s, p, c, sigma2, em);
  const double hd = bfia::mean_set_hausdorff(truth.means, fitted.means);

  const bfia::CMat exact_cov = bfia::exact_interference_cov(ch, p, 0);
  const bfia::CovEstimate est = bfia::estimate_covariance(recv, 0, s, p, sigma2);
  const double cov_err = (est.cov - exact_cov).norm() / exact_cov.norm();

  if (as_json) {
    json j{{"scenario", s.str()},
           {"d", d},
           {"snr_db", snr_db},
           {"blocks", blocks},
           {"true_components", truth.means.size()},
           {"fitted_components", fitted.means.size()},
           {"mean_set_hausdorff", hd},
           {"cov_frobenius_rel_error", cov_err}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("scenario %s d=%d snr=%sdB blocks=%d seed=%llu\n", s.str().c_str(), d,
                fmt(snr_db).c_str(), blocks, static_cast<unsigned long long>(seed));
    std::printf("true interference mean set (%zu components):\n", truth.means.size());
    print_means(truth.means);
    std::printf("fitted interference mean set (%zu components):\n", fitted.means.size());
    print_means(fitted.means);
    std::printf("mean-set Hausdorff distance: %s\n", fmt(hd).c_str());
    std::printf("covariance Frobenius error: %s%% (estimated vs exact)\n",
                fmt(100.0 * cov_err).c_str());
  }
  return 0;
}

void emit_plot_script(const std::string& script_path, const std::string& csv_path) {
  std::ofstream f(script_path, std::ios::binary);
  if (!f) throw bfia::numeric_error("cannot write plot script: " + script_path);
  f << "#!/usr/bin/env python3\n"
       "\"\"\"Plot BER-vs-SNR curves from a results CSV.\"\"\"\n"
       "import csv\n"
       "from collections import defaultdict\n"
       "import matplotlib.pyplot as plt\n"
       "\n"
       "PATH = \"" << csv_path << "\"\n"
       "curves = defaultdict(list)\n"
       "with open(PATH) as fh:\n"
       "    rows = [r for r in fh if not r.startswith('#')]\n"
       "for row in csv.DictReader(rows):\n"
       "    curves[row['detector']].append((float(row['snr_db']), float(row['ber'])))\n"
       "for det, pts in sorted(curves.items()):\n"
       "    pts.sort()\n"
       "    plt.semilogy([p[0] for p in pts], [max(p[1], 1e-12) for p in pts],\n"
       "                 marker='o', label=det)\n"
       "plt.xlabel('SNR [dB]')\n"
       "plt.ylabel('uncoded BER')\n"
       "plt.grid(True, which='both', alpha=0.3)\n"
       "plt.legend()\n"
       "plt.tight_layout()\n"
       "plt.savefig(PATH.rsplit('.', 1)[0] + '.png', dpi=150)\n"
       "print('wrote', PATH.rsplit('.', 1)[0] + '.png')\n";
}

struct SimulateFlags {
  std::string config;
  std::string out = "results.csv";
  std::string plot_script;
  ScenarioFlags sf;
  std::optional<int> d;
  std::optional<std::string> constellation;
  std::optional<std::string> detectors;
  std::optional<std::string> snr_list;
  std::optional<int> realizations;
  std::optional<int> blocks;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> unitary;
  std::optional<double> alpha_desired;
  std::optional<double> alpha_interf;
  bool allow_infeasible = false;
  bool all_users = false;
  std::optional<int> threads;
  std::optional<int> em_restarts;
  std::optional<int> em_max_iters;
  std::optional<std::string> components;
  std::optional<int> min_est_samples;
  std::optional<long long> search_space_cap;
};

int run_simulate(const SimulateFlags& fl, const CLI::App* cmd, bool as_json) {
  bfia::SimConfig cfg;
  bool seed_set = false;
  if (!fl.config.empty()) cfg = bfia::load_config_file(fl.config, &seed_set);
  auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (passed("--scenario")) bfia::apply_config_entry(cfg, "scenario", fl.sf.kind);
  if (passed("--k")) cfg.scenario.users = fl.sf.k;
  if (passed("--m")) cfg.scenario.tx_antennas = fl.sf.m;
  if (passed("--n")) cfg.scenario.rx_antennas = fl.sf.n;
  if (passed("--l")) cfg.scenario.extension = fl.sf.l;
  if (fl.d) cfg.d = *fl.d;
  if (fl.constellation) cfg.constellation = *fl.constellation;
  if (fl.detectors) cfg.detectors = bfia::parse_detector_list(*fl.detectors);
  if (fl.snr_list) {
    cfg.snr_db.clear();
    std::stringstream ss(*fl.snr_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) cfg.snr_db.push_back(std::stod(tok));
  }
  if (fl.realizations) cfg.realizations = *fl.realizations;
  if (fl.blocks) cfg.blocks_per_realization = *fl.blocks;
  if (fl.seed) {
    cfg.seed = *fl.seed;
    seed_set = true;
  }
  if (fl.unitary) cfg.unitary = bfia::parse_unitary_source(*fl.unitary);
  if (fl.alpha_desired) cfg.alpha_desired = *fl.alpha_desired;
  if (fl.alpha_interf) cfg.alpha_interf = *fl.alpha_interf;
  if (passed("--allow-infeasible")) cfg.allow_infeasible = fl.allow_infeasible;
  if (passed("--all-users")) cfg.all_users = fl.all_users;
  if (fl.threads) cfg.threads = *fl.threads;
  if (fl.em_restarts) cfg.em_restarts = *fl.em_restarts;
  if (fl.em_max_iters) cfg.em_max_iters = *fl.em_max_iters;
  if (fl.components) bfia::apply_config_entry(cfg, "components", *fl.components);
  if (fl.min_est_samples) cfg.min_est_samples = *fl.min_est_samples;
  if (fl.search_space_cap)
    bfia::apply_config_entry(cfg, "search_space_cap", std::to_string(*fl.search_space_cap));

  if (!seed_set)
    throw bfia::param_error("simulate needs an explicit seed (--seed or seed= in the "
                            "config); wall-clock seeding is not supported");

  const bfia::SimConfig resolved = bfia::resolve_config(cfg);
  const bool blind_ml =
      std::find(resolved.detectors.begin(), resolved.detectors.end(),
                bfia::DetectorKind::MlBlindMarginal) != resolved.detectors.end();
  if (blind_ml && resolved.d > 2)
    std::fprintf(stderr, "note: ml-blind scores d-1 = %d mixed dimensions with one "
                         "shared marginal; the product is an independence "
                         "approximation for d > 2\n", resolved.d - 1);
  const bfia::BerTable table = bfia::run_ber(cfg);
  bfia::write_results(table, fl.out, bfia::config_metadata(resolved));
  if (!fl.plot_script.empty()) emit_plot_script(fl.plot_script, fl.out);

  for (const bfia::BerRow& r : table.rows) {
    if (as_json) {
      json j{{"snr_db", r.snr_db},
             {"detector", bfia::detector_name(r.detector)},
             {"ber", r.ber},
             {"std_error", r.std_error},
             {"bits_total", r.bits_total},
             {"bit_errors", r.bit_errors},
             {"failures", r.failures},
             {"wallclock_s", r.wallclock_s}};
      std::printf("%s\n", j.dump().c_str());
    } else {
      std::printf("snr=%s detector=%s ber=%s stderr=%s bits=%llu errors=%llu\n",
                  fmt(r.snr_db).c_str(), bfia::detector_name(r.detector).c_str(),
                  fmt(r.ber).c_str(), fmt(r.std_error).c_str(),
                  static_cast<unsigned long long>(r.bits_total),
                  static_cast<unsigned long long>(r.bit_errors));
    }
    if (r.failures > 0)
      std::fprintf(stderr, "warning: %llu estimator/detector failures for %s at %s dB\n",
                   static_cast<unsigned long long>(r.failures),
                   bfia::detector_name(r.detector).c_str(), fmt(r.snr_db).c_str());
  }
  if (!as_json) std::printf("wrote %s\n", fl.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blind fractional interference alignment link-level simulator"};
  app.set_version_flag("--version", kVersion);
  bool as_json = false;
  app.add_flag("--json", as_json, "line-delimited JSON reports");
  app.require_subcommand(1);

  int rc = 0;

  // spac
  ScenarioFlags spac_f;
  auto* spac_cmd = app.add_subcommand("spac", "maximum stream count and SpAC for a scenario");
  add_scenario_flags(spac_cmd, spac_f);
  spac_cmd->callback([&] { rc = run_spac(spac_f, as_json); });

  // build
  ScenarioFlags build_f;
  int build_d = 0;
  std::string build_unitary = "seeded-random:0";
  auto* build_cmd = app.add_subcommand("build", "construct the two-group selection precoders");
  add_scenario_flags(build_cmd, build_f);
  build_cmd->add_option("--d", build_d, "streams per user (0 = d_max)");
  build_cmd->add_option("--unitary", build_unitary, "seeded-random:<seed>|angles:<a;b;..>");
  build_cmd->callback([&] { rc = run_build(build_f, build_d, build_unitary, as_json); });

  // check
  ScenarioFlags check_f;
  int check_d = 0;
  std::uint64_t check_seed = 1;
  int check_draws = 1;
  double check_snr = 20.0;
  double check_tol = 1e-8;
  bool check_allow = false;
  auto* check_cmd = app.add_subcommand("check", "verify the subspace constraints numerically");
  add_scenario_flags(check_cmd, check_f);
  check_cmd->add_option("--d", check_d, "streams per user (0 = d_max)");
  check_cmd->add_option("--seed", check_seed, "channel seed");
  check_cmd->add_option("--draws", check_draws, "number of channel draws");
  check_cmd->add_option("--snr-db", check_snr, "SNR in dB (sets the noise floor)");
  check_cmd->add_option("--tol", check_tol, "relative rank threshold");
  check_cmd->add_flag("--allow-infeasible", check_allow, "permit d beyond d_max");
  check_cmd->callback([&] {
    rc = run_check(check_f, check_d, check_seed, check_draws, check_snr, check_tol,
                   check_allow, as_json);
  });

  // theorem3
  int t3_m = 4;
  std::string t3_alphabet = "qpsk";
  std::uint64_t t3_seed = 1;
  int t3_draws = 50;
  double t3_tol = 1e-9;
  bool t3_untied = false;
  auto* t3_cmd = app.add_subcommand(
      "theorem3", "check the shared row-marginal property of tied-angle matrices");
  t3_cmd->add_option("--m", t3_m, "matrix dimension (even)");
  t3_cmd->add_option("--alphabet", t3_alphabet, "constellation spec");
  t3_cmd->add_option("--seed", t3_seed, "angle seed");
  t3_cmd->add_option("--draws", t3_draws, "number of random angle draws");
  t3_cmd->add_option("--tol", t3_tol, "multiset comparison tolerance");
  t3_cmd->add_flag("--untied", t3_untied, "search for an untied-angle counterexample");
  t3_cmd->callback([&] {
    rc = run_theorem3(t3_m, t3_alphabet, t3_seed, t3_draws, t3_tol, t3_untied, as_json);
  });

  // estimate-demo
  ScenarioFlags est_f;
  int est_d = 0;
  std::string est_alphabet = "qpsk";
  double est_snr = 20.0;
  int est_blocks = 500;
  std::uint64_t est_seed = 1;
  auto* est_cmd = app.add_subcommand(
      "estimate-demo", "fit interference statistics on one seeded realization");
  add_scenario_flags(est_cmd, est_f);
  est_cmd->add_option("--d", est_d, "streams per user (0 = d_max)");
  est_cmd->add_option("--constellation", est_alphabet, "constellation spec");
  est_cmd->add_option("--snr-db", est_snr, "SNR in dB");
  est_cmd->add_option("--blocks", est_blocks, "sample blocks");
  est_cmd->add_option("--seed", est_seed, "realization seed");
  est_cmd->callback([&] {
    rc = run_estimate_demo(est_f, est_d, est_alphabet, est_snr, est_blocks, est_seed,
                           as_json);
  });

  // simulate
  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo BER sweep");
  sim_cmd->add_option("--config", sim.config, "flat key=value config file");
  sim_cmd->add_option("--out", sim.out, "output CSV path");
  sim_cmd->add_option("--emit-plot-script", sim.plot_script,
                      "write a python plot script for the CSV");
  add_scenario_flags(sim_cmd, sim.sf);
  sim_cmd->add_option("--d", sim.d, "streams per user (0 = d_max)");
  sim_cmd->add_option("--constellation", sim.constellation, "constellation spec");
  sim_cmd->add_option("--detectors", sim.detectors, "md-known,md-est,ml-known,ml-blind");
  sim_cmd->add_option("--snr-db-list", sim.snr_list, "comma-separated SNRs in dB");
  sim_cmd->add_option("--realizations", sim.realizations, "channel realizations");
  sim_cmd->add_option("--blocks-per-realization", sim.blocks, "blocks per realization");
  sim_cmd->add_option("--seed", sim.seed, "simulation seed (required)");
  sim_cmd->add_option("--unitary", sim.unitary,
                      "seeded-random:<seed>|complex-random:<seed>|angles:<a;b;..>");
  sim_cmd->add_option("--alpha-desired", sim.alpha_desired, "desired-link power");
  sim_cmd->add_option("--alpha-interf", sim.alpha_interf, "interference power");
  sim_cmd->add_flag("--allow-infeasible", sim.allow_infeasible, "permit d beyond d_max");
  sim_cmd->add_flag("--all-users", sim.all_users, "score every receiver, not only user 1");
  sim_cmd->add_option("--threads", sim.threads, "worker count (1 = serial, 0 = all cores)");
  sim_cmd->add_option("--em-restarts", sim.em_restarts, "EM restarts");
  sim_cmd->add_option("--em-max-iters", sim.em_max_iters, "EM iteration cap");
  sim_cmd->add_option("--components", sim.components, "auto|alphabet");
  sim_cmd->add_option("--min-est-samples", sim.min_est_samples,
                      "minimum samples for blind estimation");
  sim_cmd->add_option("--search-space-cap", sim.search_space_cap,
                      "cap on enumerated vectors / ML hypotheses / mixture means");
  sim_cmd->callback([&] { rc = run_simulate(sim, sim_cmd, as_json); });

  try {
    app.parse(argc, argv);
    return rc;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const bfia::param_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
