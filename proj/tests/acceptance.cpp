// Acceptance checks. Usage: acceptance <skcap binary> <test data dir>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "commands.hpp"
#include "skcap/bounds_dmc.hpp"
#include "skcap/channel_file.hpp"
#include "skcap/gaussian.hpp"
#include "skcap/protocol_sim.hpp"

namespace {

using namespace skcap;
namespace fs = std::filesystem;

std::string g_binary;
fs::path g_data;

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return v;
}

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

double mi_table(const std::vector<double>& joint, int rows, int cols) {
  std::vector<double> r(rows, 0.0), c(cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      r[i] += joint[i * cols + j];
      c[j] += joint[i * cols + j];
    }
  double total = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double v = joint[i * cols + j];
      if (v > 0) total += v * std::log2(v / (r[i] * c[j]));
    }
  return total;
}

// Brute force over binary U on a 101^3 grid for a stateless binary channel
// whose outputs see flips flip_r and flip_e.
double brute_force_key_rate(double flip_r, double flip_e) {
  double best = 0.0;
  const int g = 100;
  for (int ia = 0; ia <= g; ++ia)
    for (int ib = 0; ib <= g; ++ib)
      for (int ic = 0; ic <= g; ++ic) {
        const double pu[2] = {ia / double(g), 1 - ia / double(g)};
        const double px1[2] = {ib / double(g), ic / double(g)};
        std::vector<double> ur(4), ue(4);
        for (int u = 0; u < 2; ++u) {
          const double r1 = px1[u] * (1 - flip_r) + (1 - px1[u]) * flip_r;
          const double e1 = px1[u] * (1 - flip_e) + (1 - px1[u]) * flip_e;
          ur[u * 2 + 1] = pu[u] * r1;
          ur[u * 2] = pu[u] * (1 - r1);
          ue[u * 2 + 1] = pu[u] * e1;
          ue[u * 2] = pu[u] * (1 - e1);
        }
        best = std::max(best, mi_table(ur, 2, 2) - mi_table(ue, 2, 2));
      }
  return best;
}

StateChannel load(const std::string& name) {
  return read_channel_file(g_data / name).channel;
}

AuxiliaryEncoderPolicy copy_policy(const StateChannel& ch) {
  const std::size_t nx = ch.x_size(), ns = ch.s_size();
  std::vector<double> us(ns * nx, 1.0 / static_cast<double>(nx));
  std::vector<double> xus(nx * ns * nx, 0.0);
  for (std::size_t u = 0; u < nx; ++u)
    for (std::size_t s = 0; s < ns; ++s) xus[(u * ns + s) * nx + u] = 1.0;
  return AuxiliaryEncoderPolicy(nx, ns, nx, us, xus);
}

SimConfig sim_config(std::size_t n, std::size_t trials) {
  SimConfig c;
  c.n = n;
  c.epsilon = 0.05;
  c.rate_margin = 0.2;
  c.trials = trials;
  c.seed = 42;
  return c;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

// Runs the binary and returns {exit status, stdout}.
std::pair<int, std::string> run_binary(const std::vector<std::string>& args) {
  std::string cmd = shell_quote(g_binary);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

void criterion1(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ps = logspace(1, 1e6, 25);
  const auto qs = logspace(1e-3, 1e6, 25);
  const auto ds = logspace(1e-3, 1e4, 20);
  std::size_t points = 0, bad_order = 0, bad_gap = 0;
  double worst = 0.0;
  for (double p : ps)
    for (double q : qs)
      for (double d : ds) {
        const GaussianParams g(p, q, d);
        const double lb = lb_no_discussion(g), ub = ub_no_discussion(g);
        const double cap = capacity_discussion(g);
        if (!(lb <= ub + 1e-12 && ub <= cap + 1e-12)) ++bad_order;
        if (!(ub - lb <= 0.5)) ++bad_gap;
        worst = std::max(worst, ub - lb);
        ++points;
      }
  const double elapsed = seconds_since(t0);
  c.detail << points << " triples, worst gap " << worst << " bits, " << elapsed << " s";
  c.expect(points >= 10000, "at least 1e4 triples");
  c.expect(bad_order == 0, std::to_string(bad_order) + " ordering violations");
  c.expect(bad_gap == 0, std::to_string(bad_gap) + " gaps above 0.5");
  c.expect(elapsed < 5.0, "runtime < 5 s");
}

void criterion2(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const double high_snr = gap_analysis(GaussianParams(1e6, 10, 10)).gap_bits;
  const double high_inr = gap_analysis(GaussianParams(10, 1e6, 10)).gap_bits;
  const double elapsed = seconds_since(t0);
  c.detail << "gap(P=1e6) " << high_snr << ", gap(Q=1e6) " << high_inr << ", " << elapsed
           << " s";
  c.expect(high_snr < 1e-3, "gap at P=1e6");
  c.expect(high_inr < 1e-3, "gap at Q=1e6");
  c.expect(elapsed < 1.0, "runtime < 1 s");
}

void criterion3(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / "skcap_acceptance";
  fs::create_directories(dir);
  for (const std::string panel : {"left", "right"}) {
    const fs::path csv = dir / (panel + ".csv");
    const auto [code, out] = run_binary({"figure", "--panel", panel, "--out", csv.string()});
    c.expect(code == 0, panel + " exit status");
    const auto rows = csv_rows(read_file(csv));
    c.expect(rows.size() > 2, panel + " rows");
    double prev_lb = -1, prev_ub = -1, prev_cap = -1;
    bool spot = false, ordered = true, monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != 5) {
        ordered = false;
        continue;
      }
      const double x = std::stod(rows[i][0]);
      const double ub = std::stod(rows[i][2]), cap = std::stod(rows[i][3]);
      if (!rows[i][1].empty()) {
        const double lb = std::stod(rows[i][1]);
        ordered = ordered && lb <= ub + 1e-9;
        monotone = monotone && lb >= prev_lb - 1e-9;
        prev_lb = lb;
      }
      ordered = ordered && ub <= cap + 1e-9;
      monotone = monotone && ub >= prev_ub - 1e-9 && cap >= prev_cap - 1e-9;
      prev_ub = ub;
      prev_cap = cap;
      if (std::abs(x - 10.0) < 1e-9) {
        spot = std::abs(std::stod(rows[i][1]) - 1.568837536918837) <= 1e-6 &&
               std::abs(ub - 1.572279140641943) <= 1e-6 &&
               std::abs(cap - 1.633576936171599) <= 1e-6;
      }
    }
    c.expect(ordered, panel + " ordering");
    c.expect(monotone, panel + " monotone curves");
    c.expect(spot, panel + " spot values at 10 dB");
  }
  fs::remove_all(dir);
  const double elapsed = seconds_since(t0);
  c.detail << "both panels ordered, monotone, spot values within 1e-6; " << elapsed << " s";
  c.expect(elapsed < 1.0, "runtime < 1 s");
}

void criterion4(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ch = load("degraded_bsc.json");
  const OptimizerConfig cfg;
  const double lb = lower_bound_no_discussion(ch, cfg).value_bits;
  const double ub = upper_bound_no_discussion(ch, cfg).value_bits;
  const double elapsed = seconds_since(t0);
  const double oracle = brute_force_key_rate(0.1, 0.2);
  c.detail << "lb " << lb << ", oracle " << oracle << ", h2(0.2)-h2(0.1) "
           << h2(0.2) - h2(0.1) << ", ub " << ub << ", " << elapsed << " s";
  c.expect(std::abs(lb - oracle) <= 1e-3, "lb within 1e-3 of oracle");
  c.expect(ub >= oracle - 1e-9, "ub >= oracle");
  c.expect(elapsed < 60.0, "runtime < 60 s");
}

void criterion5(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ch = load("factorized_bsc.json");
  const OptimizerConfig cfg;
  const double lb = lower_bound_discussion(ch, cfg).value_bits;
  const double ub = upper_bound_discussion(ch, cfg).value_bits;
  const auto cap = discussion_capacity_if_markov(ch, cfg);
  const double elapsed = seconds_since(t0);
  c.detail << "lb " << lb << ", ub " << ub << ", capacity flagged " << cap.has_value() << ", "
           << elapsed << " s";
  c.expect(std::abs(lb - ub) <= 5e-3, "lb and ub within 5e-3");
  c.expect(cap.has_value(), "capacity flag");
  c.expect(elapsed < 60.0, "runtime < 60 s");
}

void criterion6(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ch = load("pinned_no_disc.json");
  const auto pol = copy_policy(ch);
  const auto cfg6 = sim_config(6, 1);
  const auto cb = build_codebook(ch, pol, cfg6);
  const double binned = exact_leakage(cb, ch, pol, cfg6, KeyMap::bin_index);
  const double plain = exact_leakage(cb, ch, pol, cfg6, KeyMap::codeword_index);
  const auto run = run_no_discussion(ch, pol, sim_config(10, 10000));
  const double elapsed = seconds_since(t0);
  c.detail << "n=6 leakage binned " << binned << " vs unbinned " << plain
           << "; n=10 disagreement " << run.disagreement_prob << " over " << run.trials
           << " trials; " << elapsed << " s";
  c.expect(binned < plain, "binned leakage < unbinned");
  c.expect(binned <= 0.2, "binned leakage <= 0.2");
  c.expect(run.trials == 10000, "10^4 trials");
  c.expect(run.disagreement_prob <= 0.1, "disagreement <= 0.1");
  c.expect(elapsed < 300.0, "runtime < 5 min");
}

void criterion7(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ch = load("pinned_one_round.json");
  const auto r = run_one_round_discussion(ch, InputPolicy::uniform(ch.s_size(), ch.x_size()),
                                          sim_config(8, 10000));
  const double elapsed = seconds_since(t0);
  c.detail << "reconstruction " << r.reconstruction_rate << ", leakage "
           << r.leakage_bits_per_symbol << " ("
           << (r.leakage_method == LeakageMethod::exact ? "exact" : "estimate") << "), "
           << elapsed << " s";
  c.expect(r.reconstruction_rate >= 0.9, "reconstruction >= 0.9");
  c.expect(r.leakage_method == LeakageMethod::exact, "exact leakage");
  c.expect(r.leakage_bits_per_symbol <= 0.2, "leakage <= 0.2");
  c.expect(elapsed < 300.0, "runtime < 5 min");
}

void criterion8(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / "skcap_acceptance_det";
  fs::create_directories(dir);
  const std::string degraded = (g_data / "degraded_bsc.json").string();
  const std::string no_disc = (g_data / "pinned_no_disc.json").string();
  const std::string one_round = (g_data / "pinned_one_round.json").string();
  const std::vector<std::vector<std::string>> commands = {
      {"bounds-dmc", degraded, "--seed", "7"},
      {"simulate", no_disc, "--n", "8", "--trials", "2000", "--seed", "42"},
      {"simulate", one_round, "--mode", "one-round", "--n", "8", "--trials", "2000",
       "--seed", "42"},
      {"gaussian", "--axis", "delta", "--start-db", "-10", "--stop-db", "30", "--points",
       "41"},
  };
  std::size_t identical = 0;
  for (const auto& args : commands) {
    const auto a = run_binary(args), b = run_binary(args);
    const bool same = a.first == 0 && a == b && !a.second.empty();
    c.expect(same, args[0] + " repeat output");
    identical += same;
  }
  for (const std::string panel : {"left", "right"}) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path csv = dir / (panel + std::to_string(rep) + ".csv");
      run_binary({"figure", "--panel", panel, "--out", csv.string()});
      const std::string bytes = read_file(csv) + read_file(cli::gnuplot_path(csv));
      if (rep == 0) first = bytes;
      else {
        const bool same = !bytes.empty() && bytes == first;
        c.expect(same, "figure " + panel + " repeat output");
        identical += same;
      }
    }
  }
  fs::remove_all(dir);
  c.detail << identical << "/6 commands byte-identical on repeat; " << seconds_since(t0)
           << " s";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <skcap binary> <test data dir>\n";
    return 2;
  }
  g_binary = argv[1];
  g_data = argv[2];
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"gaussian ordering and half-bit gap", criterion1},
      {"asymptotic coincidence", criterion2},
      {"figure panels", criterion3},
      {"degraded binary wiretap oracle", criterion4},
      {"factorized channel capacity", criterion5},
      {"no-discussion protocol secrecy", criterion6},
      {"one-round discussion protocol", criterion7},
      {"determinism", criterion8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " [exception: " << e.what() << "]";
    }
    failures += !c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << " ("
              << criteria[i].first << "): " << c.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
