#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "skcap/bounds_dmc.hpp"
#include "skcap/errors.hpp"
#include "skcap/protocol_sim.hpp"
#include "test_support.hpp"

namespace skcap {
namespace {

using testing::load;

// U = X uniform over the channel input, x = u.
AuxiliaryEncoderPolicy copy_policy(const StateChannel& ch) {
  const std::size_t nx = ch.x_size(), ns = ch.s_size();
  std::vector<double> us(ns * nx, 1.0 / static_cast<double>(nx));
  std::vector<double> xus(nx * ns * nx, 0.0);
  for (std::size_t u = 0; u < nx; ++u)
    for (std::size_t s = 0; s < ns; ++s) xus[(u * ns + s) * nx + u] = 1.0;
  return AuxiliaryEncoderPolicy(nx, ns, nx, us, xus);
}

// Yr = X noiselessly; Ye erases X with probability 1/2 (symbol 2).
StateChannel noiseless_with_erasure_eavesdropper() {
  std::vector<double> k(2 * 1 * 2 * 3, 0.0);
  for (int x = 0; x < 2; ++x) {
    k[(x * 2 + x) * 3 + x] = 0.5;
    k[(x * 2 + x) * 3 + 2] = 0.5;
  }
  return StateChannel(2, 1, 2, 3, {1.0}, k);
}

StateChannel identity_channel() { return load("identity.json"); }

SimConfig config(std::size_t n, double eps, double margin, std::size_t trials,
                 std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.epsilon = eps;
  c.rate_margin = margin;
  c.trials = trials;
  c.seed = seed;
  return c;
}

std::vector<Sequence> all_sequences(std::size_t n, std::size_t base) {
  std::vector<Sequence> out;
  Sequence s(n, 0);
  while (true) {
    out.push_back(s);
    std::size_t i = 0;
    while (i < n && ++s[i] == base) s[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// Count-based typicality written out independently of the library.
bool typical_oracle(const Sequence& a, const Sequence& b, const std::vector<double>& p,
                    std::size_t nb, double eps) {
  std::map<std::pair<int, int>, int> counts;
  for (std::size_t i = 0; i < a.size(); ++i) ++counts[{a[i], b[i]}];
  for (std::size_t cell = 0; cell < p.size(); ++cell) {
    const int c = counts[{static_cast<int>(cell / nb), static_cast<int>(cell % nb)}];
    if (p[cell] == 0.0 && c > 0) return false;
    if (std::abs(c / double(a.size()) - p[cell]) > eps) return false;
  }
  return true;
}

double mutual_information_of(const std::map<std::pair<std::size_t, Sequence>, double>& joint) {
  std::map<std::size_t, double> pk;
  std::map<Sequence, double> pv;
  for (const auto& [kv, p] : joint) {
    pk[kv.first] += p;
    pv[kv.second] += p;
  }
  double mi = 0.0;
  for (const auto& [kv, p] : joint)
    if (p > 0) mi += p * std::log2(p / (pk[kv.first] * pv[kv.second]));
  return mi;
}

// I(K;Ye^n)/n by brute force over s^n, the encoder's pick, x^n and ye^n.
double naive_leakage(const BinningCodebook& cb, const StateChannel& ch,
                     const AuxiliaryEncoderPolicy& pol, KeyMap map) {
  const std::size_t n = cb.n();
  std::vector<double> pus;
  for (std::size_t u = 0; u < pol.u_size(); ++u)
    for (std::size_t s = 0; s < ch.s_size(); ++s)
      pus.push_back(ch.state_pmf()[s] * pol.u_given_s(s, u));
  std::map<std::pair<std::size_t, Sequence>, double> joint;
  for (const auto& s : all_sequences(n, ch.s_size())) {
    double ps = 1.0;
    for (auto v : s) ps *= ch.state_pmf()[v];
    std::vector<std::size_t> typical;
    for (std::size_t c = 0; c < cb.size(); ++c) {
      const auto w = cb.sequence(c);
      if (typical_oracle(Sequence(w.begin(), w.end()), s, pus, ch.s_size(), cb.epsilon()))
        typical.push_back(c);
    }
    if (typical.empty())
      for (std::size_t c = 0; c < cb.size(); ++c) typical.push_back(c);
    for (std::size_t c : typical) {
      const auto u = cb.sequence(c);
      const std::size_t key = map == KeyMap::bin_index ? cb.bin_of(c) : c;
      for (const auto& x : all_sequences(n, ch.x_size())) {
        double px = 1.0;
        for (std::size_t i = 0; i < n; ++i) px *= pol.x_given_us(u[i], s[i], x[i]);
        if (px == 0.0) continue;
        for (const auto& ye : all_sequences(n, ch.ye_size())) {
          double pe = 1.0;
          for (std::size_t i = 0; i < n; ++i) pe *= ch.ye_marginal(x[i], s[i], ye[i]);
          joint[{key, ye}] += ps / typical.size() * px * pe;
        }
      }
    }
  }
  return mutual_information_of(joint) / n;
}

TEST(Typicality, MatchesCountOracleOnAllPairs) {
  const std::vector<double> p(4, 0.25);
  const auto seqs = all_sequences(8, 2);
  std::size_t accepted = 0;
  for (const auto& a : seqs)
    for (const auto& b : seqs) {
      const bool lib = jointly_typical(a, b, p, 2, 0.1);
      ASSERT_EQ(lib, typical_oracle(a, b, p, 2, 0.1));
      accepted += lib;
    }
  // Each cell count must be exactly 2 of 8: 8!/(2!)^4 pairs.
  EXPECT_EQ(accepted, 2520u);
}

TEST(Typicality, ZeroProbabilityCellsNeverOccur) {
  const std::vector<double> diag = {0.5, 0.0, 0.0, 0.5};
  const Sequence a = {0, 1, 0, 1}, b = {0, 1, 0, 1}, c = {0, 1, 1, 1};
  EXPECT_TRUE(jointly_typical(a, b, diag, 2, 1.0));
  EXPECT_FALSE(jointly_typical(a, c, diag, 2, 1.0));
}

TEST(Codebook, SizingRuleErasureExample) {
  const auto ch = noiseless_with_erasure_eavesdropper();
  const auto pol = copy_policy(ch);
  const auto info = aux_information(ch, pol);
  ASSERT_NEAR(info.u_yr, 1.0, 1e-12);
  ASSERT_NEAR(info.u_ye, 0.5, 1e-12);
  const auto cb = build_codebook(ch, pol, config(8, 0.05, 0.125, 1, 3));
  EXPECT_EQ(cb.size(), 128u);
  EXPECT_EQ(cb.bin_count(), 8u);
  std::vector<std::size_t> sizes(cb.bin_count(), 0);
  for (std::size_t i = 0; i < cb.size(); ++i) ++sizes[cb.bin_of(i)];
  for (auto s : sizes) EXPECT_EQ(s, 16u);
  EXPECT_NEAR(cb.rates().total_rate, 7.0 / 8.0, 1e-12);
  EXPECT_NEAR(cb.rates().key_rate, 3.0 / 8.0, 1e-12);
  EXPECT_NEAR(cb.rates().per_bin_rate, 4.0 / 8.0, 1e-12);
  std::set<Sequence> distinct;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto s = cb.sequence(i);
    distinct.emplace(s.begin(), s.end());
  }
  EXPECT_EQ(distinct.size(), cb.size());
}

TEST(Codebook, SingletonBinsWithoutEavesdropperInformation) {
  const auto ch = identity_channel();
  const auto cb = build_codebook(ch, copy_policy(ch), config(6, 0.05, 0.2, 1, 5));
  EXPECT_EQ(cb.bin_count(), cb.size());
  std::set<std::size_t> bins;
  for (std::size_t i = 0; i < cb.size(); ++i) bins.insert(cb.bin_of(i));
  EXPECT_EQ(bins.size(), cb.size());
}

TEST(Codebook, NonPositiveKeyRateGivesSingleBin) {
  // Same law at both outputs: I(U;Yr) = I(U;Ye).
  const auto ch = testing::factorized_bsc(0.05, 0.05);
  const auto pol = copy_policy(ch);
  const auto cfg = config(6, 0.2, 0.2, 500, 9);
  const auto cb = build_codebook(ch, pol, cfg);
  EXPECT_EQ(cb.bin_count(), 1u);
  EXPECT_EQ(cb.rates().key_rate, 0.0);
  EXPECT_EQ(exact_leakage(cb, ch, pol, cfg), 0.0);
  const auto r = run_no_discussion(ch, pol, cfg);
  EXPECT_EQ(r.key_bins, 1u);
  EXPECT_EQ(r.leakage_bits_per_symbol, 0.0);
  EXPECT_EQ(r.achieved_key_rate, 0.0);
}

TEST(Codebook, BudgetAndInvariants) {
  const auto ch = identity_channel();
  EXPECT_THROW(build_codebook(ch, copy_policy(ch), config(24, 0.05, 0.01, 1, 1)), SizeError);
  try {
    build_codebook(ch, copy_policy(ch), config(24, 0.05, 0.01, 1, 1));
  } catch (const SizeError& e) {
    EXPECT_NE(std::string(e.what()).find("2^20"), std::string::npos);
  }
  // Rates add up within 1/n and every bin is used.
  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    const auto rc = testing::random_channel(rng, 2, 2, 2, 2);
    const auto pol = testing::random_aux_policy(rng, 2, 2, 2);
    const std::size_t n = 4 + t % 6;
    const auto cb = build_codebook(rc, pol, config(n, 0.1, 0.05, 1, t));
    EXPECT_NEAR(cb.rates().total_rate, cb.rates().key_rate + cb.rates().per_bin_rate,
                1.0 / n);
    std::set<std::size_t> used;
    for (std::size_t i = 0; i < cb.size(); ++i) used.insert(cb.bin_of(i));
    if (cb.size() >= cb.bin_count()) {
      EXPECT_EQ(used.size(), cb.bin_count());
    }
  }
}

TEST(Config, Validation) {
  EXPECT_THROW(config(0, 0.1, 0.1, 1, 1).validate(), DomainError);
  EXPECT_THROW(config(25, 0.1, 0.1, 1, 1).validate(), DomainError);
  EXPECT_THROW(config(4, 0.0, 0.1, 1, 1).validate(), DomainError);
  EXPECT_THROW(config(4, 0.1, 0.1, 0, 1).validate(), DomainError);
}

TEST(Encode, CopyEncoderReproducesState) {
  const std::size_t n = 4;
  const StateChannel ch = testing::constant_channel(2, 2, 2, 2);
  // u = s, x = u.
  const AuxiliaryEncoderPolicy pol(2, 2, 2, {1, 0, 0, 1}, {1, 0, 1, 0, 0, 1, 0, 1});
  std::vector<std::uint8_t> symbols;
  const auto seqs = all_sequences(n, 2);
  for (const auto& s : seqs) symbols.insert(symbols.end(), s.begin(), s.end());
  const BinningCodebook cb(n, 2, 0.51, symbols, std::vector<std::size_t>(seqs.size(), 0), 1, {});
  Rng rng(1);
  for (const auto& s : seqs) {
    const auto e = encode(cb, ch, pol, s, rng);
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ(e->u_seq, s);
    EXPECT_EQ(e->x_seq, s);
  }
}

TEST(Encode, EmptyTypicalSetFails) {
  const StateChannel ch = testing::constant_channel(2, 2, 2, 2);
  const AuxiliaryEncoderPolicy pol(2, 2, 2, {1, 0, 0, 1}, {1, 0, 1, 0, 0, 1, 0, 1});
  const BinningCodebook cb(4, 2, 0.2, {0, 0, 0, 0}, {0}, 1, {});
  Rng rng(1);
  const Sequence s = {1, 1, 1, 1};
  EXPECT_FALSE(encode(cb, ch, pol, s, rng).has_value());
  EXPECT_THROW(encode(cb, ch, pol, Sequence{1, 1, 1}, rng), ShapeError);
}

TEST(Decode, NoiselessAndAmbiguous) {
  const auto ch = identity_channel();
  const auto pol = copy_policy(ch);
  const BinningCodebook cb(4, 2, 0.05, {0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 0}, {0, 1, 1}, 2, {});
  for (std::size_t c = 0; c < cb.size(); ++c) {
    const auto w = cb.sequence(c);
    const auto d = decode(cb, ch, pol, w);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->codeword, c);
    EXPECT_EQ(d->key, cb.bin_of(c));
  }
  // A noisy receiver makes neighbouring codewords both typical.
  const auto noisy = testing::factorized_bsc(0.3, 0.3);
  const BinningCodebook wide(4, 2, 0.5, {0, 1, 0, 1, 0, 1, 1, 1}, {0, 1}, 2, {});
  EXPECT_FALSE(decode(wide, noisy, copy_policy(noisy), Sequence{0, 1, 0, 1}).has_value());
  EXPECT_THROW(decode(cb, ch, pol, Sequence{0, 1}), ShapeError);
}

TEST(Leakage, MatchesNaiveEnumeration) {
  Rng rng(88);
  for (int t = 0; t < 4; ++t) {
    const auto ch = testing::random_channel(rng, 2, 2, 2, 2);
    const auto pol = testing::random_aux_policy(rng, 2, 2, 2);
    const std::size_t n = 3;
    // Distinct codewords 0..4 (as bit patterns) in 2 bins.
    std::vector<std::uint8_t> symbols;
    for (int c = 0; c < 5; ++c)
      for (std::size_t i = 0; i < n; ++i) symbols.push_back((c >> i) & 1);
    const BinningCodebook cb(n, 2, 0.3 + 0.1 * t, symbols, {0, 1, 1, 0, 1}, 2, {});
    const auto cfg = config(n, cb.epsilon(), 0.1, 1, 1);
    EXPECT_NEAR(exact_leakage(cb, ch, pol, cfg), naive_leakage(cb, ch, pol, KeyMap::bin_index),
                1e-12);
    EXPECT_NEAR(exact_leakage(cb, ch, pol, cfg, KeyMap::codeword_index),
                naive_leakage(cb, ch, pol, KeyMap::codeword_index), 1e-12);
  }
}

TEST(Leakage, DegenerateCases) {
  // Constant eavesdropper output.
  const auto ch = identity_channel();
  const auto pol = copy_policy(ch);
  const auto cfg = config(6, 0.1, 0.2, 1, 2);
  const auto cb = build_codebook(ch, pol, cfg);
  EXPECT_NEAR(exact_leakage(cb, ch, pol, cfg), 0.0, 1e-15);
  EXPECT_THROW(exact_leakage(cb, ch, pol, config(7, 0.1, 0.2, 1, 2)), ShapeError);
}

TEST(Leakage, BinningReducesLeakageOnPinnedBenchmark) {
  const auto ch = load("pinned_no_disc.json");
  const auto pol = copy_policy(ch);
  const auto cfg = config(6, 0.05, 0.2, 1, 42);
  const auto cb = build_codebook(ch, pol, cfg);
  const double binned = exact_leakage(cb, ch, pol, cfg, KeyMap::bin_index);
  const double plain = exact_leakage(cb, ch, pol, cfg, KeyMap::codeword_index);
  EXPECT_LT(binned, plain);
  EXPECT_LE(binned, 0.15);
  EXPECT_GE(binned, 0.0);
}

TEST(Run, PinnedBenchmarkAtBlockLengthTen) {
  const auto ch = load("pinned_no_disc.json");
  const auto r = run_no_discussion(ch, copy_policy(ch), config(10, 0.05, 0.2, 10000, 42));
  EXPECT_LE(r.disagreement_prob, 0.1);
  EXPECT_LE(r.leakage_bits_per_symbol, 0.2);
  EXPECT_EQ(r.leakage_method, LeakageMethod::exact);
  EXPECT_EQ(r.trials, 10000u);
}

TEST(Run, IdentitySetupAgreesEveryTrial) {
  const auto ch = identity_channel();
  const auto pol = copy_policy(ch);
  const auto cfg = config(6, 0.5, 0.2, 4000, 3);
  const auto cb = build_codebook(ch, pol, cfg);
  const auto r = run_no_discussion(ch, pol, cfg);
  EXPECT_EQ(r.disagreement_prob, 0.0);
  EXPECT_EQ(r.encode_failure_rate, 0.0);
  EXPECT_EQ(r.reconstruction_rate, 1.0);
  EXPECT_NEAR(r.operating_key_rate, cb.rates().total_rate, 1e-15);
  // Empirical H(K)/n of a uniform key over 4000 draws.
  EXPECT_NEAR(r.achieved_key_rate, cb.rates().total_rate, 0.01);
}

bool same_report(const SimReport& a, const SimReport& b) {
  return a.trials == b.trials && a.disagreement_prob == b.disagreement_prob &&
         a.leakage_bits_per_symbol == b.leakage_bits_per_symbol &&
         a.leakage_method == b.leakage_method && a.achieved_key_rate == b.achieved_key_rate &&
         a.encode_failure_rate == b.encode_failure_rate &&
         a.reconstruction_rate == b.reconstruction_rate &&
         a.misreconstruction_rate == b.misreconstruction_rate &&
         a.operating_key_rate == b.operating_key_rate && a.codebook_size == b.codebook_size &&
         a.key_bins == b.key_bins && a.public_bins == b.public_bins;
}

TEST(Properties, Deterministic) {
  const auto ch = load("pinned_no_disc.json");
  const auto cfg = config(8, 0.05, 0.2, 2000, 42);
  EXPECT_TRUE(same_report(run_no_discussion(ch, copy_policy(ch), cfg),
                          run_no_discussion(ch, copy_policy(ch), cfg)));
  const auto one = load("pinned_one_round.json");
  const auto in = InputPolicy::uniform(1, 2);
  EXPECT_TRUE(same_report(run_one_round_discussion(one, in, cfg),
                          run_one_round_discussion(one, in, cfg)));
  auto other = cfg;
  other.seed = 43;
  EXPECT_FALSE(same_report(run_no_discussion(ch, copy_policy(ch), cfg),
                           run_no_discussion(ch, copy_policy(ch), other)));
}

TEST(Properties, LeakageBoundedByKeyRate) {
  Rng rng(99);
  for (int t = 0; t < 12; ++t) {
    const auto ch = testing::random_channel(rng, 2, 2, 2, 2);
    const auto pol = testing::random_aux_policy(rng, 2, 2, 2);
    const auto cfg = config(4 + t % 4, 0.1, 0.02, 200, t);
    const auto r = run_no_discussion(ch, pol, cfg);
    EXPECT_GE(r.leakage_bits_per_symbol, -1e-9);
    EXPECT_LE(r.leakage_bits_per_symbol, r.operating_key_rate + 1e-9);
    for (double p : {r.disagreement_prob, r.encode_failure_rate, r.reconstruction_rate}) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Properties, OperatingRateWithinBoundMinusMargin) {
  Rng rng(111);
  for (int t = 0; t < 20; ++t) {
    const auto ch = testing::random_channel(rng, 2, 2, 2, 2);
    const auto pol = testing::random_aux_policy(rng, 2, 2, 2);
    const double margin = 0.01 + 0.02 * t;
    const auto cb = build_codebook(ch, pol, config(6, 0.1, margin, 1, t));
    const auto info = aux_information(ch, pol);
    EXPECT_LE(cb.rates().target_key_rate, info.u_yr - info.u_ye - margin + 1e-12);
  }
}

TEST(Properties, MarginDoesNotIncreaseDisagreement) {
  const auto ch = load("pinned_no_disc.json");
  const auto pol = copy_policy(ch);
  double prev = 2.0;
  for (double m : {0.1, 0.175, 0.25, 0.325, 0.4}) {
    const auto r = run_no_discussion(ch, pol, config(10, 0.05, m, 10000, 42));
    EXPECT_LE(r.disagreement_prob, prev) << "margin " << m;
    prev = r.disagreement_prob;
  }
}

// I(K; Ye^n, B)/n by enumeration of i.i.d. (yr, ye) pairs.
double naive_round_leakage(const StateChannel& ch, const InputPolicy& in, const RoundBins& bins,
                           std::size_t n) {
  std::vector<double> q(ch.yr_size() * ch.ye_size(), 0.0);
  for (std::size_t s = 0; s < ch.s_size(); ++s)
    for (std::size_t x = 0; x < ch.x_size(); ++x)
      for (std::size_t yr = 0; yr < ch.yr_size(); ++yr)
        for (std::size_t ye = 0; ye < ch.ye_size(); ++ye)
          q[yr * ch.ye_size() + ye] +=
              ch.state_pmf()[s] * in.x_given_s(s, x) * ch.kernel(x, s, yr, ye);
  std::map<std::pair<std::size_t, Sequence>, double> joint;
  const auto rs = all_sequences(n, ch.yr_size());
  const auto es = all_sequences(n, ch.ye_size());
  for (std::size_t ri = 0; ri < rs.size(); ++ri)
    for (const auto& ye : es) {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) p *= q[rs[ri][i] * ch.ye_size() + ye[i]];
      Sequence view = ye;
      view.push_back(static_cast<std::uint8_t>(bins.bin(ri)));
      joint[{bins.key(ri), view}] += p;
    }
  return mutual_information_of(joint) / n;
}

TEST(OneRound, IndependentNoiseBenchmark) {
  const auto ch = load("pinned_one_round.json");
  const auto in = InputPolicy::uniform(1, 2);
  const auto cfg = config(8, 0.05, 0.2, 10000, 42);
  const auto r = run_one_round_discussion(ch, in, cfg);
  EXPECT_GE(r.reconstruction_rate, 0.9);
  EXPECT_LE(r.leakage_bits_per_symbol, 0.2);
  EXPECT_EQ(r.leakage_method, LeakageMethod::exact);
  const auto bins = one_round_bins(ch, in, cfg);
  EXPECT_EQ(bins.public_bins, r.public_bins);
  EXPECT_EQ(bins.key_bins, r.key_bins);
  EXPECT_NEAR(r.leakage_bits_per_symbol, naive_round_leakage(ch, in, bins, 8), 1e-12);
}

TEST(OneRound, NoiselessReceiverNeedsNoPublicBins) {
  const auto ch = identity_channel();
  const auto in = InputPolicy::uniform(1, 2);
  const auto cfg = config(8, 0.05, 0.2, 2000, 4);
  const auto r = run_one_round_discussion(ch, in, cfg);
  EXPECT_EQ(r.public_bins, 1u);
  EXPECT_EQ(r.disagreement_prob, 0.0);
  EXPECT_EQ(r.reconstruction_rate, 1.0);
  EXPECT_EQ(r.misreconstruction_rate, 0.0);
  // max I(X,S;Yr) = 1 bit, less the margin.
  EXPECT_GE(r.operating_key_rate, 1.0 - 0.2 - 1e-12);
  EXPECT_LE(r.operating_key_rate, 1.0);
  EXPECT_EQ(r.leakage_bits_per_symbol, 0.0);
}

TEST(OneRound, ExposedReceiverHasNoKey) {
  std::vector<double> k(8, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) k[(x * 2 + y) * 2 + y] = y == x ? 0.9 : 0.1;
  const StateChannel ch(2, 1, 2, 2, {1.0}, k);
  const auto r = run_one_round_discussion(ch, InputPolicy::uniform(1, 2),
                                          config(6, 0.05, 0.2, 500, 5));
  EXPECT_EQ(r.key_bins, 1u);
  EXPECT_EQ(r.operating_key_rate, 0.0);
  EXPECT_EQ(r.leakage_bits_per_symbol, 0.0);
}

// A unique lookup must return the receiver's own sequence. Holds trivially
// when the truth is always conditionally typical.
TEST(OneRound, UniqueLookupIsTruthWhenReceiverNoiseless) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = run_one_round_discussion(identity_channel(), InputPolicy::uniform(1, 2),
                                            config(10, 0.05, 0.1, 1000, seed));
    EXPECT_EQ(r.misreconstruction_rate, 0.0);
  }
}

// The same invariant on the pinned benchmark. An atypical yr^n can share its
// public bin with a typical sequence, which the sender then returns as the
// unique match; see the decision ledger.
TEST(OneRound, UniqueLookupIsTruthOnPinnedBenchmark) {
  const auto r = run_one_round_discussion(load("pinned_one_round.json"),
                                          InputPolicy::uniform(1, 2),
                                          config(8, 0.05, 0.2, 10000, 42));
  EXPECT_EQ(r.misreconstruction_rate, 0.0);
}

}  // namespace
}  // namespace skcap
