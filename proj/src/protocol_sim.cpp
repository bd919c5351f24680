#include "skcap/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>

#include "skcap/bounds_dmc.hpp"
#include "skcap/errors.hpp"
#include "skcap/joint_pmf.hpp"

namespace skcap {

namespace {

enum StreamTag : std::uint64_t {
  kTagCodebook = 11,
  kTagState = 12,
  kTagEncoder = 13,
  kTagChannel = 14,
};

constexpr std::size_t kMaxAlphabet = 256;

// ceil(2^e) for e > 0, else 1; the offset absorbs rounding in exact powers.
double bin_count_for(double exponent) {
  if (exponent <= 0.0) return 1.0;
  return std::max(1.0, std::ceil(std::exp2(exponent) - 1e-9));
}

// |alphabet|^n as an exact integer, or nullopt past 2^62.
std::optional<std::uint64_t> power(std::size_t base, std::size_t n) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (v > (std::uint64_t{1} << 62) / std::max<std::size_t>(base, 1)) {
      return std::nullopt;
    }
    v *= base;
  }
  return v;
}

std::uint64_t sequence_index(std::span<const std::uint8_t> seq, std::size_t base) {
  std::uint64_t idx = 0;
  for (std::size_t i = seq.size(); i-- > 0;) idx = idx * base + seq[i];
  return idx;
}

std::string format_count(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double entropy_of_counts(const auto& counts, double total) {
  double h = 0.0;
  for (const auto& [key, c] : counts) {
    const double p = static_cast<double>(c) / total;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

void require_matching(const StateChannel& channel,
                      const AuxiliaryEncoderPolicy& policy) {
  if (policy.s_size() != channel.s_size() || policy.x_size() != channel.x_size()) {
    throw ShapeError("policy alphabets do not match channel");
  }
  if (policy.u_size() > kMaxAlphabet || channel.s_size() > kMaxAlphabet ||
      channel.x_size() > kMaxAlphabet || channel.yr_size() > kMaxAlphabet ||
      channel.ye_size() > kMaxAlphabet) {
    throw SizeError("simulation alphabets are limited to 256 symbols");
  }
}

// Single-letter laws the encoder and decoder test against.
struct AuxTables {
  std::size_t nu, ns, nr;
  std::vector<double> us;  // p(u, s)
  std::vector<double> uyr; // p(u, yr)
};

AuxTables aux_tables(const StateChannel& channel,
                     const AuxiliaryEncoderPolicy& policy) {
  require_matching(channel, policy);
  AuxTables t{policy.u_size(), channel.s_size(), channel.yr_size(), {}, {}};
  t.us.assign(t.nu * t.ns, 0.0);
  t.uyr.assign(t.nu * t.nr, 0.0);
  const auto ps = channel.state_pmf();
  for (std::size_t u = 0; u < t.nu; ++u) {
    for (std::size_t s = 0; s < t.ns; ++s) {
      const double pus = ps[s] * policy.u_given_s(s, u);
      t.us[u * t.ns + s] = pus;
      for (std::size_t x = 0; x < channel.x_size(); ++x) {
        const double w = pus * policy.x_given_us(u, s, x);
        for (std::size_t r = 0; r < t.nr; ++r) {
          t.uyr[u * t.nr + r] += w * channel.yr_marginal(x, s, r);
        }
      }
    }
  }
  return t;
}

void require_length(std::span<const std::uint8_t> seq, std::size_t n,
                    std::size_t alphabet, const char* what) {
  if (seq.size() != n) {
    throw ShapeError(std::string(what) + ": sequence length " +
                     std::to_string(seq.size()) + " != block length " +
                     std::to_string(n));
  }
  for (auto v : seq) {
    if (v >= alphabet) throw ShapeError(std::string(what) + ": symbol out of range");
  }
}

std::vector<std::size_t> typical_codewords(const BinningCodebook& cb,
                                           std::span<const std::uint8_t> s_seq,
                                           const AuxTables& t) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    if (jointly_typical(cb.sequence(i), s_seq, t.us, t.ns, cb.epsilon())) {
      hits.push_back(i);
    }
  }
  return hits;
}

// Encoder choice: uniform over typical codewords; nullopt if there are none.
std::optional<std::size_t> choose_codeword(const BinningCodebook& cb,
                                           std::span<const std::uint8_t> s_seq,
                                           const AuxTables& t, Rng& rng) {
  const auto hits = typical_codewords(cb, s_seq, t);
  if (hits.empty()) return std::nullopt;
  return hits[rng.below(hits.size())];
}

Sequence sample_inputs(const AuxiliaryEncoderPolicy& policy,
                       std::span<const std::uint8_t> u_seq,
                       std::span<const std::uint8_t> s_seq, Rng& rng) {
  Sequence x(u_seq.size());
  std::vector<double> row(policy.x_size());
  for (std::size_t i = 0; i < u_seq.size(); ++i) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = policy.x_given_us(u_seq[i], s_seq[i], k);
    }
    x[i] = static_cast<std::uint8_t>(rng.categorical(row));
  }
  return x;
}

std::optional<std::size_t> decode_index(const BinningCodebook& cb,
                                        std::span<const std::uint8_t> yr_seq,
                                        const AuxTables& t) {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    if (jointly_typical(cb.sequence(i), yr_seq, t.uyr, t.nr, cb.epsilon())) {
      if (found) return std::nullopt;
      found = i;
    }
  }
  return found;
}

Sequence sample_states(const StateChannel& channel, std::size_t n, Rng& rng) {
  Sequence s(n);
  for (auto& v : s) v = static_cast<std::uint8_t>(rng.categorical(channel.state_pmf()));
  return s;
}

// Samples (yr, ye) cells of each (x, s) block by inverting the CDF over the
// cells in descending probability order. For symmetric channels this maps a
// given uniform draw to the same noise pattern whatever the input, so runs
// that differ only in their codebooks see common channel noise.
class ChannelSampler {
 public:
  explicit ChannelSampler(const StateChannel& channel)
      : channel_(channel), cells_(channel.yr_size() * channel.ye_size()) {
    const std::size_t blocks = channel.x_size() * channel.s_size();
    order_.resize(blocks * cells_);
    cdf_.resize(blocks * cells_);
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto block = channel.kernel().subspan(b * cells_, cells_);
      auto* ord = &order_[b * cells_];
      for (std::size_t c = 0; c < cells_; ++c) ord[c] = c;
      std::stable_sort(ord, ord + cells_,
                       [&](std::size_t a, std::size_t c) { return block[a] > block[c]; });
      double acc = 0.0;
      for (std::size_t c = 0; c < cells_; ++c) {
        acc += block[ord[c]];
        cdf_[b * cells_ + c] = acc;
      }
    }
  }

  // One channel use per symbol; returns (yr^n, ye^n).
  std::pair<Sequence, Sequence> transmit(std::span<const std::uint8_t> x,
                                         std::span<const std::uint8_t> s,
                                         Rng& rng) const {
    Sequence yr(x.size()), ye(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t b = x[i] * channel_.s_size() + s[i];
      const double r = rng.uniform();
      const double* cdf = &cdf_[b * cells_];
      const std::size_t* ord = &order_[b * cells_];
      std::size_t k = 0;
      while (k + 1 < cells_ && (r >= cdf[k] || channel_.kernel()[b * cells_ + ord[k]] <= 0.0)) {
        ++k;
      }
      // Never land on a zero-probability tail cell through rounding.
      while (k > 0 && channel_.kernel()[b * cells_ + ord[k]] <= 0.0) --k;
      const std::size_t cell = ord[k];
      yr[i] = static_cast<std::uint8_t>(cell / channel_.ye_size());
      ye[i] = static_cast<std::uint8_t>(cell % channel_.ye_size());
    }
    return {std::move(yr), std::move(ye)};
  }

 private:
  const StateChannel& channel_;
  std::size_t cells_;
  std::vector<std::size_t> order_;
  std::vector<double> cdf_;
};

// Distribution of an i.i.d. sequence over all |A|^n outcomes given the
// per-position rows, built as a running tensor product (index little-endian).
void product_distribution(std::span<const double* const> rows, std::size_t alphabet,
                          std::vector<double>& out) {
  out.assign(1, 1.0);
  std::size_t stride = 1;
  std::vector<double> next;
  for (const double* row : rows) {
    next.assign(out.size() * alphabet, 0.0);
    for (std::size_t a = 0; a < alphabet; ++a) {
      if (row[a] == 0.0) continue;
      for (std::size_t k = 0; k < out.size(); ++k) next[a * stride + k] = out[k] * row[a];
    }
    out.swap(next);
    stride *= alphabet;
  }
}

// I(K; Y) from a dense joint table laid out [k][y].
double table_information(const std::vector<double>& joint, std::size_t k_size,
                         std::size_t y_size) {
  return mutual_information_2d(joint, k_size, y_size);
}

}  // namespace

void SimConfig::validate() const {
  if (n < 1 || n > kMaxBlockLength) {
    throw DomainError("SimConfig: n must lie in [1, " +
                      std::to_string(kMaxBlockLength) + "]");
  }
  if (!(epsilon > 0.0)) throw DomainError("SimConfig: epsilon must be > 0");
  if (!(rate_margin > 0.0)) throw DomainError("SimConfig: rate_margin must be > 0");
  if (trials < 1) throw DomainError("SimConfig: trials must be >= 1");
}

BinningCodebook::BinningCodebook(std::size_t n, std::size_t u_size, double epsilon,
                                 std::vector<std::uint8_t> symbols,
                                 std::vector<std::size_t> bin_of,
                                 std::size_t bin_count, CodebookRates rates)
    : n_(n),
      u_size_(u_size),
      epsilon_(epsilon),
      symbols_(std::move(symbols)),
      bin_of_(std::move(bin_of)),
      bin_count_(bin_count),
      rates_(rates) {
  if (n_ == 0 || u_size_ == 0 || u_size_ > kMaxAlphabet) {
    throw ShapeError("BinningCodebook: invalid block length or alphabet");
  }
  if (symbols_.size() != bin_of_.size() * n_) {
    throw ShapeError("BinningCodebook: symbol count does not match codewords");
  }
  if (bin_count_ == 0) throw ShapeError("BinningCodebook: bin count must be >= 1");
  for (auto v : symbols_) {
    if (v >= u_size_) throw ShapeError("BinningCodebook: symbol out of range");
  }
  for (auto b : bin_of_) {
    if (b >= bin_count_) throw ShapeError("BinningCodebook: bin index out of range");
  }
}

bool jointly_typical(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                     std::span<const double> p_ab, std::size_t b_size,
                     double epsilon) {
  if (a.size() != b.size()) throw ShapeError("jointly_typical: length mismatch");
  const double n = static_cast<double>(a.size());
  std::vector<std::size_t> counts(p_ab.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t cell = a[i] * b_size + b[i];
    if (cell >= p_ab.size() || p_ab[cell] <= 0.0) return false;
    ++counts[cell];
  }
  for (std::size_t c = 0; c < p_ab.size(); ++c) {
    if (std::abs(static_cast<double>(counts[c]) / n - p_ab[c]) > epsilon) return false;
  }
  return true;
}

BinningCodebook build_codebook(const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy,
                               const SimConfig& cfg) {
  cfg.validate();
  require_matching(channel, policy);
  const auto info = aux_information(channel, policy);
  const double n = static_cast<double>(cfg.n);

  const double total_exp = n * (info.u_yr - cfg.rate_margin);
  if (total_exp > std::log2(static_cast<double>(kMaxCodebookSize)) + 1e-9) {
    throw SizeError("codebook would hold 2^" + std::to_string(total_exp) +
                    " sequences (limit 2^20); use a smaller n or a larger margin");
  }

  std::vector<double> pu(policy.u_size(), 0.0);
  for (std::size_t s = 0; s < channel.s_size(); ++s) {
    for (std::size_t u = 0; u < policy.u_size(); ++u) {
      pu[u] += channel.state_pmf()[s] * policy.u_given_s(s, u);
    }
  }
  const auto support = static_cast<double>(
      std::count_if(pu.begin(), pu.end(), [](double p) { return p > 0.0; }));
  const double distinct = std::pow(support, n);

  const auto count =
      static_cast<std::size_t>(std::min(bin_count_for(total_exp), distinct));
  const double target = info.u_yr - info.u_ye - cfg.rate_margin;
  const auto bins = std::min(
      static_cast<std::size_t>(bin_count_for(n * target)), count);

  Rng rng = Rng::derive(cfg.seed, 0, kTagCodebook);
  std::vector<std::uint8_t> symbols;
  symbols.reserve(count * cfg.n);
  std::set<Sequence> seen;
  Sequence seq(cfg.n);
  while (seen.size() < count) {
    for (auto& v : seq) v = static_cast<std::uint8_t>(rng.categorical(pu));
    if (seen.insert(seq).second) symbols.insert(symbols.end(), seq.begin(), seq.end());
  }

  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<std::size_t> bin_of(count);
  for (std::size_t i = 0; i < count; ++i) bin_of[order[i]] = i % bins;

  CodebookRates rates;
  rates.total_rate = std::log2(static_cast<double>(count)) / n;
  rates.key_rate = std::log2(static_cast<double>(bins)) / n;
  rates.per_bin_rate = rates.total_rate - rates.key_rate;
  rates.target_key_rate = target;
  return BinningCodebook(cfg.n, policy.u_size(), cfg.epsilon, std::move(symbols),
                         std::move(bin_of), bins, rates);
}

std::optional<Encoding> encode(const BinningCodebook& codebook,
                               const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy,
                               std::span<const std::uint8_t> s_seq, Rng& rng) {
  const auto tables = aux_tables(channel, policy);
  require_length(s_seq, codebook.n(), channel.s_size(), "encode");
  const auto pick = choose_codeword(codebook, s_seq, tables, rng);
  if (!pick) return std::nullopt;
  Encoding e;
  e.codeword = *pick;
  const auto u = codebook.sequence(*pick);
  e.u_seq.assign(u.begin(), u.end());
  e.x_seq = sample_inputs(policy, u, s_seq, rng);
  return e;
}

std::optional<Decoding> decode(const BinningCodebook& codebook,
                               const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy,
                               std::span<const std::uint8_t> yr_seq) {
  const auto tables = aux_tables(channel, policy);
  require_length(yr_seq, codebook.n(), channel.yr_size(), "decode");
  const auto idx = decode_index(codebook, yr_seq, tables);
  if (!idx) return std::nullopt;
  Decoding d;
  d.codeword = *idx;
  const auto u = codebook.sequence(*idx);
  d.u_seq.assign(u.begin(), u.end());
  d.key = codebook.bin_of(*idx);
  return d;
}

double exact_leakage(const BinningCodebook& codebook, const StateChannel& channel,
                     const AuxiliaryEncoderPolicy& policy, const SimConfig& cfg,
                     KeyMap key_map) {
  const auto tables = aux_tables(channel, policy);
  const std::size_t n = codebook.n();
  const std::size_t ns = channel.s_size(), ne = channel.ye_size();
  const double atoms = std::pow(static_cast<double>(ns), static_cast<double>(n)) *
                       static_cast<double>(codebook.size()) *
                       std::pow(static_cast<double>(ne), static_cast<double>(n));
  if (atoms > kLeakageBudget) {
    throw SizeError("exact leakage needs " + format_count(atoms) +
                    " atoms (limit 1e8); reduce n");
  }
  if (cfg.n != n) throw ShapeError("exact_leakage: cfg.n differs from the codebook");
  const std::size_t keys =
      key_map == KeyMap::bin_index ? codebook.bin_count() : codebook.size();
  if (keys == 1) return 0.0;  // constant key

  // p(ye | u, s) = sum_x p(x | u, s) p(ye | x, s), laid out [u][s][ye].
  std::vector<double> ye_given_us(tables.nu * ns * ne, 0.0);
  for (std::size_t u = 0; u < tables.nu; ++u) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t x = 0; x < channel.x_size(); ++x) {
        const double w = policy.x_given_us(u, s, x);
        if (w == 0.0) continue;
        for (std::size_t e = 0; e < ne; ++e) {
          ye_given_us[(u * ns + s) * ne + e] += w * channel.ye_marginal(x, s, e);
        }
      }
    }
  }

  const auto ye_count = static_cast<std::size_t>(
      std::pow(static_cast<double>(ne), static_cast<double>(n)));
  std::vector<double> joint(keys * ye_count, 0.0);

  Sequence s_seq(n, 0);
  std::vector<const double*> rows(n);
  std::vector<double> dist;
  std::vector<std::size_t> all(codebook.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  while (true) {
    double ps = 1.0;
    for (auto s : s_seq) ps *= channel.state_pmf()[s];
    if (ps > 0.0) {
      auto chosen = typical_codewords(codebook, s_seq, tables);
      if (chosen.empty()) chosen = all;
      const double w = ps / static_cast<double>(chosen.size());
      for (std::size_t c : chosen) {
        const auto u = codebook.sequence(c);
        for (std::size_t i = 0; i < n; ++i) {
          rows[i] = &ye_given_us[(u[i] * ns + s_seq[i]) * ne];
        }
        product_distribution(rows, ne, dist);
        const std::size_t k = key_map == KeyMap::bin_index ? codebook.bin_of(c) : c;
        double* out = &joint[k * ye_count];
        for (std::size_t y = 0; y < ye_count; ++y) out[y] += w * dist[y];
      }
    }
    std::size_t i = 0;
    while (i < n && ++s_seq[i] == ns) s_seq[i++] = 0;
    if (i == n) break;
  }
  return table_information(joint, keys, ye_count) / static_cast<double>(n);
}

SimReport run_no_discussion(const StateChannel& channel,
                            const AuxiliaryEncoderPolicy& policy,
                            const SimConfig& cfg) {
  cfg.validate();
  const auto codebook = build_codebook(channel, policy, cfg);
  const auto tables = aux_tables(channel, policy);
  const ChannelSampler sampler(channel);

  SimReport report;
  report.trials = cfg.trials;
  report.codebook_size = codebook.size();
  report.key_bins = codebook.bin_count();
  report.operating_key_rate = codebook.rates().key_rate;

  std::size_t disagree = 0, enc_fail = 0, recovered = 0;
  std::map<std::size_t, std::size_t> key_hist;
  std::map<std::pair<std::size_t, Sequence>, std::size_t> key_ye_hist;
  std::map<Sequence, std::size_t> ye_hist;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng state_rng = Rng::derive(cfg.seed, t, kTagState);
    Rng enc_rng = Rng::derive(cfg.seed, t, kTagEncoder);
    Rng ch_rng = Rng::derive(cfg.seed, t, kTagChannel);

    const Sequence s = sample_states(channel, cfg.n, state_rng);
    auto pick = choose_codeword(codebook, s, tables, enc_rng);
    const bool encoded = pick.has_value();
    if (!encoded) {
      ++enc_fail;
      pick = enc_rng.below(codebook.size());
    }
    const auto u = codebook.sequence(*pick);
    const Sequence x = sample_inputs(policy, u, s, enc_rng);
    const auto [yr, ye] = sampler.transmit(x, s, ch_rng);

    const std::size_t key = codebook.bin_of(*pick);
    const auto decoded = decode_index(codebook, yr, tables);
    if (decoded && *decoded == *pick) ++recovered;
    if (!encoded || !decoded || codebook.bin_of(*decoded) != key) ++disagree;

    ++key_hist[key];
    ++key_ye_hist[{key, ye}];
    ++ye_hist[ye];
  }

  const double trials = static_cast<double>(cfg.trials);
  const double n = static_cast<double>(cfg.n);
  report.disagreement_prob = static_cast<double>(disagree) / trials;
  report.encode_failure_rate = static_cast<double>(enc_fail) / trials;
  report.reconstruction_rate = static_cast<double>(recovered) / trials;
  report.achieved_key_rate = entropy_of_counts(key_hist, trials) / n;

  try {
    report.leakage_bits_per_symbol = exact_leakage(codebook, channel, policy, cfg);
    report.leakage_method = LeakageMethod::exact;
  } catch (const SizeError&) {
    const double plug_in = entropy_of_counts(key_hist, trials) +
                           entropy_of_counts(ye_hist, trials) -
                           entropy_of_counts(key_ye_hist, trials);
    report.leakage_bits_per_symbol = std::max(0.0, plug_in) / n;
    report.leakage_method = LeakageMethod::plug_in_estimate;
  }
  return report;
}

// ---------------------------------------------------------------------------
// One-round discussion

namespace {

struct RoundLaws {
  std::size_t nx, ns, nr, ne;
  std::vector<double> yr_given_xs;  // [x*S+s][yr]
  std::vector<double> q;            // p(yr, ye) single-letter
  double h_yr_given_xs = 0.0, i_yr_xs = 0.0, i_yr_ye = 0.0;
};

RoundLaws round_laws(const StateChannel& channel, const InputPolicy& policy) {
  if (policy.s_size() != channel.s_size() || policy.x_size() != channel.x_size()) {
    throw ShapeError("input policy alphabets do not match channel");
  }
  if (channel.s_size() > kMaxAlphabet || channel.x_size() > kMaxAlphabet ||
      channel.yr_size() > kMaxAlphabet || channel.ye_size() > kMaxAlphabet) {
    throw SizeError("simulation alphabets are limited to 256 symbols");
  }
  RoundLaws l{channel.x_size(), channel.s_size(), channel.yr_size(),
              channel.ye_size(), {}, {}};
  l.yr_given_xs.resize(l.nx * l.ns * l.nr);
  l.q.assign(l.nr * l.ne, 0.0);
  const JointPmf joint = induce_joint(channel, policy);
  for (std::size_t x = 0; x < l.nx; ++x) {
    for (std::size_t s = 0; s < l.ns; ++s) {
      const double w = channel.state_pmf()[s] * policy.x_given_s(s, x);
      for (std::size_t r = 0; r < l.nr; ++r) {
        l.yr_given_xs[(x * l.ns + s) * l.nr + r] = channel.yr_marginal(x, s, r);
        for (std::size_t e = 0; e < l.ne; ++e) {
          l.q[r * l.ne + e] += w * channel.kernel(x, s, r, e);
        }
      }
    }
  }
  l.i_yr_xs = mutual_information(joint, {Var::Yr}, {Var::X, Var::S});
  l.h_yr_given_xs = std::max(0.0, entropy(joint, {Var::Yr}) - l.i_yr_xs);
  l.i_yr_ye = mutual_information(joint, {Var::Yr}, {Var::Ye});
  return l;
}

RoundBins bins_for(const RoundLaws& l, const SimConfig& cfg, std::uint64_t space) {
  const double n = static_cast<double>(cfg.n);
  RoundBins b;
  // A receiver output determined by (x, s) needs no public message.
  const double pub = l.h_yr_given_xs <= 1e-12
                         ? 1.0
                         : bin_count_for(n * (l.h_yr_given_xs + cfg.rate_margin));
  b.public_bins = static_cast<std::size_t>(std::min(pub, static_cast<double>(space)));
  const double keys = bin_count_for(n * (l.i_yr_xs - l.i_yr_ye - cfg.rate_margin));
  const double room = std::ceil(static_cast<double>(space) /
                                static_cast<double>(b.public_bins));
  b.key_bins = static_cast<std::size_t>(std::min(keys, room));
  return b;
}

std::uint64_t receiver_space(const StateChannel& channel, std::size_t n) {
  const auto space = power(channel.yr_size(), n);
  if (!space) throw SizeError("receiver sequence space exceeds 2^62");
  return *space;
}

// Receiver sequences conditionally typical with (x^n, s^n) lying in public
// bin `bin`; stops after `limit` matches.
class Reconstructor {
 public:
  Reconstructor(const RoundLaws& laws, double epsilon)
      : l_(laws), eps_(epsilon) {}

  std::vector<Sequence> find(std::span<const std::uint8_t> x,
                             std::span<const std::uint8_t> s, const RoundBins& bins,
                             std::size_t bin, std::size_t limit) {
    const std::size_t n = x.size();
    const std::size_t na = l_.nx * l_.ns;
    a_.resize(n);
    std::vector<std::size_t> na_count(na, 0);
    for (std::size_t i = 0; i < n; ++i) {
      a_[i] = x[i] * l_.ns + s[i];
      ++na_count[a_[i]];
    }
    // Allowed count window per (a, b): |N(a,b) - N(a) p(b|a)| <= n eps.
    lo_.assign(na * l_.nr, 0);
    hi_.assign(na * l_.nr, 0);
    const double slack = static_cast<double>(n) * eps_;
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < l_.nr; ++b) {
        const double p = l_.yr_given_xs[a * l_.nr + b];
        if (p <= 0.0) continue;
        const double centre = static_cast<double>(na_count[a]) * p;
        lo_[a * l_.nr + b] = static_cast<long>(std::ceil(centre - slack - 1e-9));
        hi_[a * l_.nr + b] = static_cast<long>(std::floor(centre + slack + 1e-9));
        lo_[a * l_.nr + b] = std::max(0L, lo_[a * l_.nr + b]);
      }
    }
    remaining_ = na_count;
    counts_.assign(na * l_.nr, 0);
    current_.assign(n, 0);
    found_.clear();
    bins_ = &bins;
    bin_ = bin;
    limit_ = limit;
    search(0);
    return found_;
  }

 private:
  void search(std::size_t i) {
    if (found_.size() >= limit_) return;
    if (i == current_.size()) {
      if (bins_->bin(sequence_index(current_, l_.nr)) == bin_) found_.push_back(current_);
      return;
    }
    const std::size_t a = a_[i];
    --remaining_[a];
    for (std::size_t b = 0; b < l_.nr; ++b) {
      const std::size_t cell = a * l_.nr + b;
      if (l_.yr_given_xs[cell] <= 0.0 || counts_[cell] + 1 > hi_[cell]) continue;
      ++counts_[cell];
      if (lower_bounds_reachable(a)) {
        current_[i] = static_cast<std::uint8_t>(b);
        search(i + 1);
      }
      --counts_[cell];
      if (found_.size() >= limit_) break;
    }
    ++remaining_[a];
  }

  bool lower_bounds_reachable(std::size_t a) const {
    long need = 0;
    for (std::size_t b = 0; b < l_.nr; ++b) {
      need += std::max(0L, lo_[a * l_.nr + b] - counts_[a * l_.nr + b]);
    }
    return need <= static_cast<long>(remaining_[a]);
  }

  const RoundLaws& l_;
  double eps_;
  std::vector<std::size_t> a_;
  std::vector<long> lo_, hi_, counts_;
  std::vector<std::size_t> remaining_;
  Sequence current_;
  std::vector<Sequence> found_;
  const RoundBins* bins_ = nullptr;
  std::size_t bin_ = 0, limit_ = 0;
};

// I(K; Ye^n, public bin) / n with (yr^n, ye^n) i.i.d. from p(yr, ye).
double round_leakage(const RoundLaws& l, const RoundBins& bins, std::size_t n) {
  const double atoms = std::pow(static_cast<double>(l.nr), static_cast<double>(n)) *
                       std::pow(static_cast<double>(l.ne), static_cast<double>(n));
  if (atoms > kLeakageBudget) {
    throw SizeError("exact leakage needs " + format_count(atoms) +
                    " atoms (limit 1e8); reduce n");
  }
  if (bins.key_bins == 1) return 0.0;  // constant key
  const auto ye_count = static_cast<std::size_t>(
      std::pow(static_cast<double>(l.ne), static_cast<double>(n)));
  const std::size_t view = bins.public_bins * ye_count;
  std::vector<double> joint(bins.key_bins * view, 0.0);
  Sequence yr(n, 0);
  std::vector<const double*> rows(n);
  std::vector<double> dist;
  std::uint64_t index = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = &l.q[yr[i] * l.ne];
    product_distribution(rows, l.ne, dist);
    double* out = &joint[(bins.key(index) * bins.public_bins + bins.bin(index)) * ye_count];
    for (std::size_t y = 0; y < ye_count; ++y) out[y] += dist[y];
    std::size_t i = 0;
    while (i < n && ++yr[i] == l.nr) yr[i++] = 0;
    if (i == n) break;
    ++index;
  }
  return table_information(joint, bins.key_bins, view) / static_cast<double>(n);
}

}  // namespace

RoundBins one_round_bins(const StateChannel& channel, const InputPolicy& policy,
                         const SimConfig& cfg) {
  cfg.validate();
  return bins_for(round_laws(channel, policy), cfg, receiver_space(channel, cfg.n));
}

SimReport run_one_round_discussion(const StateChannel& channel,
                                   const InputPolicy& policy, const SimConfig& cfg) {
  cfg.validate();
  const RoundLaws laws = round_laws(channel, policy);
  const RoundBins bins = bins_for(laws, cfg, receiver_space(channel, cfg.n));

  SimReport report;
  report.trials = cfg.trials;
  report.key_bins = bins.key_bins;
  report.public_bins = bins.public_bins;
  report.operating_key_rate =
      std::log2(static_cast<double>(bins.key_bins)) / static_cast<double>(cfg.n);

  Reconstructor reconstructor(laws, cfg.epsilon);
  const ChannelSampler sampler(channel);
  std::size_t disagree = 0, recovered = 0, mistaken = 0;
  std::map<std::size_t, std::size_t> key_hist;
  std::map<std::pair<std::size_t, Sequence>, std::size_t> key_view_hist;
  std::map<Sequence, std::size_t> view_hist;
  std::vector<double> row(channel.x_size());
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng state_rng = Rng::derive(cfg.seed, t, kTagState);
    Rng enc_rng = Rng::derive(cfg.seed, t, kTagEncoder);
    Rng ch_rng = Rng::derive(cfg.seed, t, kTagChannel);

    const Sequence s = sample_states(channel, cfg.n, state_rng);
    Sequence x(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      for (std::size_t k = 0; k < row.size(); ++k) row[k] = policy.x_given_s(s[i], k);
      x[i] = static_cast<std::uint8_t>(enc_rng.categorical(row));
    }
    const auto [yr, ye] = sampler.transmit(x, s, ch_rng);

    const std::uint64_t index = sequence_index(yr, channel.yr_size());
    const std::size_t bin = bins.bin(index);
    const std::size_t key = bins.key(index);
    const auto matches = reconstructor.find(x, s, bins, bin, 2);
    const bool unique = matches.size() == 1;
    if (unique) ++(matches.front() == yr ? recovered : mistaken);
    if (!unique || bins.key(sequence_index(matches.front(), channel.yr_size())) != key) {
      ++disagree;
    }

    Sequence view(ye);
    for (std::size_t shift = 0; shift < 64; shift += 8) {
      view.push_back(static_cast<std::uint8_t>((bin >> shift) & 0xff));
    }
    ++key_hist[key];
    ++key_view_hist[{key, view}];
    ++view_hist[view];
  }

  const double trials = static_cast<double>(cfg.trials);
  const double n = static_cast<double>(cfg.n);
  report.disagreement_prob = static_cast<double>(disagree) / trials;
  report.reconstruction_rate = static_cast<double>(recovered) / trials;
  report.misreconstruction_rate = static_cast<double>(mistaken) / trials;
  report.achieved_key_rate = entropy_of_counts(key_hist, trials) / n;
  try {
    report.leakage_bits_per_symbol = round_leakage(laws, bins, cfg.n);
    report.leakage_method = LeakageMethod::exact;
  } catch (const SizeError&) {
    const double plug_in = entropy_of_counts(key_hist, trials) +
                           entropy_of_counts(view_hist, trials) -
                           entropy_of_counts(key_view_hist, trials);
    report.leakage_bits_per_symbol = std::max(0.0, plug_in) / n;
    report.leakage_method = LeakageMethod::plug_in_estimate;
  }
  return report;
}

}  // namespace skcap
