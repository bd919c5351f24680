#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skcap/channel.hpp"
#include "skcap/random.hpp"

namespace skcap {

enum class SimMode { no_discussion, one_round_discussion };

struct SimConfig {
  std::size_t n = 8;
  double epsilon = 0.05;
  double rate_margin = 0.2;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::no_discussion;

  /// Throws DomainError unless 1 <= n <= kMaxBlockLength, epsilon > 0,
  /// rate_margin > 0 and trials >= 1.
  void validate() const;
};

inline constexpr std::size_t kMaxBlockLength = 24;
/// Largest codebook build_codebook will draw.
inline constexpr std::size_t kMaxCodebookSize = std::size_t{1} << 20;
/// Largest number of atoms an exact leakage enumeration may visit.
inline constexpr double kLeakageBudget = 1e8;

/// A fixed-length symbol sequence over a small alphabet.
using Sequence = std::vector<std::uint8_t>;

struct CodebookRates {
  double total_rate = 0.0;    ///< log2(codebook size) / n
  double key_rate = 0.0;      ///< log2(bin count) / n
  double per_bin_rate = 0.0;  ///< log2(size / bins) / n
  /// I(U;Yr) - I(U;Ye) - margin, the rate the bin count was sized for.
  double target_key_rate = 0.0;
};

/// Random-binning codebook of u-sequences; the key is the bin index.
class BinningCodebook {
 public:
  /// `symbols` holds the codewords back to back (size = count * n).
  BinningCodebook(std::size_t n, std::size_t u_size, double epsilon,
                  std::vector<std::uint8_t> symbols,
                  std::vector<std::size_t> bin_of, std::size_t bin_count,
                  CodebookRates rates);

  std::size_t n() const { return n_; }
  std::size_t u_size() const { return u_size_; }
  double epsilon() const { return epsilon_; }
  std::size_t size() const { return bin_of_.size(); }
  std::size_t bin_count() const { return bin_count_; }
  std::span<const std::uint8_t> sequence(std::size_t i) const {
    return std::span<const std::uint8_t>(symbols_).subspan(i * n_, n_);
  }
  std::size_t bin_of(std::size_t i) const { return bin_of_[i]; }
  const CodebookRates& rates() const { return rates_; }

 private:
  std::size_t n_, u_size_;
  double epsilon_;
  std::vector<std::uint8_t> symbols_;
  std::vector<std::size_t> bin_of_;
  std::size_t bin_count_;
  CodebookRates rates_;
};

/// Strong typicality of the pair (a, b) against the joint law `p_ab`
/// (laid out [a][b]): every cell's empirical frequency is within `epsilon`
/// of its probability, and cells of probability zero never occur.
bool jointly_typical(std::span<const std::uint8_t> a,
                     std::span<const std::uint8_t> b,
                     std::span<const double> p_ab, std::size_t b_size,
                     double epsilon);

/// Draws ceil(2^(n(I(U;Yr) - margin))) distinct sequences i.i.d. from p(u)
/// and partitions them evenly at random into
/// ceil(2^(n(I(U;Yr) - I(U;Ye) - margin))) bins (at least one).
/// Throws SizeError when the codebook would exceed kMaxCodebookSize.
BinningCodebook build_codebook(const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy,
                               const SimConfig& cfg);

struct Encoding {
  std::size_t codeword = 0;
  Sequence u_seq;
  Sequence x_seq;
};

/// Picks a codeword uniformly among those typical with `s_seq` under
/// p(u, s) and samples x per symbol from p(x | u, s). Returns nullopt when
/// no codeword is typical.
std::optional<Encoding> encode(const BinningCodebook& codebook,
                               const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy,
                               std::span<const std::uint8_t> s_seq, Rng& rng);

struct Decoding {
  std::size_t codeword = 0;
  Sequence u_seq;
  std::size_t key = 0;
};

/// The unique codeword typical with `yr_seq` under p(u, yr) and its bin.
/// Returns nullopt when none or several qualify.
std::optional<Decoding> decode(const BinningCodebook& codebook,
                               const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy,
                               std::span<const std::uint8_t> yr_seq);

enum class KeyMap {
  bin_index,       ///< key = bin of the transmitted codeword
  codeword_index,  ///< key = the codeword itself (no binning)
};

/// I(K; Ye^n) / n by exhaustive enumeration of s^n, the encoder's choice and
/// ye^n. When no codeword is typical with s^n the encoder falls back to a
/// uniform codeword, as in run_no_discussion. Throws SizeError when
/// |S|^n * size * |Ye|^n exceeds kLeakageBudget.
double exact_leakage(const BinningCodebook& codebook, const StateChannel& channel,
                     const AuxiliaryEncoderPolicy& policy, const SimConfig& cfg,
                     KeyMap key_map = KeyMap::bin_index);

enum class LeakageMethod { exact, plug_in_estimate };

struct SimReport {
  std::size_t trials = 0;
  /// Fraction of trials with K != L, counting encoder and decoder failures.
  double disagreement_prob = 0.0;
  double leakage_bits_per_symbol = 0.0;
  LeakageMethod leakage_method = LeakageMethod::exact;
  /// Empirical H(K) / n of the key over the trials.
  double achieved_key_rate = 0.0;
  /// Fraction of trials with no codeword typical with s^n.
  double encode_failure_rate = 0.0;
  /// Fraction of trials where the decoder (no discussion) or the sender's
  /// reconstruction (one round) found a unique sequence.
  double reconstruction_rate = 0.0;
  /// Fraction of trials where the sender's lookup was unique but returned a
  /// sequence other than the receiver's (one round only).
  double misreconstruction_rate = 0.0;
  /// log2(key bins) / n.
  double operating_key_rate = 0.0;
  std::size_t codebook_size = 0;
  std::size_t key_bins = 0;
  /// Number of public-message bins (one-round mode only).
  std::size_t public_bins = 0;
};

/// Random-binning key agreement without discussion, over cfg.trials
/// independent episodes. Leakage is exact when the enumeration budget
/// permits, else a plug-in estimate from the trials.
SimReport run_no_discussion(const StateChannel& channel,
                            const AuxiliaryEncoderPolicy& policy,
                            const SimConfig& cfg);

/// One-round scheme: the receiver publishes the bin of yr^n among
/// ceil(2^(n(H(Yr|X,S) + margin))) bins, the sender recovers yr^n by
/// conditional typicality with (x^n, s^n), and both keep its sub-bin among
/// ceil(2^(n(I(Yr;X,S) - I(Yr;Ye) - margin))) sub-bins. Leakage is
/// I(K; Ye^n, bin) / n.
SimReport run_one_round_discussion(const StateChannel& channel,
                                   const InputPolicy& policy,
                                   const SimConfig& cfg);

/// Public bin and key sub-bin of a receiver sequence index for the
/// one-round scheme.
struct RoundBins {
  std::size_t public_bins = 1;
  std::size_t key_bins = 1;
  std::size_t bin(std::uint64_t index) const { return index % public_bins; }
  std::size_t key(std::uint64_t index) const {
    return (index / public_bins) % key_bins;
  }
};

/// Bin counts the one-round scheme uses for this channel and input.
RoundBins one_round_bins(const StateChannel& channel, const InputPolicy& policy,
                         const SimConfig& cfg);

}  // namespace skcap
