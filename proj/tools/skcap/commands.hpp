#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace skcap::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,
  kExitBudget = 3,
};

enum class SweepAxis { snr, q, delta };

/// Gaussian sweep over one parameter in dB; the other two are fixed (dB).
struct SweepSpec {
  SweepAxis axis = SweepAxis::snr;
  double start_db = -10.0;
  double stop_db = 30.0;
  std::size_t points = 81;
  double p_db = 10.0;
  double q_db = 10.0;
  double delta_db = 10.0;

  /// Throws InputError unless points >= 2 and start_db < stop_db (finite).
  void validate() const;
};

struct SweepRow {
  double axis_db = 0.0;
  std::optional<double> lb;  ///< absent where P < 1
  double ub = 0.0;
  double cap_disc = 0.0;
  std::optional<double> gap;
};

double db_to_linear(double db);

std::vector<SweepRow> gaussian_sweep(const SweepSpec& spec);

/// CSV with header axis_value_db,lb,ub,cap_disc,gap; 12 significant digits,
/// LF line endings, empty cells where lb is undefined.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Whitespace-separated columns with a commented header; NaN marks gaps.
std::string sweep_gnuplot(const std::vector<SweepRow>& rows);

/// Fixed sweeps behind the two figure panels: "left" sweeps SNR with
/// Q = Delta = 10, "right" sweeps Delta with P = Q = 10 (linear).
SweepSpec figure_panel(const std::string& panel);

/// Path of the gnuplot data file written next to a figure CSV.
std::filesystem::path gnuplot_path(const std::filesystem::path& csv);

/// Parses `args` (without the program name), runs the command and returns
/// its exit code. Library errors are reported on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skcap::cli
