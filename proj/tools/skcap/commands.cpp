#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "skcap/bounds_dmc.hpp"
#include "skcap/channel_file.hpp"
#include "skcap/errors.hpp"
#include "skcap/gaussian.hpp"
#include "skcap/protocol_sim.hpp"

namespace skcap::cli {

namespace {

using nlohmann::json;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) {
    throw InputError("cannot write " + path.string());
  }
}

// ---------------------------------------------------------------------------
// bounds-dmc

struct OptimizerFlags {
  std::size_t u_size = 0;
  std::size_t restarts = 8;
  std::size_t grid = 9;
  std::size_t local_steps = 400;
  std::uint64_t seed = 1;
  std::string domain = "general";

  OptimizerConfig config() const {
    OptimizerConfig cfg;
    cfg.u_size_max = u_size;
    cfg.restarts = restarts;
    cfg.grid_resolution = grid;
    cfg.local_steps = local_steps;
    cfg.seed = seed;
    cfg.domain = domain == "restricted" ? AuxDomain::restricted_u : AuxDomain::general_u;
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
    return cfg;
  }
};

void add_optimizer_flags(CLI::App& cmd, OptimizerFlags& f) {
  cmd.add_option("--u-size", f.u_size, "Auxiliary alphabet size (0: |X||S|+2)");
  cmd.add_option("--restarts", f.restarts, "Refined starts per search");
  cmd.add_option("--grid", f.grid, "Lattice resolution for seeding and couplings");
  cmd.add_option("--local-steps", f.local_steps, "Iteration cap per refinement");
  cmd.add_option("--seed", f.seed, "Random seed");
  cmd.add_option("--domain", f.domain, "Auxiliary domain")
      ->check(CLI::IsMember({"restricted", "general"}));
}

json flat_rows(std::span<const double> v, std::size_t row) {
  json out = json::array();
  for (std::size_t i = 0; i < v.size(); i += row) {
    out.push_back(std::vector<double>(v.begin() + static_cast<long>(i),
                                      v.begin() + static_cast<long>(i + row)));
  }
  return out;
}

json policy_json(const BoundPolicy& policy) {
  if (const auto* p = std::get_if<AuxiliaryEncoderPolicy>(&policy)) {
    json x = json::array();
    for (std::size_t u = 0; u < p->u_size(); ++u) {
      x.push_back(flat_rows(
          p->x_given_us().subspan(u * p->s_size() * p->x_size(), p->s_size() * p->x_size()),
          p->x_size()));
    }
    return {{"u_given_s", flat_rows(p->u_given_s(), p->u_size())}, {"x_given_us", x}};
  }
  if (const auto* p = std::get_if<InputPolicy>(&policy)) {
    return {{"x_given_s", flat_rows(p->x_given_s(), p->x_size())}};
  }
  return nullptr;
}

json bound_json(const BoundResult& r) {
  json out{{"value_bits", r.value_bits}, {"policy", policy_json(r.argmax_policy)}};
  if (r.constraint_slack_bits) out["constraint_slack_bits"] = *r.constraint_slack_bits;
  if (r.coupling) {
    const auto& c = *r.coupling;
    out["coupling"] = flat_rows(c.joint(), c.yr_size() * c.ye_size());
  }
  out["diagnostics"] = r.diagnostics;
  return out;
}

int cmd_bounds_dmc(const std::string& path, const OptimizerFlags& flags,
                   const std::string& out_path, std::ostream& out) {
  const ChannelFile file = read_channel_file(path);
  const OptimizerConfig cfg = flags.config();
  const StateChannel& ch = file.channel;

  json report;
  report["channel"] = {{"path", path},
                       {"sizes", {{"x", ch.x_size()}, {"s", ch.s_size()},
                                  {"yr", ch.yr_size()}, {"ye", ch.ye_size()}}}};
  if (file.name) report["channel"]["name"] = *file.name;
  report["config"] = {{"u_size", cfg.effective_u_size(ch)},
                      {"restarts", cfg.restarts},
                      {"grid", cfg.grid_resolution},
                      {"local_steps", cfg.local_steps},
                      {"seed", cfg.seed},
                      {"domain", flags.domain}};
  const auto lb = lower_bound_no_discussion(ch, cfg);
  const auto msg = secret_message_lower_bound(ch, cfg);
  report["lower_bound_no_discussion"] = bound_json(lb);
  report["secret_message_lower_bound"] = bound_json(msg);
  report["key_minus_message_bits"] = lb.value_bits - msg.value_bits;
  report["upper_bound_no_discussion"] = bound_json(upper_bound_no_discussion(ch, cfg));
  report["lower_bound_discussion"] = bound_json(lower_bound_discussion(ch, cfg));
  const auto ub_disc = upper_bound_discussion(ch, cfg);
  report["upper_bound_discussion"] = bound_json(ub_disc);
  const auto cap = discussion_capacity_if_markov(ch, cfg);
  report["discussion_capacity"] =
      cap ? json{{"applicable", true},
                 {"label", "capacity (outputs independent given x, s)"},
                 {"value_bits", cap->value_bits}}
          : json{{"applicable", false},
                 {"label", "not applicable (outputs correlated given x, s)"}};

  const std::string text = report.dump(2) + "\n";
  out << text;
  if (!out_path.empty()) write_file(out_path, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gaussian / figure

void warn_undefined_lb(const std::vector<SweepRow>& rows, std::ostream& err) {
  for (const auto& r : rows) {
    if (!r.lb) {
      err << "warning: lb and gap left empty where P < 1 (the lower bound needs P >= 1)\n";
      return;
    }
  }
}

int cmd_gaussian(const SweepSpec& spec, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  const auto rows = gaussian_sweep(spec);
  warn_undefined_lb(rows, err);
  const std::string csv = sweep_csv(rows);
  if (out_path.empty()) {
    out << csv;
  } else {
    write_file(out_path, csv);
  }
  return kExitOk;
}

int cmd_figure(const std::string& panel, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  const auto rows = gaussian_sweep(figure_panel(panel));
  warn_undefined_lb(rows, err);
  const std::filesystem::path csv(out_path);
  const auto dat = gnuplot_path(csv);
  write_file(csv, sweep_csv(rows));
  write_file(dat, sweep_gnuplot(rows));
  out << "wrote " << csv.string() << "\n" << "wrote " << dat.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimFlags {
  std::string mode = "no-disc";
  std::size_t n = 8;
  double epsilon = 0.05;
  double margin = 0.2;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string policy = "uniform";
  std::string policy_file;
  std::string csv;
};

AuxiliaryEncoderPolicy uniform_aux_policy(const StateChannel& ch) {
  const std::size_t nx = ch.x_size(), ns = ch.s_size();
  std::vector<double> u_given_s(ns * nx, 1.0 / static_cast<double>(nx));
  std::vector<double> x_given_us(nx * ns * nx, 0.0);
  for (std::size_t u = 0; u < nx; ++u) {
    for (std::size_t s = 0; s < ns; ++s) x_given_us[(u * ns + s) * nx + u] = 1.0;
  }
  return AuxiliaryEncoderPolicy(nx, ns, nx, std::move(u_given_s), std::move(x_given_us));
}

int cmd_simulate(const std::string& path, const SimFlags& f, const OptimizerFlags& opt,
                 std::ostream& out) {
  const ChannelFile file = read_channel_file(path);
  const StateChannel& ch = file.channel;
  SimConfig cfg;
  cfg.n = f.n;
  cfg.epsilon = f.epsilon;
  cfg.rate_margin = f.margin;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.mode = f.mode == "one-round" ? SimMode::one_round_discussion : SimMode::no_discussion;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }

  SimReport report;
  double reference = 0.0;
  std::optional<double> slack;
  if (cfg.mode == SimMode::no_discussion) {
    const AuxiliaryEncoderPolicy policy =
        !f.policy_file.empty()
            ? parse_aux_policy_json(read_text_file(f.policy_file), ch)
        : f.policy == "optimized"
            ? std::get<AuxiliaryEncoderPolicy>(
                  lower_bound_no_discussion(ch, opt.config()).argmax_policy)
            : uniform_aux_policy(ch);
    const auto info = aux_information(ch, policy);
    reference = info.u_yr - info.u_ye;
    slack = info.u_yr - info.u_s;
    report = run_no_discussion(ch, policy, cfg);
  } else {
    const InputPolicy policy =
        !f.policy_file.empty()
            ? parse_input_policy_json(read_text_file(f.policy_file), ch)
        : f.policy == "optimized"
            ? std::get<InputPolicy>(
                  discussion_rate_lower_bound(ch, opt.config()).argmax_policy)
            : InputPolicy::uniform(ch.s_size(), ch.x_size());
    reference = input_discussion_rate(ch, policy);
    report = run_one_round_discussion(ch, policy, cfg);
  }

  const char* method =
      report.leakage_method == LeakageMethod::exact ? "exact" : "plug_in_estimate";
  std::vector<std::pair<std::string, std::string>> fields = {
      {"mode", f.mode},
      {"n", std::to_string(cfg.n)},
      {"epsilon", fmt12(cfg.epsilon)},
      {"margin", fmt12(cfg.rate_margin)},
      {"trials", std::to_string(cfg.trials)},
      {"seed", std::to_string(cfg.seed)},
      {"codebook_size", std::to_string(report.codebook_size)},
      {"key_bins", std::to_string(report.key_bins)},
      {"public_bins", std::to_string(report.public_bins)},
      {"operating_key_rate", fmt12(report.operating_key_rate)},
      {"reference_rate_bits", fmt12(reference)},
      {"constraint_slack_bits", slack ? fmt12(*slack) : ""},
      {"disagreement_prob", fmt12(report.disagreement_prob)},
      {"encode_failure_rate", fmt12(report.encode_failure_rate)},
      {"reconstruction_rate", fmt12(report.reconstruction_rate)},
      {"misreconstruction_rate", fmt12(report.misreconstruction_rate)},
      {"achieved_key_rate", fmt12(report.achieved_key_rate)},
      {"leakage_bits_per_symbol", fmt12(report.leakage_bits_per_symbol)},
      {"leakage_method", method},
  };
  for (const auto& [k, v] : fields) out << k << ": " << v << "\n";
  if (!f.csv.empty()) {
    std::string header, row;
    for (const auto& [k, v] : fields) {
      header += (header.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") + v;
    }
    write_file(f.csv, header + "\n" + row + "\n");
  }
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

void SweepSpec::validate() const {
  for (double v : {start_db, stop_db, p_db, q_db, delta_db}) {
    if (!std::isfinite(v)) throw InputError("sweep: dB values must be finite");
  }
  if (points < 2) throw InputError("sweep: --points must be >= 2");
  if (!(start_db < stop_db)) throw InputError("sweep: --start-db must be below --stop-db");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<SweepRow> gaussian_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.points);
  for (std::size_t i = 0; i < spec.points; ++i) {
    SweepRow row;
    row.axis_db = i + 1 == spec.points
                      ? spec.stop_db
                      : spec.start_db + (spec.stop_db - spec.start_db) *
                                            static_cast<double>(i) /
                                            static_cast<double>(spec.points - 1);
    double p = db_to_linear(spec.p_db), q = db_to_linear(spec.q_db),
           d = db_to_linear(spec.delta_db);
    switch (spec.axis) {
      case SweepAxis::snr: p = db_to_linear(row.axis_db); break;
      case SweepAxis::q: q = db_to_linear(row.axis_db); break;
      case SweepAxis::delta: d = db_to_linear(row.axis_db); break;
    }
    const GaussianParams gp(p, q, d);
    row.ub = ub_no_discussion(gp);
    row.cap_disc = capacity_discussion(gp);
    if (p >= 1.0) {
      row.lb = lb_no_discussion(gp);
      row.gap = gap_analysis(gp).gap_bits;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "axis_value_db,lb,ub,cap_disc,gap\n";
  for (const auto& r : rows) {
    s += fmt12(r.axis_db) + "," + (r.lb ? fmt12(*r.lb) : "") + "," + fmt12(r.ub) + "," +
         fmt12(r.cap_disc) + "," + (r.gap ? fmt12(*r.gap) : "") + "\n";
  }
  return s;
}

std::string sweep_gnuplot(const std::vector<SweepRow>& rows) {
  std::string s = "# axis_value_db lb ub cap_disc gap\n";
  for (const auto& r : rows) {
    s += fmt12(r.axis_db) + " " + (r.lb ? fmt12(*r.lb) : "NaN") + " " + fmt12(r.ub) +
         " " + fmt12(r.cap_disc) + " " + (r.gap ? fmt12(*r.gap) : "NaN") + "\n";
  }
  return s;
}

SweepSpec figure_panel(const std::string& panel) {
  SweepSpec spec;
  spec.start_db = -10.0;
  spec.stop_db = 30.0;
  spec.points = 81;
  spec.p_db = spec.q_db = spec.delta_db = 10.0;
  if (panel == "left") {
    spec.axis = SweepAxis::snr;
  } else if (panel == "right") {
    spec.axis = SweepAxis::delta;
  } else {
    throw InputError("figure: --panel must be left or right");
  }
  return spec;
}

std::filesystem::path gnuplot_path(const std::filesystem::path& csv) {
  auto dat = csv;
  dat.replace_extension(".dat");
  if (dat == csv) dat += ".dat";
  return dat;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secret-key capacity bounds for wiretap channels with sender-known state"};
  app.name("skcap");
  app.require_subcommand(1);

  OptimizerFlags opt;
  std::string channel_path, out_path;
  auto* bounds = app.add_subcommand("bounds-dmc", "Evaluate all DMC bounds on a channel file");
  bounds->add_option("file", channel_path, "Channel JSON")->required();
  add_optimizer_flags(*bounds, opt);
  bounds->add_option("--out", out_path, "Also write the report here");

  SweepSpec sweep;
  std::string axis = "snr";
  auto* gauss = app.add_subcommand("gaussian", "Sweep the Gaussian bounds (CSV)");
  gauss->add_option("--axis", axis, "Swept parameter")
      ->check(CLI::IsMember({"snr", "q", "delta"}));
  gauss->add_option("--start-db", sweep.start_db)->required();
  gauss->add_option("--stop-db", sweep.stop_db)->required();
  gauss->add_option("--points", sweep.points);
  gauss->add_option("--p-db", sweep.p_db, "Fixed SNR P (dB)");
  gauss->add_option("--q-db", sweep.q_db, "Fixed interference Q (dB)");
  gauss->add_option("--delta-db", sweep.delta_db, "Fixed degradation Delta (dB)");
  gauss->add_option("--out", out_path, "Write the CSV here instead of stdout");

  SimFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate key agreement on a channel file");
  simulate->add_option("file", channel_path, "Channel JSON")->required();
  simulate->add_option("--mode", sim.mode)->check(CLI::IsMember({"no-disc", "one-round"}));
  simulate->add_option("--n", sim.n, "Block length");
  simulate->add_option("--epsilon", sim.epsilon, "Typicality slack");
  simulate->add_option("--margin", sim.margin, "Rate backoff (bits/symbol)");
  simulate->add_option("--trials", sim.trials);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--policy", sim.policy, "Encoder policy")
      ->check(CLI::IsMember({"uniform", "optimized"}));
  simulate->add_option("--policy-file", sim.policy_file, "Policy JSON");
  simulate->add_option("--csv", sim.csv, "Also write the report as CSV");
  simulate->add_option("--u-size", opt.u_size);
  simulate->add_option("--restarts", opt.restarts);
  simulate->add_option("--grid", opt.grid);
  simulate->add_option("--domain", opt.domain)
      ->check(CLI::IsMember({"restricted", "general"}));

  std::string panel;
  auto* figure = app.add_subcommand("figure", "Write a figure panel (CSV + gnuplot data)");
  figure->add_option("--panel", panel)->required()->check(CLI::IsMember({"left", "right"}));
  figure->add_option("--out", out_path, "CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*bounds) return cmd_bounds_dmc(channel_path, opt, out_path, out);
    if (*gauss) {
      sweep.axis = axis == "q" ? SweepAxis::q
                   : axis == "delta" ? SweepAxis::delta
                                     : SweepAxis::snr;
      return cmd_gaussian(sweep, out_path, out, err);
    }
    if (*simulate) return cmd_simulate(channel_path, sim, opt, out);
    if (*figure) return cmd_figure(panel, out_path, out, err);
  } catch (const SizeError& e) {
    err << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace skcap::cli
