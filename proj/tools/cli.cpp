#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hbml/choicedata.hpp"
#include "hbml/error.hpp"
#include "hbml/estimate.hpp"
#include "hbml/results.hpp"
#include "hbml/wtp.hpp"

namespace hbml::cli {
namespace {

struct RawFit {
  std::vector<std::string> positional;
  std::vector<std::string> fixed;
  std::vector<std::string> rand;
  std::string group;
  std::string id;
  std::string price;
  std::string sampler_random = "global";
  std::string sampler_fixed = "global";
  std::string from;
  std::string from_variance;
  std::string saving;
  std::string indsave;
  int indkeep = 0;
  std::string results;
};

void add_fit_options(CLI::App& sub, RawFit& raw, SamplerConfig& c, bool wtp) {
  sub.add_option("args", raw.positional, "data.csv depvar [fixed vars...]")->required();
  sub.add_option("--fixed", raw.fixed, "Variables with fixed coefficients (also accepted positionally)");
  sub.add_option("--rand", raw.rand, "Variables with random coefficients");
  sub.add_option("--group", raw.group, "Choice-occasion identifier")->required();
  sub.add_option("--id,--identifier", raw.id, "Decision-maker identifier")->required();
  if (wtp) sub.add_option("--price", raw.price, "Price variable (coefficient -exp(b))")->required();
  sub.add_option("--draws", c.draws, "Total draws")->capture_default_str();
  sub.add_option("--burn", c.burn, "Burn-in draws discarded")->capture_default_str();
  sub.add_option("--thin", c.thin, "Keep every #th draw")->capture_default_str();
  sub.add_flag("--jumble", c.jumble, "Randomly permute retained draws");
  sub.add_option("--drawsrandom", c.draws_random, "Kernel steps per pass, random coefs")
      ->capture_default_str();
  sub.add_option("--drawsfixed", c.draws_fixed, "Kernel steps per pass, fixed coefs")
      ->capture_default_str();
  sub.add_option("--arate-random", c.arate_random, "Target acceptance rate, random coefs")
      ->capture_default_str();
  sub.add_option("--arate-fixed", c.arate_fixed, "Target acceptance rate, fixed coefs")
      ->capture_default_str();
  sub.add_option("--sampler-random", raw.sampler_random, "global or mwg")->capture_default_str();
  sub.add_option("--sampler-fixed", raw.sampler_fixed, "global or mwg")->capture_default_str();
  sub.add_option("--damp-random", c.damp_random, "Adaptation damper, random coefs (0,1]")
      ->capture_default_str();
  sub.add_option("--damp-fixed", c.damp_fixed, "Adaptation damper, fixed coefs (0,1]")
      ->capture_default_str();
  sub.add_option("--from", raw.from, "Starting values: random means then fixed, comma-separated");
  sub.add_option("--from-variance", raw.from_variance, "CSV file with the starting covariance");
  sub.add_flag("--noisy", c.noisy, "Print a dot per pass and ln_fc(p) every 50 passes");
  sub.add_option("--saving", raw.saving, "Draw file (CSV)");
  sub.add_flag("--replace", c.replace, "Overwrite the draw file");
  sub.add_flag("--append", c.append, "Append to the draw file");
  sub.add_option("--indsave", raw.indsave, "Individual-level draw file (CSV)");
  sub.add_option("--indkeep", raw.indkeep, "Keep only the last # individual draws");
  sub.add_flag("--indwide", c.indwide, "One row per individual");
  sub.add_flag("--replaceind", c.replaceind, "Overwrite the individual draw file");
  sub.add_flag("--appendind", c.appendind, "Append to the individual draw file");
  sub.add_option("--seed", c.seed, "Random seed")->envname(kSeedEnv)->capture_default_str();
  sub.add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->capture_default_str();
  sub.add_option("--results", raw.results, "Write stored results as JSON");
}

void finish_fit(CliCommand& cmd, const RawFit& raw, bool wtp) {
  if (raw.positional.size() < 2) {
    throw ValidationError("fit needs a data file and a dependent variable");
  }
  cmd.data = raw.positional[0];
  ModelSpec spec;
  spec.depvar = raw.positional[1];
  spec.fixed_vars.assign(raw.positional.begin() + 2, raw.positional.end());
  spec.fixed_vars.insert(spec.fixed_vars.end(), raw.fixed.begin(), raw.fixed.end());
  spec.rand_vars = raw.rand;
  spec.group_var = raw.group;
  spec.id_var = raw.id;
  if (raw.rand.empty()) {
    throw ValidationError("at least one random-coefficient independent variable is required");
  }
  cmd.spec = wtp ? wtp::make_wtp_spec(spec, raw.price) : spec;
  cmd.spec.validate();

  auto& c = cmd.config;
  c.sampler_random = amcmc::parse_sampler_kind(raw.sampler_random);
  c.sampler_fixed = amcmc::parse_sampler_kind(raw.sampler_fixed);
  if (!raw.from.empty()) {
    const auto v = parse_vector(raw.from);
    c.from = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (!raw.from_variance.empty()) c.from_variance = read_matrix_csv(raw.from_variance);
  if (!raw.saving.empty()) c.saving = raw.saving;
  if (!raw.indsave.empty()) c.indsave = raw.indsave;
  if (raw.indkeep != 0) c.indkeep = raw.indkeep;
  if (!raw.results.empty()) cmd.results = raw.results;
  c.validate();
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t");
  const auto b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}

}  // namespace

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = csv::to_double(trim(item));
    if (!v) throw ValidationError("cannot parse '" + item + "' as a number");
    out.push_back(*v);
  }
  if (out.empty()) throw ValidationError("empty numeric list");
  return out;
}

Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_vector(row));
  if (rows.empty()) throw ValidationError("empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ValidationError("ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = csv::split_line(line);
    std::vector<double> values;
    bool numeric = true;
    for (const auto& c : cells) {
      const auto v = csv::to_double(c);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw ValidationError(path.string() + ": non-numeric matrix entry");
    }
    first = false;
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ValidationError(path.string() + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ValidationError(path.string() + ": ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

CliCommand parse(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse(static_cast<int>(argv.size()), argv.data());
}

CliCommand parse(int argc, const char* const* argv) {
  CliCommand cmd;
  CLI::App app{"Hierarchical Bayes mixed logit estimation"};
  app.require_subcommand(1);
  app.name("hbmixlogit");

  RawFit fit_raw;
  RawFit wtp_raw;
  SamplerConfig fit_config;
  SamplerConfig wtp_config;
  auto* fit = app.add_subcommand("fit", "Draw from the mixed logit posterior");
  add_fit_options(*fit, fit_raw, fit_config, false);
  auto* fitwtp = app.add_subcommand("fitwtp", "Draw from the WTP-space mixed logit posterior");
  add_fit_options(*fitwtp, wtp_raw, wtp_config, true);

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic mixed logit panel");
  std::string b_text;
  std::string w_text;
  std::string alpha_text;
  std::string sim_out;
  auto& s = cmd.simulation;
  sim->add_option("--persons", s.persons, "Decision makers")->required();
  sim->add_option("--occasions", s.occasions, "Choice occasions per person")->required();
  sim->add_option("--alts", s.alternatives, "Alternatives per occasion")->required();
  sim->add_option("--b", b_text, "Random-coefficient means, comma-separated")->required();
  sim->add_option("--W", w_text, "Covariance, rows separated by ';'")->required();
  sim->add_option("--alpha", alpha_text, "Fixed coefficients, comma-separated");
  sim->add_flag("--wtp", s.wtp, "WTP-space utilities; first b entry is the price parameter");
  sim->add_option("--covariate-sd", s.covariate_sd, "Standard deviation of covariates")
      ->capture_default_str();
  sim->add_option("--seed", s.seed, "Random seed")->envname(kSeedEnv)->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV")->required();

  auto* summ = app.add_subcommand("summarize", "Summarize a saved draw file");
  std::string summ_in;
  summ->add_option("draws", summ_in, "Draw file")->required();
  summ->add_option("--depvar", cmd.summarize.depvar, "Label for the table header")
      ->capture_default_str();

  auto* conv = app.add_subcommand("convert", "Expand case-format data to one row per alternative");
  std::string conv_in;
  std::string conv_out;
  auto& co = cmd.convert;
  conv->add_option("input", conv_in, "Case-format CSV")->required();
  conv->add_option("--choice", co.choice_var, "Variable holding the chosen level")->required();
  conv->add_option("--casevars", co.case_vars, "Case-specific variables")->required();
  conv->add_option("--id", co.id_var, "Identifier to carry through");
  conv->add_option("--gen", co.gen, "Name of the generated choice indicator")->capture_default_str();
  conv->add_option("--out", conv_out, "Output CSV")->required();
  conv->add_flag("--replace", co.replace, "Overwrite the output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    cmd.help = app.help();
    return cmd;
  } catch (const CLI::CallForAllHelp&) {
    cmd.help = app.help("", CLI::AppFormatMode::All);
    return cmd;
  } catch (const CLI::ParseError& e) {
    throw ValidationError(e.what());
  }

  if (fit->parsed()) {
    cmd.subcommand = Subcommand::Fit;
    cmd.config = fit_config;
    finish_fit(cmd, fit_raw, false);
  } else if (fitwtp->parsed()) {
    cmd.subcommand = Subcommand::FitWtp;
    cmd.config = wtp_config;
    finish_fit(cmd, wtp_raw, true);
  } else if (sim->parsed()) {
    cmd.subcommand = Subcommand::Simulate;
    const auto b = parse_vector(b_text);
    s.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    s.w = parse_matrix(w_text);
    if (!alpha_text.empty()) {
      const auto a = parse_vector(alpha_text);
      s.alpha = Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size()));
    } else {
      s.alpha = Vector();
    }
    cmd.simulate_out = sim_out;
  } else if (summ->parsed()) {
    cmd.subcommand = Subcommand::Summarize;
    cmd.summarize.input = summ_in;
  } else {
    cmd.subcommand = Subcommand::Convert;
    co.input = conv_in;
    co.output = conv_out;
  }
  return cmd;
}

int run(const CliCommand& command, std::ostream& out, std::ostream& err) {
  if (command.help) {
    out << *command.help;
    return kExitOk;
  }
  switch (command.subcommand) {
    case Subcommand::Fit:
    case Subcommand::FitWtp: {
      const auto data = load_long_csv(command.data, command.spec);
      SamplerConfig config = command.config;
      if (config.noisy) config.progress = &out;
      const auto est = estimate(data, command.spec, config);
      for (const auto& w : est.chain.report.warnings) err << "warning: " << w << '\n';
      out << est.table;
      if (command.results) export_stored_results(est.stored, *command.results);
      return kExitOk;
    }
    case Subcommand::Simulate: {
      const auto sim = simulate(command.simulation);
      write_simulation(sim, command.simulation, command.simulate_out);
      out << "wrote " << sim.data.rows() << " rows to " << command.simulate_out.string() << " and "
          << truth_path(command.simulate_out).string() << '\n';
      return kExitOk;
    }
    case Subcommand::Summarize: {
      const auto store = read_draw_file(command.summarize.input);
      out << render_coefficient_table(summarize_draws(store), store, command.summarize.depvar);
      out << "   " << store.rows() << " draws summarized (df = " << store.rows() << ")\n";
      return kExitOk;
    }
    case Subcommand::Convert: {
      const auto& co = command.convert;
      if (!co.replace && std::filesystem::exists(co.output)) {
        throw IoError("file " + co.output.string() + " already exists; specify replace");
      }
      const auto table = csv::read(co.input);
      const auto converted =
          case_to_alternatives(table, co.choice_var, co.case_vars, CaseConversionOptions{co.id_var});
      const std::string id = co.id_var.empty() ? "_id" : co.id_var;
      write_long_csv(converted.data, co.output, "_id", id, co.gen);
      out << "choice indicated by: " << co.gen << '\n';
      out << "case identifier: _id\n";
      out << "case-specific interactions:";
      for (std::size_t l = 1; l < converted.levels.size(); ++l) {
        const auto& name = converted.data.variable_names()[(l - 1) * (co.case_vars.size() + 1)];
        out << ' ' << name.substr(0, name.size() - co.case_vars[0].size() - 1) << '*';
      }
      out << '\n';
      return kExitOk;
    }
  }
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(parse(argc, argv), out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace hbml::cli
