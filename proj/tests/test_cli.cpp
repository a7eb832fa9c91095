#include "cli.hpp"
#include "doctest.h"
#include "hbml/error.hpp"
#include "hbml/estimate.hpp"
#include "json.hpp"
#include "support.hpp"

#include <cstdlib>
#include <sstream>

using namespace hbml;
using namespace hbml::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hbmixlogit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string section_table(const std::string& display) {
  const auto start = display.find("-------------");
  const auto end = display.find("   Draws saved");
  return display.substr(start, end - start);
}

}  // namespace

TEST_CASE("fit command with fixed and random variables") {
  const auto cmd = parse({"hbmixlogit", "fit", "data.csv", "choice", "--rand", "dealer", "--group",
                          "id", "--id", "id", "--draws", "4000", "--burn", "1000", "--thin", "5",
                          "--arate-random", "0.4", "--saving", "choice_draws.csv", "--replace"});
  CHECK(cmd.subcommand == Subcommand::Fit);
  CHECK(cmd.data == "data.csv");
  CHECK(cmd.spec.depvar == "choice");
  CHECK(cmd.spec.rand_vars == std::vector<std::string>{"dealer"});
  CHECK(cmd.spec.fixed_vars.empty());
  CHECK(cmd.spec.group_var == "id");
  CHECK(cmd.spec.id_var == "id");
  CHECK(cmd.config.draws == 4000);
  CHECK(cmd.config.burn == 1000);
  CHECK(cmd.config.thin == 5);
  CHECK(cmd.config.retained() == 600);
  CHECK(cmd.config.arate_random == 0.4);
  CHECK(cmd.config.arate_fixed == 0.234);
  CHECK(cmd.config.damp_random == 1.0);
  CHECK(cmd.config.sampler_random == amcmc::SamplerKind::Global);
  CHECK(cmd.config.saving == std::filesystem::path("choice_draws.csv"));
  CHECK(cmd.config.replace);
}

TEST_CASE("fitwtp command with a price variable") {
  const auto cmd = parse({"hbmixlogit", "fitwtp", "data.csv", "y", "--fixed", "contract", "local",
                          "wknown", "--rand", "seasonal", "tod", "--price", "price", "--group",
                          "gid", "--id", "pid"});
  CHECK(cmd.subcommand == Subcommand::FitWtp);
  CHECK(cmd.spec.fixed_vars == std::vector<std::string>{"contract", "local", "wknown"});
  CHECK(cmd.spec.random_names() == std::vector<std::string>{"price", "seasonal", "tod"});
  CHECK(cmd.spec.price_var == std::optional<std::string>("price"));
}

TEST_CASE("fixed variables may also be given positionally") {
  const auto cmd = parse({"hbmixlogit", "fit", "d.csv", "y", "a", "b", "--rand", "r", "--group",
                          "g", "--id", "p", "--sampler-fixed", "mwg", "--from", "1,2,3"});
  CHECK(cmd.spec.fixed_vars == std::vector<std::string>{"a", "b"});
  CHECK(cmd.config.sampler_fixed == amcmc::SamplerKind::Mwg);
  REQUIRE(cmd.config.from);
  CHECK(cmd.config.from->size() == 3);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(parse({"hbmixlogit", "fit", "d.csv", "y", "--group", "g", "--id", "p"}),
                       "at least one random-coefficient independent variable is required",
                       ValidationError);
  CHECK_THROWS_AS(parse({"hbmixlogit", "fit", "d.csv", "y", "--rand", "r", "--group", "g", "--id",
                         "p", "--draws", "100", "--burn", "100"}),
                  ValidationError);
  CHECK_THROWS_AS(parse({"hbmixlogit", "fit", "d.csv", "y", "--rand", "r", "--group", "g", "--id",
                         "p", "--bogus"}),
                  ValidationError);
  CHECK_THROWS_AS(parse({"hbmixlogit", "fit", "d.csv", "y", "--rand", "r", "--id", "p"}),
                  ValidationError);
  CHECK_THROWS_AS(parse({"hbmixlogit", "fitwtp", "d.csv", "y", "--rand", "r", "--group", "g",
                         "--id", "p"}),
                  ValidationError);
  CHECK_THROWS_AS(parse({"hbmixlogit", "fit", "d.csv", "y", "--rand", "r", "--group", "g", "--id",
                         "p", "--sampler-random", "slice"}),
                  ValidationError);
  CHECK_THROWS_AS(parse({"hbmixlogit"}), ValidationError);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"fit", "d.csv", "y", "--group", "g", "--id", "p"}).code == kExitValidation);
  const auto io = invoke({"fit", "/nonexistent/d.csv", "y", "--rand", "x", "--group", "g", "--id", "p"});
  CHECK(io.code == kExitIo);
  CHECK(io.err.find("error:") == 0);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("seed default comes from the environment") {
  ::setenv(kSeedEnv, "777", 1);
  const auto cmd = parse({"hbmixlogit", "fit", "d.csv", "y", "--rand", "r", "--group", "g", "--id", "p"});
  CHECK(cmd.config.seed == 777);
  const auto explicit_seed = parse(
      {"hbmixlogit", "fit", "d.csv", "y", "--rand", "r", "--group", "g", "--id", "p", "--seed", "5"});
  CHECK(explicit_seed.config.seed == 5);
  ::unsetenv(kSeedEnv);
}

TEST_CASE("vector and matrix arguments") {
  CHECK(parse_vector("1, -2.5,3e1") == std::vector<double>{1.0, -2.5, 30.0});
  CHECK_THROWS_AS(parse_vector("1,x"), ValidationError);
  const auto m = parse_matrix("0.5,0.1;0.1,0.3");
  CHECK(m.rows() == 2);
  CHECK(m(1, 0) == 0.1);
  CHECK_THROWS_AS(parse_matrix("1,2;3"), ValidationError);
  test::TempDir dir("mat");
  test::write_text(dir / "v.csv", "a,b\n2,0.5\n0.5,1\n");
  CHECK(read_matrix_csv(dir / "v.csv")(0, 1) == 0.5);
  test::write_text(dir / "w.csv", "2,0.5\n0.5,1\n");
  CHECK(read_matrix_csv(dir / "w.csv").rows() == 2);
}

TEST_CASE("simulate: counts, sidecar and byte-identical reruns") {
  test::TempDir dir("sim");
  const std::vector<std::string> args{"simulate", "--persons", "10", "--occasions", "3", "--alts",
                                      "3", "--b", "1,-0.5", "--W", "0.5,0.1;0.1,0.3", "--alpha",
                                      "0.8", "--seed", "9", "--out"};
  auto a = args;
  a.push_back((dir / "a.csv").string());
  auto b = args;
  b.push_back((dir / "b.csv").string());
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  const auto text = test::read_text(dir / "a.csv");
  CHECK(text == test::read_text(dir / "b.csv"));
  CHECK(test::count_lines(text) == 1 + 90);
  const auto truth = nlohmann::json::parse(test::read_text(dir / "a.truth.json"));
  CHECK(truth["b"][1] == -0.5);
  CHECK(truth["random"][0] == "x1");
}

TEST_CASE("simulate: near-deterministic choices follow the dominant covariate") {
  SimulationSpec sim;
  sim.persons = 100;
  sim.occasions = 10;
  sim.alternatives = 3;
  sim.b = Vector::Constant(1, 2.0);
  sim.w = 1e-6 * Matrix::Identity(1, 1);
  sim.covariate_sd = 10.0;
  const auto out = simulate(sim);
  const auto idx = build_index(out.data);
  int hits = 0;
  int total = 0;
  for (const auto& person : idx.persons) {
    for (const auto& occ : person.occasions) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < occ.n_rows; ++k) {
        if (out.data.covariates()(static_cast<Eigen::Index>(occ.first_row + k), 0) >
            out.data.covariates()(static_cast<Eigen::Index>(occ.first_row + best), 0)) {
          best = k;
        }
      }
      hits += best == occ.chosen_offset;
      ++total;
    }
  }
  CHECK(hits >= 0.95 * total);
}

TEST_CASE("simulate rejects bad shapes") {
  CHECK(invoke({"simulate", "--persons", "5", "--occasions", "2", "--alts", "1", "--b", "1", "--W",
                "1", "--out", "x.csv"})
            .code == kExitValidation);
  CHECK(invoke({"simulate", "--persons", "5", "--occasions", "2", "--alts", "2", "--b", "1,2",
                "--W", "1", "--out", "x.csv"})
            .code == kExitValidation);
}

TEST_CASE("fit, summarize and append round trip") {
  test::TempDir dir("fit");
  const auto data = (dir / "d.csv").string();
  REQUIRE(invoke({"simulate", "--persons", "30", "--occasions", "4", "--alts", "3", "--b", "1,-0.5",
                  "--W", "0.5,0.1;0.1,0.3", "--alpha", "0.8", "--seed", "3", "--out", data})
              .code == 0);
  const auto draws = (dir / "draws.csv").string();
  const std::vector<std::string> fit{"fit",   data,  "choice", "z1",  "--rand", "x1", "x2",
                                     "--group", "gid", "--id",  "pid", "--draws", "300",
                                     "--burn", "100", "--thin", "2",   "--saving", draws,
                                     "--results", (dir / "r.json").string()};
  const auto first = invoke(fit);
  REQUIRE(first.code == 0);
  CHECK(first.out.find("Draws saved in " + draws) != std::string::npos);

  // Refuses to overwrite without --replace.
  CHECK(invoke(fit).code == kExitIo);

  const auto summary = invoke({"summarize", draws, "--depvar", "choice"});
  REQUIRE(summary.code == 0);
  CHECK(summary.out.find(section_table(first.out)) != std::string::npos);
  CHECK(summary.out.find("fun_val") == std::string::npos);
  CHECK(summary.out.find("100 draws summarized (df = 100)") != std::string::npos);

  auto again = fit;
  again.push_back("--append");
  again.push_back("--seed");
  again.push_back("99");
  REQUIRE(invoke(again).code == 0);
  const auto combined = invoke({"summarize", draws});
  CHECK(combined.out.find("200 draws summarized (df = 200)") != std::string::npos);
  const auto store = read_draw_file(draws);
  CHECK(store.rows() == 200);

  const auto stored = nlohmann::json::parse(test::read_text(dir / "r.json"));
  CHECK(stored["scalars"]["df_r"] == 100);
  CHECK(stored["macros"]["cmd"] == "bayesmixedlogit");
}

TEST_CASE("the command line is a pure translation of the library call") {
  test::TempDir dir("pure");
  SimulationSpec sim;
  sim.persons = 20;
  sim.occasions = 3;
  sim.alternatives = 3;
  sim.b = Vector(2);
  sim.b << 1.0, -0.5;
  sim.w = Matrix::Identity(2, 2);
  sim.seed = 4;
  const auto generated = simulate(sim);
  write_simulation(generated, sim, dir / "d.csv");
  const auto cli_run = invoke({"fit", (dir / "d.csv").string(), "choice", "--rand", "x1", "x2",
                               "--group", "gid", "--id", "pid", "--draws", "200", "--burn", "50",
                               "--seed", "12", "--saving", (dir / "cli.csv").string()});
  REQUIRE(cli_run.code == 0);
  SamplerConfig cfg;
  cfg.draws = 200;
  cfg.burn = 50;
  cfg.seed = 12;
  cfg.saving = dir / "lib.csv";
  const auto data = load_long_csv(dir / "d.csv", generated.spec);
  const auto lib = estimate(data, generated.spec, cfg);
  CHECK(test::read_text(dir / "cli.csv") == test::read_text(dir / "lib.csv"));
}

TEST_CASE("convert expands case data") {
  test::TempDir dir("conv");
  test::write_text(dir / "cases.csv", "warm,urban,age,district\nno,1,30,1\nyes,0,45,1\nyes,1,22,2\n");
  const auto res = invoke({"convert", (dir / "cases.csv").string(), "--choice", "warm",
                           "--casevars", "urban", "age", "--id", "district", "--out",
                           (dir / "long.csv").string()});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("case-specific interactions: yes*") != std::string::npos);
  const auto t = csv::read(dir / "long.csv");
  CHECK(t.rows.size() == 6);
  CHECK(t.column("yesXurban"));
  CHECK(t.column("yesXage"));
  CHECK(t.column("yes"));
  CHECK(t.column("choice"));
  CHECK(t.column("_id"));
  CHECK(invoke({"convert", (dir / "cases.csv").string(), "--choice", "warm", "--casevars", "urban",
                "--out", (dir / "long.csv").string()})
            .code == kExitIo);
}
