#include "hbml/simulate.hpp"

#include <cmath>
#include <fstream>

#include "hbml/error.hpp"
#include "hbml/hbsampler.hpp"
#include "json.hpp"

namespace hbml {

SimulatedData simulate(const SimulationSpec& sim) {
  const auto kr = sim.b.size();
  const auto kf = sim.alpha.size();
  if (kr < 1 || (sim.wtp && kr < 2)) {
    throw ValidationError("simulate: need at least one random coefficient besides price");
  }
  if (sim.w.rows() != kr || sim.w.cols() != kr) throw ValidationError("simulate: W has wrong shape");
  if (sim.alternatives < 2) throw ValidationError("simulate: need at least 2 alternatives");
  if (sim.persons < 1 || sim.occasions < 1) throw ValidationError("simulate: empty panel");
  if (!(sim.covariate_sd > 0.0)) throw ValidationError("simulate: covariate_sd must be positive");
  const SpdMatrix w(sim.w);

  ModelSpec spec;
  spec.depvar = "choice";
  spec.group_var = "gid";
  spec.id_var = "pid";
  const auto n_rand_vars = sim.wtp ? kr - 1 : kr;
  for (Eigen::Index j = 0; j < n_rand_vars; ++j) spec.rand_vars.push_back("x" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < kf; ++j) spec.fixed_vars.push_back("z" + std::to_string(j + 1));
  if (sim.wtp) spec.price_var = "price";
  const auto names = spec.model_vars();  // fixed, rand, price
  const auto n_vars = static_cast<Eigen::Index>(names.size());

  const std::size_t rows = sim.persons * sim.occasions * sim.alternatives;
  std::vector<std::int64_t> groups(rows);
  std::vector<std::int64_t> persons(rows);
  std::vector<std::uint8_t> chosen(rows, 0);
  Matrix x(static_cast<Eigen::Index>(rows), n_vars);
  Matrix beta(static_cast<Eigen::Index>(sim.persons), kr);

  std::size_t row = 0;
  std::int64_t gid = 0;
  for (std::size_t p = 0; p < sim.persons; ++p) {
    RngStream rng(sim.seed, {StreamTag::Simulate, 0, p});
    const Vector beta_n = mvn_sample(sim.b, w, rng);
    beta.row(static_cast<Eigen::Index>(p)) = beta_n.transpose();
    for (std::size_t o = 0; o < sim.occasions; ++o) {
      ++gid;
      const auto first = static_cast<Eigen::Index>(row);
      const auto j = static_cast<Eigen::Index>(sim.alternatives);
      for (Eigen::Index a = 0; a < j; ++a) {
        for (Eigen::Index v = 0; v < n_vars; ++v) x(first + a, v) = sim.covariate_sd * rng.normal();
        groups[row] = gid;
        persons[row] = static_cast<std::int64_t>(p + 1);
        ++row;
      }
      const auto xo = x.middleRows(first, j);
      Vector u(j);
      // Column order is fixed (kf), random (n_rand_vars), price.
      const auto fixed = xo.leftCols(kf);
      const auto rand = xo.middleCols(kf, n_rand_vars);
      if (sim.wtp) {
        u = rand * beta_n.tail(n_rand_vars) - xo.col(n_vars - 1);
        if (kf > 0) u += fixed * sim.alpha;
        u *= std::exp(beta_n(0));
      } else {
        u = rand * beta_n;
        if (kf > 0) u += fixed * sim.alpha;
      }
      const double umax = u.maxCoeff();
      const Vector prob = (u.array() - umax).exp().matrix() / (u.array() - umax).exp().sum();
      const double draw = rng.uniform();
      double cum = 0.0;
      Eigen::Index pick = j - 1;
      for (Eigen::Index a = 0; a < j; ++a) {
        cum += prob(a);
        if (draw < cum) {
          pick = a;
          break;
        }
      }
      chosen[static_cast<std::size_t>(first + pick)] = 1;
    }
  }
  auto data = ChoiceDataset::create(std::move(groups), std::move(persons), std::move(chosen), names,
                                    std::move(x));
  return SimulatedData{std::move(data), std::move(spec), std::move(beta)};
}

std::filesystem::path truth_path(const std::filesystem::path& csv_path) {
  auto out = csv_path;
  out.replace_extension(".truth.json");
  return out;
}

void write_simulation(const SimulatedData& sim_data, const SimulationSpec& sim,
                      const std::filesystem::path& csv_path) {
  write_long_csv(sim_data.data, csv_path, sim_data.spec.group_var, sim_data.spec.id_var,
                 sim_data.spec.depvar);
  nlohmann::ordered_json truth;
  truth["persons"] = sim.persons;
  truth["occasions"] = sim.occasions;
  truth["alternatives"] = sim.alternatives;
  truth["seed"] = sim.seed;
  truth["wtp"] = sim.wtp;
  truth["covariate_sd"] = sim.covariate_sd;
  truth["depvar"] = sim_data.spec.depvar;
  truth["group"] = sim_data.spec.group_var;
  truth["identifier"] = sim_data.spec.id_var;
  truth["random"] = sim_data.spec.random_names();
  truth["fixed"] = sim_data.spec.fixed_vars;
  if (sim.wtp) truth["price"] = *sim_data.spec.price_var;
  truth["b"] = std::vector<double>(sim.b.data(), sim.b.data() + sim.b.size());
  auto w = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < sim.w.rows(); ++i) {
    std::vector<double> r;
    for (Eigen::Index j = 0; j < sim.w.cols(); ++j) r.push_back(sim.w(i, j));
    w.push_back(r);
  }
  truth["W"] = w;
  truth["alpha"] = std::vector<double>(sim.alpha.data(), sim.alpha.data() + sim.alpha.size());
  const auto path = truth_path(csv_path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << truth.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hbml
