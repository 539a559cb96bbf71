#include "fdcate/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>

#include "fdcate/config_io.hpp"
#include "fdcate/fd_dr.hpp"
#include "fdcate/fd_r.hpp"
#include "fdcate/plugin.hpp"
#include "fdcate/random.hpp"

namespace fdcate {

namespace {

enum SeedTag : std::uint64_t {
  kDirections = 1,
  kProbe = 2,
  kLearners = 3,
  kFoldsTwo = 4,
  kFoldsThree = 5,
  kNoise = 6,
  kNoiseR = 7,
};

// One unit of work: a replication at fixed (n, kappa), evaluated at one or more rho values.
struct WorkUnit {
  std::size_t n;
  double kappa;
  int rep;
  std::vector<std::pair<std::size_t, double>> points;  // (point index, rho)
};

double rmse(const CateModel& model, const RowMatrix& probe, const std::vector<double>& truth) {
  const std::vector<double> est = model.predict_rows(probe);
  double s = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) s += (est[i] - truth[i]) * (est[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(est.size()));
}

}  // namespace

std::string to_string(Panel panel) {
  switch (panel) {
    case Panel::sample_size_clean:
      return "sample-size-clean";
    case Panel::sample_size_slow:
      return "sample-size-slow-nuisance";
    case Panel::noise_sweep:
      return "noise-sweep";
    case Panel::overlap_sweep:
      return "overlap-sweep";
  }
  return "?";
}

Panel panel_from_string(const std::string& name) {
  if (name == "a" || name == "sample-size-clean") return Panel::sample_size_clean;
  if (name == "b" || name == "sample-size-slow-nuisance") return Panel::sample_size_slow;
  if (name == "c" || name == "noise-sweep") return Panel::noise_sweep;
  if (name == "d" || name == "overlap-sweep") return Panel::overlap_sweep;
  throw std::invalid_argument("unknown panel '" + name + "' (expected a, b, c or d)");
}

std::vector<GridPoint> ExperimentGrid::points() const {
  std::vector<GridPoint> out;
  switch (panel) {
    case Panel::sample_size_clean:
      for (std::size_t n : n_values) out.push_back({n, 0.0, 1.0});
      break;
    case Panel::sample_size_slow:
      for (std::size_t n : n_values) out.push_back({n, 1.0, 1.0});
      break;
    case Panel::noise_sweep:
      for (double rho : rho_values) out.push_back({fixed_n, rho, 1.0});
      break;
    case Panel::overlap_sweep:
      for (double kappa : kappa_values) out.push_back({fixed_n, 0.0, kappa});
      break;
  }
  return out;
}

void ExperimentGrid::validate() const {
  if (points().empty()) throw std::invalid_argument("experiment grid is empty");
  if (replications < 2) throw std::invalid_argument("at least 2 replications are required");
  if (estimators.empty()) throw std::invalid_argument("no estimators selected");
  if (probe_size < 1) throw std::invalid_argument("probe size must be positive");
  for (const GridPoint& p : points()) {
    if (p.n < 6) throw std::invalid_argument("sample sizes must be at least 6");
    if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw std::invalid_argument("rho values must lie in [0, 1]");
    if (!(p.kappa >= 1.0)) throw std::invalid_argument("kappa values must be at least 1");
  }
  if (!(floor > 0.0 && floor < 0.5)) throw std::invalid_argument("floor must lie in (0, 0.5)");
  if (!(final_penalty >= 0.0)) throw std::invalid_argument("final penalty must be nonnegative");
  if (dgp.d < 1) throw std::invalid_argument("covariate dimension must be at least 1");
  nuisance_config.validate();
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t n, int rep) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

int default_workers() {
  if (const char* env = std::getenv("FDCATE_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

ExperimentResult run_grid(const ExperimentGrid& grid, int workers) {
  grid.validate();
  const std::vector<GridPoint> pts = grid.points();
  const int reps = grid.replications;
  const std::size_t n_est = grid.estimators.size();

  // Group grid points sharing (n, kappa): they differ only in rho and reuse one fit.
  std::map<std::pair<std::size_t, double>, std::vector<std::pair<std::size_t, double>>> groups;
  for (std::size_t k = 0; k < pts.size(); ++k) groups[{pts[k].n, pts[k].kappa}].push_back({k, pts[k].rho});
  std::vector<WorkUnit> units;
  for (const auto& [key, members] : groups) {
    for (int r = 0; r < reps; ++r) units.push_back({key.first, key.second, r, members});
  }

  ExperimentResult result;
  result.grid = grid;
  result.records.resize(pts.size() * static_cast<std::size_t>(reps) * n_est);
  auto slot = [&](std::size_t point, int rep, std::size_t e) -> RmseRecord& {
    return result.records[(point * static_cast<std::size_t>(reps) + static_cast<std::size_t>(rep)) * n_est + e];
  };

  bool want_cross = false, want_r = false;
  for (EstimatorKind k : grid.estimators) {
    if (k == EstimatorKind::plugin || k == EstimatorKind::dr) want_cross = true;
    if (k == EstimatorKind::r) want_r = true;
  }

  auto run_unit = [&](const WorkUnit& u) {
    const std::uint64_t seed = replication_seed(grid.base_seed, u.n, u.rep);
    for (const auto& [point, rho] : u.points) {
      for (std::size_t e = 0; e < n_est; ++e) {
        RmseRecord& rec = slot(point, u.rep, e);
        rec.point = point;
        rec.grid = pts[point];
        rec.estimator = grid.estimators[e];
        rec.replication = u.rep;
      }
    }
    auto fail_all = [&](EstimatorKind which, bool any, const std::string& msg) {
      for (const auto& [point, rho] : u.points) {
        for (std::size_t e = 0; e < n_est; ++e) {
          if (any || grid.estimators[e] == which) {
            RmseRecord& rec = slot(point, u.rep, e);
            rec.ok = false;
            rec.error = msg;
            rec.rmse = std::nan("");
          }
        }
      }
    };

    std::optional<DgpSample> data;
    RowMatrix probe;
    std::vector<double> truth;
    DgpSpec spec = grid.dgp;
    try {
      const DgpSpec dirs = DgpSpec::with_random_directions(grid.dgp.d, u.n, derive_seed(seed, {kDirections}));
      spec.w_x = dirs.w_x;
      spec.w_z = dirs.w_z;
      spec.w_y = dirs.w_y;
      spec.n = u.n;
      spec.kappa = u.kappa;
      spec.rho = 0.0;
      spec.seed = seed;
      data = sample(spec);
      probe = draw_covariates(spec.d, grid.probe_size, derive_seed(seed, {kProbe}));
      truth.resize(grid.probe_size);
      for (std::size_t i = 0; i < grid.probe_size; ++i) truth[i] = true_tau(spec, {probe.data() + i * spec.d, spec.d});
    } catch (const std::exception& ex) {
      fail_all(EstimatorKind::plugin, true, std::string("data generation: ") + ex.what());
      return;
    }
    const SampleTable& table = data->table;
    const LearnerConfig cfg = grid.nuisance_config.with_seed(derive_seed(seed, {kLearners}));

    std::optional<CrossFitNuisances> cross;
    if (want_cross) {
      try {
        NuisanceOptions opts;
        opts.floor = grid.floor;
        cross = fit_cross_nuisances(table, cfg, opts, derive_seed(seed, {kFoldsTwo}));
      } catch (const std::exception& ex) {
        fail_all(EstimatorKind::plugin, false, ex.what());
        fail_all(EstimatorKind::dr, false, ex.what());
      }
    }
    std::optional<FdRNuisances> rnuis;
    if (want_r) {
      try {
        rnuis = fit_fd_r_nuisances(table, cfg, derive_seed(seed, {kFoldsThree}));
      } catch (const std::exception& ex) {
        fail_all(EstimatorKind::r, false, ex.what());
      }
    }

    for (const auto& [point, rho] : u.points) {
      const NoiseSpec noise{rho, u.n, derive_seed(seed, {kNoise}), grid.dgp.noise_variance_reading};
      std::optional<CrossFitNuisances> noisy;
      if (cross) noisy = rho > 0.0 ? with_noise(*cross, noise) : *cross;
      for (std::size_t e = 0; e < n_est; ++e) {
        RmseRecord& rec = slot(point, u.rep, e);
        if (!rec.error.empty()) continue;
        try {
          switch (grid.estimators[e]) {
            case EstimatorKind::plugin:
              rec.rmse = rmse(plugin_fit(*noisy), probe, truth);
              break;
            case EstimatorKind::dr: {
              FdDrOptions o;
              o.penalty = grid.final_penalty;
              rec.rmse = rmse(fd_dr_fit(table, *noisy, o), probe, truth);
              break;
            }
            case EstimatorKind::r: {
              FdROptions o;
              o.penalty = grid.final_penalty;
              o.gamma_penalty = grid.final_penalty;
              if (rho > 0.0) {
                NoiseSpec rn = noise;
                rn.seed = derive_seed(seed, {kNoiseR});
                o.noise = rn;
              }
              rec.rmse = rmse(fd_r_fit(*rnuis, o).as_cate(), probe, truth);
              break;
            }
            case EstimatorKind::bdr_component:
              throw std::invalid_argument("BD-R components are not CATE estimators");
          }
          rec.ok = std::isfinite(rec.rmse);
          if (!rec.ok) rec.error = "non-finite RMSE";
        } catch (const std::exception& ex) {
          rec.ok = false;
          rec.error = ex.what();
          rec.rmse = std::nan("");
        }
      }
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) run_unit(units[i]);
  };
  const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(units.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  for (const auto& r : result.records) result.failures += r.ok ? 0 : 1;
  result.summaries = summarize(result.records);
  return result;
}

std::vector<CellSummary> summarize(const std::vector<RmseRecord>& records) {
  std::map<std::pair<std::size_t, int>, CellSummary> cells;
  std::map<std::pair<std::size_t, int>, std::vector<double>> values;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.point, static_cast<int>(r.estimator));
    CellSummary& cell = cells[key];
    cell.point = r.point;
    cell.grid = r.grid;
    cell.estimator = r.estimator;
    if (r.ok) {
      values[key].push_back(r.rmse);
    } else {
      ++cell.failures;
    }
  }
  std::vector<CellSummary> out;
  for (auto& [key, cell] : cells) {
    const std::vector<double>& v = values[key];
    cell.count = static_cast<int>(v.size());
    if (!v.empty()) {
      double s = 0.0;
      for (double x : v) s += x;
      cell.mean = s / static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - cell.mean) * (x - cell.mean);
      cell.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      cell.ci_half_width = 1.96 * cell.sd / std::sqrt(static_cast<double>(v.size()));
    } else {
      cell.mean = cell.sd = cell.ci_half_width = std::nan("");
    }
    out.push_back(cell);
  }
  return out;
}

void write_records_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "point,panel,n,rho,kappa,estimator,replication,rmse,status,error\n";
  char buf[64];
  for (const auto& r : result.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.rmse);
    std::string err = r.error;
    for (char& ch : err) {
      if (ch == '"' || ch == '\n') ch = '\'';
    }
    out << r.point << ',' << to_string(result.grid.panel) << ',' << r.grid.n << ',' << r.grid.rho << ','
        << r.grid.kappa << ',' << to_string(r.estimator) << ',' << r.replication << ',' << buf << ','
        << (r.ok ? "ok" : "failed") << ",\"" << err << "\"\n";
  }
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

void write_summary_json(const ExperimentResult& result, const std::filesystem::path& path) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& s : result.summaries) {
    nlohmann::json cell = {{"point", s.point},
                           {"n", s.grid.n},
                           {"rho", s.grid.rho},
                           {"kappa", s.grid.kappa},
                           {"estimator", to_string(s.estimator)},
                           {"count", s.count},
                           {"failures", s.failures}};
    if (s.count > 0) {
      cell["mean_rmse"] = s.mean;
      cell["sd"] = s.sd;
      cell["ci_half_width"] = s.ci_half_width;
      cell["ci_low"] = s.mean - s.ci_half_width;
      cell["ci_high"] = s.mean + s.ci_half_width;
    }
    cells.push_back(cell);
  }
  const nlohmann::json doc = {{"grid", result.grid}, {"failures", result.failures}, {"cells", cells}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace fdcate
