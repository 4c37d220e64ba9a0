#include "lumped_pid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

namespace {

std::vector<double> parse_values(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split_list(text)) out.push_back(parse_double(tok, "grid " + key));
  if (out.empty()) throw Error(ErrorKind::kInvalidConfig, "grid " + key + ": empty list");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string cell_id(const Scenario& base, const SweepCell& c) {
  std::string id = base.name + "[w=" + format_double(c.omega) + ";wf=" + format_double(c.omega_f);
  if (c.sigma) id += ";sigma=" + format_double(*c.sigma);
  return id + "]";
}

}  // namespace

SweepGrid SweepGrid::parse(const std::vector<std::string>& tokens) {
  SweepGrid g;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kInvalidConfig, "grid: expected key=values, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "omega") g.omega = parse_values(key, val);
    else if (key == "omega_f") g.omega_f = parse_values(key, val);
    else if (key == "sigma") g.sigma = parse_values(key, val);
    else if (key == "seed") {
      if (val == "fixed") g.seed_policy = SeedPolicy::kFixed;
      else if (val == "per-cell") g.seed_policy = SeedPolicy::kPerCell;
      else throw Error(ErrorKind::kInvalidConfig, "grid seed: expected fixed|per-cell, got '" + val + "'");
    } else {
      throw Error(ErrorKind::kInvalidConfig, "grid: unknown key '" + key + "'");
    }
  }
  g.validate();
  return g;
}

void SweepGrid::validate() const {
  for (double w : omega)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::kInvalidConfig, "grid omega: values must be > 0");
  for (double w : omega_f)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::kInvalidConfig, "grid omega_f: values must be > 0");
  for (double s : sigma)
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::kInvalidConfig, "grid sigma: values must be >= 0");
}

std::vector<SweepCell> expand_grid(const SweepGrid& grid, const Scenario& base) {
  const std::vector<double> ws = grid.omega.empty() ? std::vector<double>{base.omega()} : grid.omega;
  const std::vector<double> wfs = grid.omega_f.empty() ? std::vector<double>{base.omega_f()} : grid.omega_f;
  std::vector<std::optional<double>> sigmas;
  if (grid.sigma.empty()) sigmas.push_back(std::nullopt);
  for (double s : grid.sigma) sigmas.push_back(s);

  std::vector<SweepCell> cells;
  for (double w : ws)
    for (double wf : wfs)
      for (const auto& s : sigmas) cells.push_back({cells.size(), w, wf, s});
  return cells;
}

Scenario cell_scenario(const Scenario& base, const SweepGrid& grid, const SweepCell& cell) {
  Scenario sc = base;
  sc.set_bandwidths(cell.omega, cell.omega_f);
  if (cell.sigma) sc.set_noise_sigma(*cell.sigma);
  if (grid.seed_policy == SeedPolicy::kPerCell) sc.set_seed(base.seed() + cell.index);
  return sc;
}

SweepResult run_sweep(const Scenario& base, const SweepGrid& grid, unsigned parallelism) {
  const auto cells = expand_grid(grid, base);
  SweepResult result;
  result.rows.resize(cells.size());
  std::vector<char> failed(cells.size(), 0);

  auto run_cell = [&](std::size_t i) {
    const auto& cell = cells[i];
    const std::string id = cell_id(base, cell);
    Scenario sc = base;
    try {
      sc = cell_scenario(base, grid, cell);
      sc.validate();
      const SimTrace trace = run_scenario(sc);
      result.rows[i] = evaluate_trace(sc, trace, id);
    } catch (const Error& e) {
      result.rows[i] = failed_row(sc, id, to_string(e.kind()));
      failed[i] = 1;
    } catch (const std::exception&) {
      result.rows[i] = failed_row(sc, id, "error");
      failed[i] = 1;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(cells.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    for (auto& t : pool) t.join();
  }
  result.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  write_metrics_header(os);
  for (const auto& row : result.rows) write_metrics_row(os, row);
}

}  // namespace lumped_pid
