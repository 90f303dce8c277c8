#include "ioprobe_cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

#include "ioprobe/csv.hpp"
#include "ioprobe/error.hpp"
#include "ioprobe/flows.hpp"
#include "ioprobe/spectra.hpp"

#ifndef IOPROBE_VERSION
#define IOPROBE_VERSION "unknown"
#endif

namespace ioprobe::cli {

namespace {

struct TraceBlock {
  std::string property;
  EstimateTrace trace;
  bool cone_columns = false;
  std::vector<FlowPoint> flow;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_combined_trace(const std::filesystem::path& path, const std::vector<TraceBlock>& blocks) {
  auto out = open_out(path);
  out << "property,k,rho,estimate,alpha,samples,c,r\n";
  for (const auto& b : blocks) {
    for (const auto& row : b.trace.rows()) {
      out << b.property << ',' << row.k << ',' << format_double(row.rho) << ','
          << format_double(row.estimate) << ',' << format_optional(row.alpha) << ',' << row.samples
          << ',' << format_optional(row.c) << ',' << format_optional(row.r) << '\n';
    }
  }
}

void write_meta(const std::filesystem::path& path, const std::string& command,
                const ExperimentConfig& cfg) {
  auto out = open_out(path);
  out << "version=" << IOPROBE_VERSION << '\n';
  out << "command=" << command << '\n';
  out << "config=" << cfg.path.filename().string() << '\n';
  for (const auto& [key, value] : resolved_settings(cfg)) out << key << '=' << value << '\n';
}

void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "property,quantity,estimate,truth,rel_error,samples_used\n";
  for (const auto& r : rows) {
    out << r.property << ',' << r.quantity << ',' << format_double(r.estimate) << ','
        << format_optional(r.truth) << ',' << format_optional(r.rel_error) << ','
        << r.samples_used << '\n';
  }
}

std::vector<Property> selected(Property p) {
  if (p == Property::all) return {Property::gain, Property::passivity, Property::cone};
  return {p};
}

SummaryRow summarize(const std::string& property, const std::string& quantity, double estimate,
                     std::optional<double> truth, std::size_t samples) {
  SummaryRow row{property, quantity, estimate, truth, std::nullopt, samples};
  if (truth) row.rel_error = relative_error(estimate, *truth);
  return row;
}


std::optional<double> last_estimate(const EstimateTrace& t) {
  if (t.empty()) return std::nullopt;
  return t.back().estimate;
}

CompareRow run_cell(const ExperimentConfig& cfg, const std::string& method, std::size_t budget,
                    double truth) {
  CompareRow row;
  row.method = method;
  row.budget = budget;
  row.truth = truth;
  ProbeSession session(cfg.plant.plant, cfg.noise, budget);
  try {
    switch (cfg.compare_property) {
      case Property::gain: {
        GainConfig g = cfg.gain;
        g.method = *parse_gain_method(method);
        g.stop.max_samples = budget;
        row.estimate = estimate_gain(session, g).gamma_hat;
        break;
      }
      case Property::passivity: {
        PassivityConfig p = cfg.passivity;
        p.method = *parse_passivity_method(method);
        p.stop.max_samples = budget;
        p.estimate_nu = false;
        row.estimate = estimate_passivity(session, p).s_hat;
        break;
      }
      case Property::cone:
      case Property::all: {
        ConeConfig c = cfg.cone;
        c.method = *parse_cone_method(method);
        c.stop.max_samples = budget;
        row.estimate = estimate_cone(session, c).r_hat;
        break;
      }
    }
  } catch (const EstimationBudgetError& e) {
    row.estimate = last_estimate(e.partial_trace());
  } catch (const ConeDivergenceError& e) {
    row.estimate = last_estimate(e.partial_trace());
  }
  row.samples_used = session.samples_used();
  if (row.estimate) row.rel_error = relative_error(*row.estimate, truth);
  return row;
}

}  // namespace

double relative_error(double estimate, double truth) {
  const double err = std::abs(estimate - truth);
  return truth == 0.0 ? err : err / std::abs(truth);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const BudgetError*>(&e)) return 3;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  return 1;
}

std::filesystem::path resolve_out_dir(const RunOptions& opts, const ExperimentConfig& cfg,
                                      const std::string& fallback) {
  if (opts.out) return *opts.out;
  if (cfg.out) return *cfg.out;
  if (const char* env = std::getenv("IOPROBE_OUT_DIR"); env && *env) return env;
  return fallback;
}

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<TraceBlock> blocks;
  std::vector<SummaryRow> summary;

  auto flush = [&] {
    write_combined_trace(out_dir / "trace.csv", blocks);
    for (const auto& b : blocks) {
      auto out = open_out(out_dir / ("trace_" + b.property + ".csv"));
      write_trace_csv(out, b.trace, b.cone_columns);
      if (!b.flow.empty()) {
        auto fout = open_out(out_dir / ("flow_" + b.property + ".csv"));
        write_flow_csv(fout, b.flow);
      }
    }
    write_summary(out_dir / "summary.csv", summary);
    write_meta(out_dir / "meta", "run", cfg);
  };

  const Plant& plant = cfg.plant.plant;
  try {
    for (const Property prop : selected(cfg.property)) {
      const std::string name = to_string(prop);
      ProbeSession session(plant, cfg.noise, cfg.budget);
      try {
        switch (prop) {
          case Property::gain: {
            GainEstimate est = estimate_gain(session, cfg.gain);
            std::optional<double> truth;
            if (cfg.validate) truth = true_gain(plant).gamma;
            summary.push_back(summarize(name, "gamma", est.gamma_hat, truth, session.samples_used()));
            blocks.push_back({name, std::move(est.trace), false, std::move(est.flow)});
            break;
          }
          case Property::passivity: {
            PassivityEstimate est = estimate_passivity(session, cfg.passivity);
            std::optional<PassivityTruth> truth;
            if (cfg.validate) truth = true_passivity(plant);
            summary.push_back(summarize(name, "s", est.s_hat,
                                        truth ? std::optional(truth->s) : std::nullopt,
                                        session.samples_used()));
            if (est.nu_hat) {
              summary.push_back(summarize(name, "nu", *est.nu_hat,
                                          truth ? std::optional(truth->nu) : std::nullopt,
                                          session.samples_used()));
            }
            blocks.push_back({name, std::move(est.trace), false, std::move(est.flow)});
            if (!est.nu_trace.empty()) blocks.push_back({"nu", std::move(est.nu_trace), false, {}});
            break;
          }
          case Property::cone:
          case Property::all: {
            ConeEstimate est = estimate_cone(session, cfg.cone);
            std::optional<ConeTruth> truth;
            if (cfg.validate) truth = true_cone(plant);
            summary.push_back(summarize(name, "c", est.c_hat,
                                        truth ? std::optional(truth->c_star) : std::nullopt,
                                        session.samples_used()));
            summary.push_back(summarize(name, "r", est.r_hat,
                                        truth ? std::optional(truth->r_min) : std::nullopt,
                                        session.samples_used()));
            blocks.push_back({name, std::move(est.trace), true, std::move(est.flow)});
            break;
          }
        }
      } catch (const EstimationBudgetError& e) {
        blocks.push_back({name, e.partial_trace(), prop == Property::cone, {}});
        throw;
      } catch (const ConeDivergenceError& e) {
        blocks.push_back({name, e.partial_trace(), true, {}});
        throw;
      }
    }
  } catch (const Error&) {
    flush();
    throw;
  }
  flush();
  return summary;
}

std::vector<CompareRow> compare_experiment(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir) {
  const std::string where = cfg.path.string() + ": [compare] ";
  if (cfg.compare_methods.size() < 2) throw ConfigError(where + "methods must list at least two methods");
  if (cfg.compare_budgets.empty()) throw ConfigError(where + "budgets must list at least one budget");
  for (const std::size_t b : cfg.compare_budgets) {
    if (b == 0) throw ConfigError(where + "budgets must be positive");
  }

  const Plant& plant = cfg.plant.plant;
  double truth = 0.0;
  switch (cfg.compare_property) {
    case Property::gain: truth = true_gain(plant).gamma; break;
    case Property::passivity: truth = true_passivity(plant).s; break;
    default: truth = true_cone(plant).r_min; break;
  }

  struct Cell {
    std::string method;
    std::size_t budget;
  };
  std::vector<Cell> cells;
  for (const auto& m : cfg.compare_methods) {
    for (const std::size_t b : cfg.compare_budgets) cells.push_back({m, b});
  }

  // Each cell owns its session; results are gathered in cell order.
  std::vector<CompareRow> rows(cells.size());
  const std::size_t width = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < cells.size(); start += width) {
    std::vector<std::future<CompareRow>> jobs;
    const std::size_t stop = std::min(cells.size(), start + width);
    for (std::size_t i = start; i < stop; ++i) {
      jobs.push_back(std::async(std::launch::async, run_cell, std::cref(cfg), cells[i].method,
                                cells[i].budget, truth));
    }
    for (std::size_t i = start; i < stop; ++i) rows[i] = jobs[i - start].get();
  }

  std::filesystem::create_directories(out_dir);
  auto out = open_out(out_dir / "compare.csv");
  out << "method,budget,estimate,truth,rel_error,samples_used\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.budget << ',' << format_optional(r.estimate) << ','
        << format_double(r.truth) << ',' << format_optional(r.rel_error) << ',' << r.samples_used
        << '\n';
  }
  write_meta(out_dir / "meta", "compare", cfg);
  return rows;
}

void truth_report(const std::filesystem::path& plant_file, std::ostream& out) {
  const PlantInfo info = build_plant(load_ini(plant_file), plant_file.parent_path());
  const Plant& plant = info.plant;
  const DenseOperators ops = materialize(plant);
  out << "quantity,value\n";
  out << "channels," << plant.channels() << '\n';
  out << "horizon," << plant.horizon() << '\n';
  out << "gamma," << format_double(true_gain(ops, plant.channels()).gamma) << '\n';
  try {
    const PassivityTruth p = true_passivity(ops);
    out << "s," << format_double(p.s) << '\n';
    out << "nu," << format_double(p.nu) << '\n';
  } catch (const SingularOperatorError&) {
    out << "s,\nnu,\n";
  }
  const ConeTruth c = true_cone(ops);
  out << "c_star," << format_double(c.c_star) << '\n';
  out << "r_min," << format_double(c.r_min) << '\n';
}

}  // namespace ioprobe::cli
