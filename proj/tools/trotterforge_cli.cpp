// trotterforge command-line driver.
//
// Exit codes: 0 success, 2 invalid input, 3 a checked inequality failed,
// 4 the problem exceeds the dense cap.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "trotterforge/trotterforge.hpp"

namespace tf = trotterforge;

namespace {

enum ExitCode : int { kOk = 0, kValidation = 2, kAssertion = 3, kResource = 4 };

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw tf::ValidationError("cannot write '" + path + "'");
  return out;
}

tf::Decomposition decompose(const tf::Model& model, const std::string& method) {
  if (method == "even_odd") return tf::decompose_even_odd(model.interaction, model.graph);
  if (method == "greedy") return tf::decompose_greedy_coloring(model.interaction, model.graph);
  throw tf::ValidationError("unknown decomposition '" + method + "'");
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0)) throw tf::ValidationError(std::string(name) + " must be positive");
}

struct Options {
  std::string model_path;
  std::string out;
  std::string decomposition = "even_odd";
  int k = 2;
  int m = 1;
  int r = 3;
  int n = 0;
  int n_cap = 1 << 16;
  double t = 1.0;
  double epsilon = 1e-4;
  double b_prime = 0.5;
  double threshold = tf::kLightconeThreshold;
  bool raw = false;
  std::vector<int> n_list{4, 8, 16, 32, 64};
  std::vector<double> mu_list{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> t_list{0.5, 1.0, 2.0};
  std::vector<int> ranges{1, 2, 3, 4, 5, 6, 7, 8};
};

int cmd_schedule(const Options& opt) {
  const tf::ScheduleParams params{opt.k, opt.m, opt.r};
  params.validate();
  const tf::ProductSchedule raw = tf::suzuki_schedule(opt.k, opt.m, opt.r);
  const tf::ProductSchedule merged = tf::merge_adjacent(raw);
  const std::string prefix = opt.out.empty() ? "schedule" : opt.out;
  {
    auto os = open_output(prefix + ".tsv");
    tf::write_schedule(os, opt.raw ? raw : merged);
  }
  {
    auto os = open_output(prefix + "_path.csv");
    tf::write_path_trace_csv(os, raw);
  }
  std::vector<std::pair<std::string, double>> rows;
  double worst = 0.0;
  for (int level = 1; level <= params.recursion_depth(); ++level) {
    const auto p = tf::level_fractions(level, opt.r);
    const auto report = tf::check_order_conditions(p, level);
    const std::string tag = "level" + std::to_string(level);
    rows.emplace_back(tag + "_sum_residual", report.sum_residual);
    rows.emplace_back(tag + "_power_residual", report.power_residual);
    rows.emplace_back(tag + "_palindrome_residual", report.palindrome_residual);
    worst = std::max({worst, report.sum_residual, report.power_residual, report.palindrome_residual});
  }
  const double total = tf::total_absolute_time(raw);
  rows.emplace_back("raw_entries", static_cast<double>(raw.size()));
  rows.emplace_back("merged_entries", static_cast<double>(merged.size()));
  rows.emplace_back("expected_factor_count",
                    static_cast<double>(tf::expected_factor_count(opt.k, params.recursion_depth(), opt.r)));
  rows.emplace_back("total_absolute_time", total);
  rows.emplace_back("closed_form_total_time", tf::closed_form_total_time(opt.k, opt.m, opt.r));
  {
    auto os = open_output(prefix + "_conditions.csv");
    tf::write_quantity_csv(os, rows);
  }
  std::cout << "merged_entries=" << merged.size() << " raw_entries=" << raw.size()
            << " total_abs_time=" << tf::format_double(total) << " max_residual=" << tf::format_double(worst)
            << '\n';
  return kOk;
}

int cmd_norm(const Options& opt) {
  const tf::Model model = tf::load_model(opt.model_path);
  std::vector<std::pair<std::string, double>> rows;
  const double norm = tf::interaction_norm(model.interaction, model.graph, model.decay);
  rows.emplace_back("interaction_norm", norm);
  if (model.observable)
    rows.emplace_back("anchored_norm",
                      tf::anchored_norm(model.interaction, model.graph, model.decay, model.observable->support()));
  rows.emplace_back("num_terms", static_cast<double>(model.interaction.size()));
  rows.emplace_back("max_diameter", static_cast<double>(model.interaction.max_diameter(model.graph)));
  auto os = open_output(opt.out.empty() ? "norm.csv" : opt.out);
  tf::write_quantity_csv(os, rows);
  std::cout << "interaction_norm=" << tf::format_double(norm) << '\n';
  return kOk;
}

int cmd_evolve(const Options& opt) {
  if (opt.n < 0) throw tf::ValidationError("--n must be >= 0");
  const tf::Model model = tf::load_model(opt.model_path);
  const tf::DenseOperator o = model.observable_operator();
  const tf::DenseOperator h = tf::assemble(model.interaction, o.sites());
  const tf::DenseOperator exact = tf::heisenberg(h, opt.t, o);
  std::vector<std::pair<std::string, double>> rows{{"t", opt.t},
                                                   {"observable_norm", tf::operator_norm(o)},
                                                   {"evolved_norm", tf::operator_norm(exact)}};
  std::cout << "t=" << tf::format_double(opt.t) << " evolved_norm=" << tf::format_double(rows.back().second);
  if (opt.n > 0) {
    const tf::Decomposition d = decompose(model, opt.decomposition);
    const auto schedule = tf::suzuki_schedule(d.k(), opt.m, opt.r);
    const auto approx = tf::run_schedule(d, schedule, opt.t / opt.n, opt.n, o, o.sites());
    const double err = tf::error_norm(exact, approx);
    rows.emplace_back("n", opt.n);
    rows.emplace_back("trotter_error", err);
    std::cout << " n=" << opt.n << " trotter_error=" << tf::format_double(err);
  }
  std::cout << '\n';
  auto os = open_output(opt.out.empty() ? "evolve.csv" : opt.out);
  tf::write_quantity_csv(os, rows);
  return kOk;
}

int cmd_converge(const Options& opt) {
  const tf::Model model = tf::load_model(opt.model_path);
  const tf::Decomposition d = decompose(model, opt.decomposition);
  const auto report =
      tf::convergence_study(d, model.observable_operator(), opt.t, opt.m, opt.r, opt.n_list, opt.model_path);
  auto os = open_output(opt.out.empty() ? "convergence.csv" : opt.out);
  tf::write_convergence_csv(os, report);
  std::cout << "alpha_hat=" << tf::format_double(report.fitted_order) << " expected=" << report.alpha_expected
            << " r_squared=" << tf::format_double(report.r_squared) << '\n';
  return kOk;
}

int cmd_step(const Options& opt) {
  const tf::Model model = tf::load_model(opt.model_path);
  const tf::Decomposition d = decompose(model, opt.decomposition);
  const auto report = tf::single_step_order(d, model.observable_operator(), opt.m, opt.r, opt.mu_list);
  auto os = open_output(opt.out.empty() ? "step.csv" : opt.out);
  tf::write_step_csv(os, report);
  std::cout << "exponent=" << tf::format_double(report.exponent) << " expected=" << report.exponent_expected
            << '\n';
  return kOk;
}

int cmd_lightcone(const Options& opt) {
  const tf::Model model = tf::load_model(opt.model_path);
  const tf::DenseOperator o = model.observable_operator();
  const auto report = tf::lightcone_study(model, o, model.observable->support(), opt.t_list, opt.threshold);
  auto os = open_output(opt.out.empty() ? "lightcone.csv" : opt.out);
  tf::write_lightcone_csv(os, report);
  for (const auto& [t, r_star] : report.radius_at_threshold)
    std::cout << "t=" << tf::format_double(t) << " r_star=" << r_star << '\n';
  return kOk;
}

int cmd_depth(const Options& opt) {
  require_positive(opt.epsilon, "epsilon");
  const tf::Model model = tf::load_model(opt.model_path);
  const tf::Decomposition d = decompose(model, opt.decomposition);
  const auto report = tf::depth_search(d, model.observable_operator(), opt.t, opt.m, opt.r, opt.epsilon, opt.n_cap);
  auto os = open_output(opt.out.empty() ? "depth.csv" : opt.out);
  tf::write_depth_csv(os, report);
  std::cout << "n_min=" << report.n_min << " factors_per_step=" << report.factors_per_step
            << " total_depth=" << report.total_depth << '\n';
  return kOk;
}

int cmd_truncate(const Options& opt) {
  const tf::Model model = tf::load_model(opt.model_path);
  const auto report = tf::truncation_study(model, opt.ranges, opt.b_prime, opt.t, model.observable_operator());
  auto os = open_output(opt.out.empty() ? "truncation.csv" : opt.out);
  tf::write_truncation_csv(os, report);
  std::cout << "bounds_hold=" << (report.bounds_hold() ? "true" : "false") << '\n';
  if (!report.bounds_hold()) throw tf::AssertionFailure("truncation norm bound violated");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trotter-Suzuki product formulas on quantum spin lattices"};
  app.require_subcommand(1);
  Options opt;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model_path, "Model config (JSON)")->required();
    sub->add_option("--out", opt.out, "Output CSV path");
  };
  auto add_order = [&](CLI::App* sub) {
    sub->add_option("--m", opt.m, "Order label of the product formula");
    sub->add_option("--r", opt.r, "Recursion arity (odd, >= 3)");
    sub->add_option("--decomp", opt.decomposition, "Layer split: even_odd or greedy");
  };

  auto* schedule = app.add_subcommand("schedule", "Export a product-formula schedule");
  schedule->add_option("--k", opt.k, "Number of Hamiltonian parts");
  schedule->add_option("--m", opt.m, "Order label");
  schedule->add_option("--r", opt.r, "Recursion arity (odd, >= 3)");
  schedule->add_option("--out", opt.out, "Output prefix");
  schedule->add_flag("--raw", opt.raw, "Export the unmerged schedule");

  auto* norm = app.add_subcommand("norm", "Interaction norms of a model");
  add_model(norm);

  auto* evolve = app.add_subcommand("evolve", "Heisenberg evolution, optionally against a product formula");
  add_model(evolve);
  add_order(evolve);
  evolve->add_option("--t", opt.t, "Evolution time");
  evolve->add_option("--n", opt.n, "Trotter steps (0 skips the product formula)");

  auto* converge = app.add_subcommand("converge", "Global error against step count");
  add_model(converge);
  add_order(converge);
  converge->add_option("--t", opt.t, "Evolution time");
  converge->add_option("--n-list", opt.n_list, "Step counts")->delimiter(',');

  auto* step = app.add_subcommand("step", "One-step error against step size");
  add_model(step);
  add_order(step);
  step->add_option("--mu-list", opt.mu_list, "Step sizes")->delimiter(',');

  auto* lightcone = app.add_subcommand("lightcone", "Leakage of the evolved observable outside fattened supports");
  add_model(lightcone);
  lightcone->add_option("--t-list", opt.t_list, "Evolution times")->delimiter(',');
  lightcone->add_option("--threshold", opt.threshold, "Leakage threshold defining r*");

  auto* depth = app.add_subcommand("depth", "Minimal step count for a target error");
  add_model(depth);
  add_order(depth);
  depth->add_option("--t", opt.t, "Evolution time");
  depth->add_option("--eps", opt.epsilon, "Target error");
  depth->add_option("--n-cap", opt.n_cap, "Largest step count tried");

  auto* truncate = app.add_subcommand("truncate", "Long-range truncation bound and dynamical error");
  add_model(truncate);
  truncate->add_option("--R-list", opt.ranges, "Truncation ranges")->delimiter(',');
  truncate->add_option("--bprime", opt.b_prime, "Weaker decay rate b' < b");
  truncate->add_option("--t", opt.t, "Evolution time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (*schedule) return cmd_schedule(opt);
    if (*norm) return cmd_norm(opt);
    if (*evolve) return cmd_evolve(opt);
    if (*converge) return cmd_converge(opt);
    if (*step) return cmd_step(opt);
    if (*lightcone) return cmd_lightcone(opt);
    if (*depth) return cmd_depth(opt);
    if (*truncate) return cmd_truncate(opt);
  } catch (const tf::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const tf::DegenerateFitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const tf::AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << '\n';
    return kAssertion;
  } catch (const tf::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResource;
  }
  return kValidation;
}
