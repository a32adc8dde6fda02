#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "resolve/driver.hpp"

using namespace resolve;

namespace {

constexpr int kUsageError = 1;

std::string sidecar_path(const std::string& report) {
  auto pos = report.rfind(".json");
  if (pos != std::string::npos && pos + 5 == report.size()) return report.substr(0, pos) + ".timing.json";
  return report + ".timing.json";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
}

int run_plan(const driver::Context& ctx, const std::string& command, const std::vector<driver::Goal>& goals,
             const std::string& report_path) {
  if (goals.empty()) throw driver::UnknownGoal("no goal matches '" + command + "'");
  auto t0 = std::chrono::steady_clock::now();
  auto results = driver::run(ctx, goals, ctx.options.jobs);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (auto& r : results) std::cout << driver::status_name(r.status) << "  " << r.name << "\n";
  auto rep = driver::report(command, results);
  std::cout << rep["summary"]["pass"] << " pass, " << rep["summary"]["fail"] << " fail, "
            << rep["summary"]["inconclusive"] << " inconclusive\n";
  if (!report_path.empty()) {
    write_file(report_path, rep.dump(2) + "\n");
    write_file(sidecar_path(report_path), driver::timing(results, ctx.options.jobs, wall).dump(2) + "\n");
    std::cout << "report: " << report_path << "\n";
  }
  return driver::exit_code(results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification driver for the genus-3 local model resolution"};
  app.require_subcommand(1);
  app.fallthrough();

  driver::Options opts;
  std::string report_path = "resolve-report.json";
  app.add_option("--jobs,-j", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--budget-spairs", opts.budget_spairs, "S-pair budget per Groebner computation")
      ->check(CLI::PositiveNumber);
  app.add_option("--report", report_path, "report file (empty to skip)");

  auto* verify = app.add_subcommand("verify", "run verification goals");
  verify->require_subcommand(1);
  verify->add_subcommand("all", "every goal");
  std::string chart_name, semistable_name;
  int step = 0, identity_step = 0, k = 0;
  verify->add_subcommand("chart", "validate and pull back one chart")->add_option("name", chart_name)->required();
  verify->add_subcommand("step", "replay and center certificates of one step")
      ->add_option("k", step)
      ->required()
      ->check(CLI::Range(1, 6));
  auto* ids = verify->add_subcommand("identities", "cofactor identities and minor factorizations");
  ids->add_option("--step", identity_step, "only goals on the chart produced by this step")->check(CLI::Range(1, 6));
  verify->add_subcommand("nonvanishing", "non-vanishing certificate")
      ->add_option("--k", k)
      ->required()
      ->check(CLI::Range(1, 3));
  verify->add_subcommand("cover", "covering by translates on T1");
  verify->add_subcommand("semistable", "semistability of one chart")->add_option("chart", semistable_name)->required();

  auto* schub = app.add_subcommand("schubert", "Schubert cells");
  auto* hasse = schub->add_subcommand("hasse", "Hasse diagram of the Schubert varieties");
  schub->require_subcommand(1);
  int g = 3;
  std::string format = "dot";
  hasse->add_option("--g", g)->check(CLI::Range(1, 6));
  hasse->add_option("--format", format)->check(CLI::IsMember({"dot", "json"}));

  auto* explain = app.add_subcommand("explain", "print the derivation behind a goal");
  std::string goal;
  explain->add_option("goal", goal)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (hasse->parsed()) {
      auto p = schubert::hasse(g);
      std::cout << (format == "dot" ? schubert::to_dot(p) : schubert::to_json(p).dump(2) + "\n");
      return 0;
    }
    auto ctx = driver::Context::load(data_dir(), opts);
    auto goals = driver::catalogue(ctx);
    if (explain->parsed()) {
      std::cout << driver::explain(ctx, goal);
      return 0;
    }
    auto* sub = verify->get_subcommands().at(0);
    std::string what = sub->get_name();
    std::string command = "verify " + what;
    std::vector<driver::Goal> plan;
    if (what == "all") {
      plan = goals;
    } else if (what == "chart") {
      plan = {driver::find_goal(goals, "chart:" + chart_name)};
      command += " " + chart_name;
    } else if (what == "step") {
      plan = driver::select(goals, "step:" + std::to_string(step) + ":");
      command += " " + std::to_string(step);
    } else if (what == "identities") {
      std::optional<std::string> on;
      if (identity_step) {
        on = "T" + std::to_string(identity_step - 1);
        command += " --step " + std::to_string(identity_step);
      }
      plan = driver::select(goals, "identities:", on);
      for (auto& x : driver::select(goals, "factorization:", on)) plan.push_back(x);
      if (!on)
        for (auto& x : driver::select(goals, "relations:")) plan.push_back(x);
    } else if (what == "nonvanishing") {
      plan = {driver::find_goal(goals, "nonvanishing:k=" + std::to_string(k))};
      command += " --k " + std::to_string(k);
    } else if (what == "cover") {
      plan = driver::select(goals, "cover:");
    } else if (what == "semistable") {
      plan = {driver::find_goal(goals, "semistable:" + semistable_name)};
      command += " " + semistable_name;
    }
    return run_plan(ctx, command, plan, report_path);
  } catch (const driver::UnknownGoal& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kUsageError;
}
