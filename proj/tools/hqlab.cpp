#include "hqlab/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int run(const std::string& kind, const RunArgs& a) {
  auto cfg = hqlab::load_config(a.config);
  if (cfg.kind != kind) {
    throw hqlab::ConfigError("config " + a.config + " describes a '" + cfg.kind + "' experiment, not '" + kind + "'");
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  const std::string out = a.out.empty() ? "runs/" + cfg.name : a.out;
  const auto res = hqlab::run_experiment(cfg, out);
  for (const auto& x : res.assertions) {
    std::cout << (x.passed ? "ok   " : "FAIL ") << x.name << ": " << x.detail << "\n";
  }
  if (res.status != 0) {
    for (const auto& x : res.assertions)
      if (!x.passed) std::cerr << "assertion failed: " << x.name << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return res.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hqlab: asymptotic cohomology experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HQLAB_VERSION);

  RunArgs args;
  std::string report_dir;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& kind : hqlab::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment from an INI config");
    sub->add_option("-c,--config", args.config, "INI experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", args.out, "output directory (default runs/<name>)");
    sub->add_option("--seed", args.seed, "override experiment.seed");
    sub->add_option("--threads", args.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
    subs.emplace_back(kind, sub);
  }
  auto* report = app.add_subcommand("report", "index all run directories below a directory");
  report->add_option("dir", report_dir, "directory to scan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (report->parsed()) {
      const auto index = hqlab::report_index(report_dir);
      const auto& c = index.at("counts");
      std::cout << "runs " << c.at("runs") << ", unique " << c.at("unique") << ", passed " << c.at("passed")
                << ", failed " << c.at("failed") << ", warnings " << index.at("warnings").size() << "\n";
      for (const auto& w : index.at("warnings"))
        std::cerr << "warning: " << w.at("path").get<std::string>() << ": " << w.at("error").get<std::string>()
                  << "\n";
      return 0;
    }
    for (const auto& [kind, sub] : subs)
      if (sub->parsed()) return run(kind, args);
  } catch (const hqlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
