#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "levycouple/levycouple.h"

namespace {

int exit_code(lvc_status s) {
  switch (s) {
    case LVC_OK: return 0;
    case LVC_INVALID_ARGUMENT:
    case LVC_CONFIG:
    case LVC_IO: return 2;
    case LVC_NUMERICAL_GUARD: return 3;
    default: return 1;
  }
}

int fail(lvc_status s) {
  std::fprintf(stderr, "levycouple: %s\n", lvc_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian paths coupled to Levy paths by reordering increments"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::optional<std::string>>> flags = {
      {"model", {}}, {"eps1", {}}, {"eps2", {}}, {"k", {}}, {"ks", {}}, {"q", {}}, {"reps", {}},
      {"endpoint-samples", {}}, {"seed", {}}, {"out", {}}, {"threads", {}}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "flat key = value file; flags override it");
    for (auto& [name, slot] : flags) sub->add_option("--" + name, slot);
    sub->add_option("--set", sets, "extra key=value settings (repeatable)");
  };

  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < lvc_experiment_count(); ++i) {
    const std::string name = lvc_experiment_name(i);
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  lvc_config* cfg = nullptr;
  lvc_status st = lvc_config_create(&cfg);
  if (st != LVC_OK) return fail(st);

  auto run = [&]() -> lvc_status {
    if (!config_file.empty()) {
      if ((st = lvc_config_load_file(cfg, config_file.c_str())) != LVC_OK) return st;
    }
    for (const auto& [name, slot] : flags)
      if (slot && (st = lvc_config_set(cfg, name.c_str(), slot->c_str())) != LVC_OK) return st;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "levycouple: --set expects key=value, got '%s'\n", kv.c_str());
        return LVC_CONFIG;
      }
      if ((st = lvc_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())) != LVC_OK) return st;
    }
    std::string name;
    for (auto* sub : subs)
      if (sub->parsed()) name = sub->get_name();
    size_t needed = 0;
    std::vector<char> summary(4096);
    if ((st = lvc_run_experiment(name.c_str(), cfg, summary.data(), summary.size(), &needed)) != LVC_OK) return st;
    std::fputs(summary.data(), stdout);
    return LVC_OK;
  };

  const lvc_status result = run();
  lvc_config_free(cfg);
  if (result != LVC_OK) {
    if (*lvc_last_error()) return fail(result);
    return exit_code(result);
  }
  return 0;
}
