// Command-line front end for the hesselm shared library. Parses flags, maps
// them onto configuration keys, and dispatches to the library's pipeline
// commands; all numerics live behind the C API.

#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hesselm/hesselm.h"

namespace {

void print_log_line(const char* line, void*) {
  if (std::strncmp(line, "warning:", 8) == 0) {
    std::fprintf(stderr, "%s\n", line);
  } else {
    std::fprintf(stdout, "%s\n", line);
  }
}

struct ConfigHandle {
  hesselm_config* ptr = nullptr;
  ~ConfigHandle() { hesselm_config_free(ptr); }
};

int fail(const std::string& stage, hesselm_status status) {
  std::fprintf(stderr, "error (%s): %s\n", hesselm_status_name(status), hesselm_last_error());
  std::fprintf(stderr, "command '%s' failed\n", stage.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  hesselm_set_log_callback(print_log_line, nullptr);

  CLI::App app{"hesselm: entropy-measurement features and Hessenberg-decomposition "
               "extreme learning machines for time-series classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("hesselm ") + hesselm_version());

  std::string config_path;
  int threads = 0;
  std::map<std::string, std::string> overrides;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"synth", "generate the bundled synthetic two-class dataset"},
      {"preprocess", "filter records and cut fixed-length segments"},
      {"features", "extract entropy-measurement features (fits on the full input)"},
      {"train", "train a model on the extracted features"},
      {"evaluate", "leak-free stratified cross-validation with per-fold fitting"},
      {"sweep", "cross-validate at every lambda in the grid and tabulate PRESS"},
      {"pipeline", "synth (if enabled) + preprocess + features + train + evaluate"},
  };

  for (const auto& command : commands) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    sub->add_option("-c,--config", config_path, "configuration file (INI)");
    sub->add_option("--threads", threads, "worker thread cap (same numerics at any setting)");
    for (size_t i = 0; i < hesselm_config_key_count(); ++i) {
      const char* key = hesselm_config_key_name(i);
      std::string flag = std::string("--") + key;
      std::string help = std::string(hesselm_config_key_help(i)) + " [" +
                         hesselm_config_key_default(i) + "]";
      sub->add_option_function<std::string>(
          flag, [&overrides, key](const std::string& value) { overrides[key] = value; }, help);
    }
  }

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands().front()->get_name();

  ConfigHandle config;
  hesselm_status status = config_path.empty()
                              ? hesselm_config_create(&config.ptr)
                              : hesselm_config_open(config_path.c_str(), &config.ptr);
  if (status != HESSELM_OK) return fail(command, status);

  if (threads > 0) overrides["runtime.threads"] = std::to_string(threads);
  for (const auto& [key, value] : overrides) {
    status = hesselm_config_set(config.ptr, key.c_str(), value.c_str());
    if (status != HESSELM_OK) return fail(command, status);
  }

  if (command == "synth") status = hesselm_run_synth(config.ptr);
  else if (command == "preprocess") status = hesselm_run_preprocess(config.ptr);
  else if (command == "features") status = hesselm_run_features(config.ptr);
  else if (command == "train") status = hesselm_run_train(config.ptr);
  else if (command == "evaluate") status = hesselm_run_evaluate(config.ptr);
  else if (command == "sweep") status = hesselm_run_sweep(config.ptr);
  else if (command == "pipeline") status = hesselm_run_pipeline(config.ptr);

  if (status != HESSELM_OK) return fail(command, status);
  return 0;
}
