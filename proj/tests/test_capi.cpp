// Exercises the shared-library surface exactly as an external client would:
// only hesselm/hesselm.h, opaque handles, and status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hesselm/hesselm.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  hesselm_config* ptr = nullptr;
  ~Config() { hesselm_config_free(ptr); }
};

struct Model {
  hesselm_model* ptr = nullptr;
  ~Model() { hesselm_model_free(ptr); }
};

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> g_log;
void capture_log(const char* line, void*) { g_log.emplace_back(line); }

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(hesselm_version()) == "1.0.0");
  CHECK(std::string(hesselm_status_name(HESSELM_OK)) == "ok");
  CHECK(std::string(hesselm_status_name(HESSELM_ERROR_SINGULAR)) == "singular");
  CHECK(std::string(hesselm_status_name(HESSELM_ERROR_PARSE)) == "parse");
}

TEST_CASE("config: create, set, get, and key catalogue") {
  Config config;
  REQUIRE(hesselm_config_create(&config.ptr) == HESSELM_OK);

  char buffer[128];
  CHECK(hesselm_config_get(config.ptr, "preprocess.w1_ms", buffer, sizeof buffer) == HESSELM_OK);
  CHECK(std::string(buffer) == "200");

  CHECK(hesselm_config_set(config.ptr, "features.kind", "grid") == HESSELM_OK);
  CHECK(hesselm_config_get(config.ptr, "features.kind", buffer, sizeof buffer) == HESSELM_OK);
  CHECK(std::string(buffer) == "grid");

  CHECK(hesselm_config_set(config.ptr, "features.kind", "nope") ==
        HESSELM_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(hesselm_last_error()) > 0);
  CHECK(hesselm_config_set(config.ptr, "not.a.key", "1") == HESSELM_ERROR_INVALID_ARGUMENT);

  CHECK(hesselm_config_get(config.ptr, "features.kind", buffer, 2) ==
        HESSELM_ERROR_INVALID_ARGUMENT);

  REQUIRE(hesselm_config_key_count() > 20);
  bool found = false;
  for (size_t i = 0; i < hesselm_config_key_count(); ++i) {
    if (std::string(hesselm_config_key_name(i)) == "model.variant") {
      found = true;
      CHECK(std::string(hesselm_config_key_default(i)) == "r-hesselm");
      CHECK(std::strlen(hesselm_config_key_help(i)) > 0);
    }
  }
  CHECK(found);
  CHECK(hesselm_config_key_name(hesselm_config_key_count()) == nullptr);
}

TEST_CASE("config: save and reopen") {
  fs::path dir = fresh_dir("hesselm_capi_cfg");
  Config config;
  REQUIRE(hesselm_config_create(&config.ptr) == HESSELM_OK);
  REQUIRE(hesselm_config_set(config.ptr, "model.hidden", "33") == HESSELM_OK);
  fs::path path = dir / "config.ini";
  REQUIRE(hesselm_config_save(config.ptr, path.string().c_str()) == HESSELM_OK);

  Config reopened;
  REQUIRE(hesselm_config_open(path.string().c_str(), &reopened.ptr) == HESSELM_OK);
  char buffer[32];
  CHECK(hesselm_config_get(reopened.ptr, "model.hidden", buffer, sizeof buffer) == HESSELM_OK);
  CHECK(std::string(buffer) == "33");

  Config missing;
  CHECK(hesselm_config_open("/no/such/file.ini", &missing.ptr) == HESSELM_ERROR_IO);
}

TEST_CASE("full pipeline through the C API, then model reuse") {
  fs::path dir = fresh_dir("hesselm_capi_pipe");
  Config config;
  REQUIRE(hesselm_config_create(&config.ptr) == HESSELM_OK);
  std::string out = (dir / "out").string();
  REQUIRE(hesselm_config_set(config.ptr, "data.output_dir", out.c_str()) == HESSELM_OK);
  REQUIRE(hesselm_config_set(config.ptr, "synth.enabled", "true") == HESSELM_OK);
  REQUIRE(hesselm_config_set(config.ptr, "synth.records_per_class", "5") == HESSELM_OK);
  REQUIRE(hesselm_config_set(config.ptr, "synth.segments_per_record", "4") == HESSELM_OK);
  REQUIRE(hesselm_config_set(config.ptr, "preprocess.segment_seconds", "4") == HESSELM_OK);
  REQUIRE(hesselm_config_set(config.ptr, "model.hidden", "20") == HESSELM_OK);

  g_log.clear();
  hesselm_set_log_callback(capture_log, nullptr);
  REQUIRE(hesselm_run_pipeline(config.ptr) == HESSELM_OK);
  hesselm_set_log_callback(nullptr, nullptr);
  CHECK(g_log.size() >= 4);  // per-stage progress lines

  Model model;
  std::string model_path = out + "/model.txt";
  REQUIRE(hesselm_model_open(model_path.c_str(), &model.ptr) == HESSELM_OK);
  CHECK(hesselm_model_feature_count(model.ptr) == 17);
  CHECK(hesselm_model_class_count(model.ptr) == 2);
  CHECK(hesselm_model_lambda(model.ptr) >= 0.0);

  char label[32];
  REQUIRE(hesselm_model_class_label(model.ptr, 0, label, sizeof label) == HESSELM_OK);
  CHECK(std::string(label) == "CHF");
  REQUIRE(hesselm_model_class_label(model.ptr, 1, label, sizeof label) == HESSELM_OK);
  CHECK(std::string(label) == "NORMAL");
  CHECK(hesselm_model_class_label(model.ptr, 2, label, sizeof label) ==
        HESSELM_ERROR_INVALID_ARGUMENT);

  // classify a raw segment pulled back out of the preprocessed artifacts
  std::ifstream seg_in(out + "/segments/chf_01_0000.txt");
  REQUIRE(seg_in.good());
  std::vector<double> samples;
  double v = 0.0;
  while (seg_in >> v) samples.push_back(v);
  REQUIRE(samples.size() == 1000);

  double scores[2] = {0, 0};
  size_t winner = 99;
  REQUIRE(hesselm_model_predict_segment(model.ptr, samples.data(), samples.size(), scores,
                                        &winner) == HESSELM_OK);
  CHECK(winner == 0);
  CHECK(scores[0] > scores[1]);

  // round-trip through save and a second handle
  std::string copy_path = out + "/model_copy.txt";
  REQUIRE(hesselm_model_save(model.ptr, copy_path.c_str()) == HESSELM_OK);
  Model copy;
  REQUIRE(hesselm_model_open(copy_path.c_str(), &copy.ptr) == HESSELM_OK);
  double scores2[2] = {0, 0};
  size_t winner2 = 99;
  REQUIRE(hesselm_model_predict_segment(copy.ptr, samples.data(), samples.size(), scores2,
                                        &winner2) == HESSELM_OK);
  CHECK(winner2 == winner);
  CHECK(scores2[0] == scores[0]);
  CHECK(scores2[1] == scores[1]);
}

TEST_CASE("model error paths surface as status codes") {
  Model model;
  CHECK(hesselm_model_open("/no/such/model.txt", &model.ptr) == HESSELM_ERROR_IO);

  fs::path dir = fresh_dir("hesselm_capi_err");
  fs::path bad = dir / "bad.txt";
  std::ofstream(bad) << "hesselm model 1\nvariant = r-hesselm\n";
  CHECK(hesselm_model_open(bad.string().c_str(), &model.ptr) == HESSELM_ERROR_PARSE);

  fs::path newer = dir / "newer.txt";
  std::ofstream(newer) << "hesselm model 99\n";
  CHECK(hesselm_model_open(newer.string().c_str(), &model.ptr) == HESSELM_ERROR_VERSION);

  CHECK(hesselm_run_preprocess(nullptr) == HESSELM_ERROR_INVALID_ARGUMENT);

  Config config;
  REQUIRE(hesselm_config_create(&config.ptr) == HESSELM_OK);
  fs::path out = dir / "out";
  REQUIRE(hesselm_config_set(config.ptr, "data.output_dir", out.string().c_str()) == HESSELM_OK);
  CHECK(hesselm_run_preprocess(config.ptr) == HESSELM_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(hesselm_last_error()).find("manifest") != std::string::npos);
}
