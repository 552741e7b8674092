#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "physattn/container_io.hpp"
#include "physattn/errors.hpp"

using namespace physattn;
using namespace physattn::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("physattn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

const char* kQuietHeat = R"({"constants": {"c_s": 0, "c_b": 0}, "schedule": {"n_iters": 1, "dtau": 0.1}})";
const char* kSmall = R"({"scenario": {"frames": 5, "height": 6, "width": 6, "channels": 4, "region_top": 1,
  "region_left": 1, "region_height": 3, "region_width": 2}, "steps": 3, "seeds": [1, 2],
  "alphas": [0, 0.5, 1], "schedule": {"n_iters": 3, "dtau": 0.1}})";

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto cfg = parse_config(R"({"alpha": 0.25, "prior": {"kind": "wave", "wave_c": 0.3}, "seeds": [7]})");
  EXPECT_EQ(cfg.alpha, 0.25);
  EXPECT_EQ(cfg.prior.kind, priors::PriorKind::wave);
  EXPECT_EQ(cfg.prior.wave_c, 0.3);
  EXPECT_EQ(cfg.seeds, std::vector<std::uint64_t>{7});
  EXPECT_EQ(cfg.steps, 20u);
  EXPECT_EQ(parse_config("{}").seeds.size(), 20u);
}

TEST(Config, StrictParsing) {
  EXPECT_THROW((void)parse_config(R"({"alpah": 0.5})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"scenario": {"frame": 5}})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"alpha": "half"})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"alpha": 1.5})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"prior": {"kind": "diffusion"}})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"scenario": {"region_height": 0}})"), ConfigError);
  try {
    (void)parse_config("{\n  \"alpha\": 0.5,\n  \"steps\": ]\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.offset(), 29u);
  }
}

TEST_F(CliTest, OperateHeatExample) {
  const auto f = write("f.json", R"({"T":3,"H":1,"W":1,"d":1,"data":[0,1,2]})");
  const auto m = write("m.json", R"({"T":3,"H":1,"W":1,"d":1,"data":[1,1,1]})");
  const auto c = write("c.json", kQuietHeat);
  ASSERT_EQ(cli({"operate", "--in", f.string(), "--mask", m.string(), "--config", c.string(), "--out",
                 (dir_ / "o").string()}),
            kExitOk)
      << err_.str();
  const auto out = io::read_container(dir_ / "o" / "phys.json");
  ASSERT_EQ(out.data.size(), 3u);
  EXPECT_NEAR(out.data[0], 0.3, 1e-15);
  EXPECT_NEAR(out.data[1], 1.0, 1e-15);
  EXPECT_NEAR(out.data[2], 1.7, 1e-15);
  EXPECT_NE(out_.str().find("energy_before 2"), std::string::npos);
}

TEST_F(CliTest, OperateIdentityKeepsDataBytes) {
  io::Container f{4, 1, 2, 3, {}};
  for (int i = 0; i < 24; ++i) f.data.push_back(0.1 * i - 1.3);
  io::write_container(dir_ / "f.bin", f, io::Format::binary);
  io::write_container(dir_ / "m.bin", io::Container{4, 1, 2, 1, std::vector<double>(8, 1.0)}, io::Format::binary);
  const auto c = write("c.json", R"({"prior": {"kind": "ori"}, "constants": {"c_s": 0, "c_b": 0}})");
  ASSERT_EQ(cli({"operate", "--in", (dir_ / "f.bin").string(), "--mask", (dir_ / "m.bin").string(), "--config",
                 c.string(), "--out", (dir_ / "o").string()}),
            kExitOk);
  const auto in = io::read_file(dir_ / "f.bin");
  const auto out = io::read_file(dir_ / "o" / "phys.bin");
  EXPECT_EQ(in, out);
}

TEST_F(CliTest, OperateMaskMismatchNamesDimension) {
  const auto f = write("f.json", R"({"T":3,"H":1,"W":1,"d":1,"data":[0,1,2]})");
  const auto m = write("m.json", R"({"T":2,"H":1,"W":1,"d":1,"data":[1,1]})");
  EXPECT_EQ(cli({"operate", "--in", f.string(), "--mask", m.string(), "--out", dir_.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("frame-count"), std::string::npos);
}

TEST_F(CliTest, OperateDivergenceExitCode) {
  const auto f = write("f.json", R"({"T":3,"H":1,"W":1,"d":1,"data":[1e300,-1e300,1e300]})");
  const auto m = write("m.json", R"({"T":3,"H":1,"W":1,"d":1,"data":[1,1,1]})");
  const auto c = write("c.json", R"({"prior": {"kind": "burgers"}, "constants": {"c_s": 0, "c_b": 0}})");
  EXPECT_EQ(cli({"operate", "--in", f.string(), "--mask", m.string(), "--config", c.string(), "--out",
                 dir_.string()}),
            kExitDiverged);
}

TEST_F(CliTest, MetricsOutputs) {
  const auto g = write("g.json", R"({"T":3,"H":1,"W":1,"d":1,"data":[0,1,3]})");
  ASSERT_EQ(cli({"metrics", "--in", g.string()}), kExitOk) << err_.str();
  EXPECT_EQ(out_.str().substr(0, 24), "{\"T\":3,\"R\":1.0,\"D\":1.5,\"");
  EXPECT_NE(out_.str().find("\"S\":0.1656238170411"), std::string::npos);

  const auto flat = write("k.json", R"({"T":3,"H":1,"W":1,"d":2,"data":[1,2,1,2,1,2]})");
  ASSERT_EQ(cli({"metrics", "--in", flat.string()}), kExitOk);
  EXPECT_NE(out_.str().find("\"R\":0.0,\"D\":0.0,\"R_hat\":1.0,\"D_hat\":0.0,\"S\":0.0"), std::string::npos);

  const auto c = write("c.json", R"({"metrics": {"cosine": true}})");
  EXPECT_EQ(cli({"metrics", "--in", g.string(), "--config", c.string()}), kExitConfig);
  const auto two = write("t.json", R"({"T":2,"H":1,"W":1,"d":1,"data":[0,1]})");
  EXPECT_EQ(cli({"metrics", "--in", two.string()}), kExitConfig);

  ASSERT_EQ(cli({"metrics", "--in", g.string(), "--format", "csv"}), kExitOk);
  EXPECT_EQ(out_.str().substr(0, 36), "T,R,D,R_hat,D_hat,S,adjacent_cosine\r");
}

TEST_F(CliTest, AblateWritesRowsPerPriorAndSeed) {
  const auto c = write("c.json", kSmall);
  ASSERT_EQ(cli({"ablate", "--config", c.string(), "--out", (dir_ / "a").string()}), kExitOk) << err_.str();
  const std::string csv = slurp(dir_ / "a" / "ablation.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 6 * 2);
  EXPECT_NE(csv.find("/ori/alpha-0.5,0.5,ori,5,"), std::string::npos);
  EXPECT_EQ(csv, out_.str());
  const std::string svg = slurp(dir_ / "a" / "ablation.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "ablation.json"));

  ASSERT_EQ(cli({"ablate", "--config", c.string(), "--out", (dir_ / "b").string()}), kExitOk);
  EXPECT_EQ(slurp(dir_ / "b" / "ablation.csv"), csv);
  EXPECT_EQ(slurp(dir_ / "b" / "ablation.svg"), svg);
}

TEST_F(CliTest, SweepPolylinesAndSeedOverride) {
  const auto c = write("c.json", kSmall);
  ASSERT_EQ(cli({"sweep", "--config", c.string(), "--out", dir_.string(), "--seed", "9", "--format", "json"}),
            kExitOk)
      << err_.str();
  const std::string csv = slurp(dir_ / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3);
  EXPECT_NE(csv.find(",9,ok,"), std::string::npos);
  const std::string svg = slurp(dir_ / "sweep.svg");
  std::size_t polylines = 0;
  for (std::size_t at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) {
    ++polylines;
    const auto end = svg.find("/>", at);
    const std::string points = svg.substr(svg.find("points=\"", at), end - at);
    EXPECT_EQ(std::count(points.begin(), points.end(), ','), 3);
  }
  EXPECT_EQ(polylines, 3u);
  EXPECT_NE(out_.str().find("\"command\": \"sweep\""), std::string::npos);
}

TEST_F(CliTest, ConfigErrorsExitBeforeRunning) {
  const auto bad = write("bad.json", R"({"steps": 3, "unknown": true})");
  EXPECT_EQ(cli({"ablate", "--config", bad.string(), "--out", (dir_ / "x").string()}), kExitConfig);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
  EXPECT_NE(err_.str().find("unknown"), std::string::npos);
  const auto empty = write("empty.json", R"({"alphas": []})");
  EXPECT_EQ(cli({"sweep", "--config", empty.string(), "--out", dir_.string()}), kExitConfig);
  const auto broken = write("broken.json", "{\n\"steps\": 3,,\n}");
  EXPECT_EQ(cli({"sweep", "--config", broken.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);
  EXPECT_EQ(cli({"bogus"}), kExitConfig);
  EXPECT_EQ(cli({}), kExitConfig);
}
