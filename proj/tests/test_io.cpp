#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "multichain/fixtures.hpp"
#include "multichain/io.hpp"
#include "multichain/pma.hpp"

using namespace multichain;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "multichain_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("MDP JSON round trip is bitwise lossless") {
  const Fixture f = random_multichain_sample(44);
  const auto path = scratch_dir() / "mdp.json";
  save_mdp(f.mdp, path.string());
  const Mdp back = load_mdp(path.string());
  REQUIRE(back.n_states == f.mdp.n_states);
  REQUIRE(back.n_actions == f.mdp.n_actions);
  CHECK(back.reward_bound == f.mdp.reward_bound);
  for (int a = 0; a < f.mdp.n_actions; ++a)
    CHECK((back.kernel[a] - f.mdp.kernel[a]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.reward - f.mdp.reward).cwiseAbs().maxCoeff() == 0.0);
  require_valid(back);

  save_mdp(back, (scratch_dir() / "mdp2.json").string());
  CHECK(slurp(path) == slurp(scratch_dir() / "mdp2.json"));
}

TEST_CASE("malformed MDP files are validation failures") {
  const auto dir = scratch_dir();
  const auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name);
    out << body;
    return (dir / name).string();
  };
  CHECK_THROWS_AS(load_mdp(write("broken.json", "{ not json")),
                  ValidationError);
  CHECK_THROWS_AS(load_mdp(write("missing.json", R"({"n_states": 2})")),
                  ValidationError);
  CHECK_THROWS_AS(
      load_mdp(write("ragged.json",
                     R"({"n_states": 2, "n_actions": 1, "reward_bound": 1,
                         "kernel": [[[1, 0]]], "reward": [[0], [0]]})")),
      ValidationError);
  CHECK_THROWS_AS(load_mdp((dir / "does_not_exist.json").string()),
                  std::runtime_error);
}

TEST_CASE("policy round trip keeps the table and the floor") {
  const Mdp m = make_twochain();
  Policy p = clipped_deterministic(m, {0, 1, 0}, 0.125);
  const auto path = scratch_dir() / "policy.json";
  save_policy(p, path.string());
  const Policy back = load_policy(path.string());
  CHECK((back.table - p.table).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.floor == 0.125);

  // a bare nested array is accepted as a table with an unknown floor
  {
    std::ofstream out(scratch_dir() / "bare.json");
    out << "[[0.5, 0.5], [1.0, 0.0], [0.25, 0.75]]\n";
  }
  const Policy bare = load_policy((scratch_dir() / "bare.json").string());
  CHECK(bare.table(2, 1) == 0.75);
  CHECK(bare.floor == 0.0);

  {
    std::ofstream out(scratch_dir() / "ragged_policy.json");
    out << "[[0.5, 0.5], [1.0]]\n";
  }
  CHECK_THROWS_AS(load_policy((scratch_dir() / "ragged_policy.json").string()),
                  ValidationError);
}

TEST_CASE("distributions are length checked") {
  const auto path = scratch_dir() / "mu.json";
  {
    std::ofstream out(path);
    out << "[0.5, 0.25, 0.25]\n";
  }
  const Vector mu = load_distribution(path.string(), 3);
  CHECK(mu(0) == 0.5);
  CHECK_THROWS_AS(load_distribution(path.string(), 4), ValidationError);
  {
    std::ofstream out(path);
    out << "{\"mu\": [1.0]}\n";
  }
  CHECK_THROWS_AS(load_distribution(path.string(), 1), ValidationError);
}

TEST_CASE("trace CSV layout") {
  const Mdp m = make_twochain();
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const PmaTrace t =
      run_pma(m, mu, 0.1, {ScheduleKind::constant, 0.5, 2.0},
              DivergenceKind::kl, 7, uniform_policy(m));
  const auto path = scratch_dir() / "trace.csv";
  save_trace_csv(t, path.string());
  const std::string body = slurp(path);
  std::istringstream lines(body);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "k,J_mu,gap,eta,divergence_to_ref,samples_cum");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.find(std::to_string(rows - 1) + ",") == 0);
  }
  CHECK(rows == 8);  // 7 iterations record 8 iterates

  save_trace_csv(t, (scratch_dir() / "trace2.csv").string());
  CHECK(slurp(scratch_dir() / "trace2.csv") == body);
}

TEST_CASE("column and table CSV helpers") {
  Vector v(2);
  v << 0.5, -1.25;
  const auto vp = scratch_dir() / "v.csv";
  save_vector_csv(v, "V", vp.string());
  CHECK(slurp(vp) == "s,V\n0,0.5\n1,-1.25\n");

  Matrix t(1, 2);
  t << 1.0, 0.0;
  const auto tp = scratch_dir() / "t.csv";
  save_table_csv(t, "G", tp.string());
  CHECK(slurp(tp) == "s,a,G\n0,0,1\n0,1,0\n");
}
