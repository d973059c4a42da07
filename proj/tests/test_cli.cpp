#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& cmd) {
  const fs::path out_file = fs::temp_directory_path() / "skm_cli_out.txt";
  const std::string full = cmd + " > " + out_file.string() + " 2>&1";
  const int status = std::system(full.c_str());
  CmdResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  res.output = buf.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string kBin = SKM_BIN;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "skm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

const std::string kGenFlags =
    " gen --d 2 --n 400 --k-true 2 --eps 1 --batch-size 30 --period 5 "
    "--k-cluster 2 --batches 12 ";

}  // namespace

TEST_CASE("gen is deterministic and validates eps") {
  const fs::path dir = work_dir();
  const fs::path s1 = dir / "s1.csv", s2 = dir / "s2.csv";
  CHECK(run_cmd(kBin + kGenFlags + "--seed 7 --out " + s1.string()).exit_code == 0);
  CHECK(run_cmd(kBin + kGenFlags + "--seed 7 --out " + s2.string()).exit_code == 0);
  CHECK(slurp(s1) == slurp(s2));
  CHECK(!slurp(s1).empty());

  const auto bad = run_cmd(kBin + " gen --eps 0 --out " + (dir / "x.csv").string());
  CHECK(bad.exit_code == 2);
}

TEST_CASE("gen output reports the achieved drift ratios") {
  const fs::path dir = work_dir();
  const auto res =
      run_cmd(kBin + kGenFlags + "--seed 9 --out " + (dir / "s3.csv").string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("drift 1: achieved ratio") != std::string::npos);
  CHECK(res.output.find("drift 2: achieved ratio") != std::string::npos);
}

TEST_CASE("SKM_SEED environment variable fills in when --seed is absent") {
  const fs::path dir = work_dir();
  const fs::path a = dir / "env_a.csv", b = dir / "env_b.csv";
  CHECK(run_cmd("SKM_SEED=123 " + kBin + kGenFlags + "--out " + a.string())
            .exit_code == 0);
  CHECK(run_cmd(kBin + kGenFlags + "--seed 123 --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  // Flag wins over the environment.
  const fs::path c = dir / "env_c.csv";
  CHECK(run_cmd("SKM_SEED=55 " + kBin + kGenFlags + "--seed 123 --out " + c.string())
            .exit_code == 0);
  CHECK(slurp(c) == slurp(b));
}

TEST_CASE("run: CSV contracts, determinism, filtering") {
  const fs::path dir = work_dir();
  const std::string base =
      kBin + " run --d 2 --pool-n 300 --k-true 3 --eps 1 --batch-size 40 "
             "--tau 5 --k 3 --m 2 --reps 1 --measured 10 --seed 3 ";
  const fs::path rec1 = dir / "rec1.csv", sum1 = dir / "sum1.csv";
  const fs::path rec2 = dir / "rec2.csv", sum2 = dir / "sum2.csv";

  const auto r1 = run_cmd(base + "--records " + rec1.string() + " --summary " +
                          sum1.string());
  CHECK(r1.exit_code == 0);
  const std::string records = slurp(rec1);
  CHECK(records.rfind("algo,eps,K,m,rho,rep,global_batch,batch_in_concept,"
                      "init_surr,conv_surr,conv_skm,distances,iterations\n",
                      0) == 0);
  CHECK(slurp(sum1).rfind("algo,eps,K,m,batch_index,metric,median,q1,q3\n", 0) ==
        0);

  const auto r2 = run_cmd(base + "--records " + rec2.string() + " --summary " +
                          sum2.string());
  CHECK(r2.exit_code == 0);
  CHECK(records == slurp(rec2));
  CHECK(slurp(sum1) == slurp(sum2));

  const fs::path rec3 = dir / "rec3.csv";
  const auto r3 = run_cmd(base + "--algorithms pskm,fskm-hi --records " +
                          rec3.string() + " --summary " + (dir / "s.csv").string());
  CHECK(r3.exit_code == 0);
  const std::string filtered = slurp(rec3);
  CHECK(filtered.find("pskm,") != std::string::npos);
  CHECK(filtered.find("fskm-hi,") != std::string::npos);
  CHECK(filtered.find("fskm-upc") == std::string::npos);
  CHECK(filtered.find("fskm-icb") == std::string::npos);
  CHECK(filtered.find("fskm-wki") == std::string::npos);
}

TEST_CASE("run validates the config exhaustively") {
  const auto res = run_cmd(kBin + " run --eps 0.005 --k 0 --batch-size 3");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("epsilon") != std::string::npos);
  CHECK(res.output.find("k must be >= 1") != std::string::npos);
}

TEST_CASE("run accepts a config file and rejects unknown keys") {
  const fs::path dir = work_dir();
  const fs::path good = dir / "good.cfg";
  {
    std::ofstream out(good);
    out << "# tiny config\n"
        << "d = 2\npool_n = 300\nk_true = 3\nepsilon = 1\nbatch_size = 40\n"
        << "tau = 5\nk = 3\nm = 2\nrepetitions = 1\nmeasured_batches = 6\n"
        << "seed = 4\nalgorithms = pskm,fskm-upc\n";
  }
  const fs::path rec = dir / "cfg_rec.csv";
  const auto ok = run_cmd(kBin + " run --config " + good.string() + " --records " +
                          rec.string() + " --summary " + (dir / "cfg_sum.csv").string());
  CHECK(ok.exit_code == 0);
  CHECK(slurp(rec).find("fskm-upc") != std::string::npos);

  const fs::path bad = dir / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "d = 2\nnot_a_key = 5\n";
  }
  const auto rejected = run_cmd(kBin + " run --config " + bad.string());
  CHECK(rejected.exit_code == 2);
  CHECK(rejected.output.find("not_a_key") != std::string::npos);
}

TEST_CASE("run can replay a generated stream") {
  const fs::path dir = work_dir();
  const fs::path stream = dir / "replay.csv";
  // warmup 8 matches t_max for rho(eps=1, m=2): burn-in stays in one concept.
  CHECK(run_cmd(kBin + " gen --d 2 --n 400 --k-true 3 --eps 1 --batch-size 40 "
                       "--period 5 --k-cluster 3 --warmup 8 --batches 18 --seed 6 "
                       "--out " + stream.string()).exit_code == 0);
  const auto res = run_cmd(kBin + " run --stream " + stream.string() +
                           " --k 3 --m 2 --tau 5 --eps 1 --reps 1 --measured 10 "
                           "--seed 3 --records " + (dir / "sr.csv").string() +
                           " --summary " + (dir / "ss.csv").string());
  CHECK(res.exit_code == 0);
}

TEST_CASE("bound writes a coverage CSV; eps 0 keeps the difference centered") {
  const fs::path dir = work_dir();
  const fs::path cov = dir / "cov.csv";
  const auto res = run_cmd(kBin +
                           " bound --rho 0.676 --eps 0.5 --n 100 --delta 0.05 "
                           "--reps 10 --pool-n 800 --k-true 2 --old-batches 8 "
                           "--new-batches 4 --seed 2 --out " + cov.string());
  CHECK(res.exit_code == 0);
  const std::string text = slurp(cov);
  CHECK(text.rfind("T,empirical_coverage,mean_diff,center,e_halfwidth\n", 0) == 0);

  const auto zero = run_cmd(kBin +
                            " bound --rho 0.676 --eps 0 --n 100 --delta 0.32 "
                            "--reps 10 --pool-n 800 --k-true 2 --old-batches 8 "
                            "--new-batches 4 --seed 2 --out " +
                            (dir / "cov0.csv").string());
  CHECK(zero.exit_code == 0);
  CHECK(zero.output.find("empirical epsilon = 0") != std::string::npos);
}

TEST_CASE("report aggregates one or more records files") {
  const fs::path dir = work_dir();
  const fs::path rec = dir / "rep_rec.csv";
  const std::string base =
      kBin + " run --d 2 --pool-n 300 --k-true 3 --eps 1 --batch-size 40 "
             "--tau 5 --k 3 --m 2 --reps 1 --measured 10 --seed 3 ";
  CHECK(run_cmd(base + "--records " + rec.string() + " --summary " +
                (dir / "rep_sum.csv").string()).exit_code == 0);

  const auto rep = run_cmd(kBin + " report " + rec.string());
  CHECK(rep.exit_code == 0);
  CHECK(rep.output.rfind("algo,eps,K,m,batch_index,metric,median,q1,q3\n", 0) == 0);
  // Single file must reproduce the summary the run wrote.
  CHECK(rep.output == slurp(dir / "rep_sum.csv"));

  const auto two = run_cmd(kBin + " report " + rec.string() + " " + rec.string() +
                           " --indices 1,2");
  CHECK(two.exit_code == 0);

  const auto gp = run_cmd(kBin + " report --gnuplot " + rec.string());
  CHECK(gp.exit_code == 0);
  CHECK(gp.output.rfind("# algo eps K m batch_index metric median q1 q3\n", 0) ==
        0);

  // Header-only records file: empty table, success.
  const fs::path empty = dir / "empty.csv";
  {
    std::ofstream out(empty);
    out << "algo,eps,K,m,rho,rep,global_batch,batch_in_concept,init_surr,"
           "conv_surr,conv_skm,distances,iterations\n";
  }
  const auto none = run_cmd(kBin + " report " + empty.string());
  CHECK(none.exit_code == 0);

  const auto malformed = run_cmd(kBin + " report " + (dir / "good.cfg").string());
  CHECK(malformed.exit_code == 3);
}
