#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TEXTMAG_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int st = pclose(pipe);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

const std::string kUniform = std::string("--model ") + TEXTMAG_MODELS_DIR + "/uniform_ab_n3.json";
const std::string kBigram = std::string("--model ") + TEXTMAG_MODELS_DIR + "/bigram_abc_n4.json";

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("textmag_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("magnitude at t = 1") {
  const auto r = run("magnitude " + kUniform + " --t-min 1 --t-max 1 --steps 1");
  CHECK(r.status == 0);
  CHECK(r.out == "t,f_entropy,f_mobius,f_dense,f_euler\n1,7,7,7,7\n");
}

TEST_CASE("magnitude grid and single method") {
  const auto r = run("magnitude " + kUniform + " --t-min 0.5 --t-max 2 --steps 4 --method entropy");
  CHECK(r.status == 0);
  // 10 - 3^{2-t} at t = 0.5, 1, 1.5, 2.
  CHECK(r.out == "t,f_entropy,f_mobius,f_dense,f_euler\n0.5,4.80384757729,,,\n1,7,,,\n1.5,8.26794919243,,,\n2,9,,,\n");
  const auto path = temp_file("curve.csv");
  CHECK(run("magnitude " + kUniform + " --t-min 2 --t-max 2 --steps 1 --out " + path.string()).status == 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "t,f_entropy,f_mobius,f_dense,f_euler\n2,9,9,9,9\n");
  std::filesystem::remove(path);
}

TEST_CASE("magnitude of a subspace") {
  const auto r = run("magnitude " + kUniform + " --prompt a --t-min 2 --t-max 2 --steps 1 --method dense");
  CHECK(r.out == "t,f_entropy,f_mobius,f_dense,f_euler\n2,,,3.66666666667,\n");
}

TEST_CASE("verify") {
  const auto r = run("verify " + kUniform);
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS homology.H0") != std::string::npos);
  CHECK(run("verify --deep --seed 3 " + kBigram).status == 0);
  CHECK(run("verify " + kBigram + " --prompt \"b a\"").status == 0);
}

TEST_CASE("perplexity and diversity") {
  const auto r = run("perplexity " + kUniform + " --text \"a b\"");
  CHECK(r.status == 0);
  CHECK(r.out == "3\n");
  CHECK(run("diversity " + kUniform + " --t 1").out == "1.83102048111\n");
  CHECK(run("diversity " + kUniform + " --t 1 --prompt a").out == "1.09861228867\n");
}

TEST_CASE("build") {
  const auto dump = temp_file("dump.csv");
  const auto r = run("build " + kUniform + " --dump " + dump.string());
  CHECK(r.status == 0);
  CHECK(r.out.find("objects,10\n") != std::string::npos);
  CHECK(r.out.find("terminating,7\n") != std::string::npos);
  CHECK(r.out.find("hasse_edges,9\n") != std::string::npos);
  std::ifstream in(dump);
  std::string header;
  std::getline(in, header);
  CHECK(header == "text,length,finished,pi_from_root");
  std::filesystem::remove(dump);
}

TEST_CASE("homology and entropy tables") {
  const auto h = run("homology " + kUniform + " --k-max 4");
  CHECK(h.status == 0);
  CHECK(h.out ==
        "k,ell,rank_MC,rank_H\n0,0,10,10\n1,1.09861228867,9,9\n1,2.19722457734,6,0\n2,2.19722457734,6,0\n");
  const auto e = run("entropy " + kUniform);
  CHECK(e.status == 0);
  CHECK(e.out.rfind("text,shannon,tsallis_2,partition_2\n<bos>,1.09861228867,0.666666666667,0.333333333333\n", 0) == 0);
  CHECK(e.out.find("f_prime_1,3.295836866\n") != std::string::npos);
}

TEST_CASE("digraph") {
  const auto path = temp_file("edges.txt");
  std::ofstream(path) << "1 1 1\n2 2 1\n1 2 0.37\n";
  const auto r = run("digraph --edges " + path.string() + " --invert 1 2");
  CHECK(r.status == 0);
  CHECK(r.out == "vertices,2\nedges,3\ndet,1\nconnections,1\ninverse,-0.37\n");
  std::filesystem::remove(path);
}

TEST_CASE("identical invocations give identical output") {
  const std::string args = "magnitude " + kBigram + " --t-min 0.3 --t-max 5 --steps 9";
  CHECK(run(args).out == run(args).out);
  CHECK(run("homology " + kBigram + " --k-max 4").out == run("homology " + kBigram + " --k-max 4").out);
}

TEST_CASE("usage and input errors exit with 2") {
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("perplexity --text a").status == 2);
  CHECK(run("magnitude " + kUniform + " --t-min 2 --t-max 1 --steps 3").status == 2);
  CHECK(run("magnitude " + kUniform + " --t-min 1 --t-max 2 --steps 2 --method simpson").status == 2);
  CHECK(run("perplexity --model /nonexistent.json --text a").status == 2);
  CHECK(run("perplexity " + kUniform + " --text \"a c\"").status == 2);
  CHECK(run("build " + kUniform + " --prompt \"a a a\"").status == 2);
  CHECK(run("--help").status == 0);
}
