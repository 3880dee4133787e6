#include "psum/app.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_support.hpp"

namespace psum {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "psum");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> small_model_flags(const fs::path& dir) {
  return {"--corpus", (dir / "corpus").string(), "--model", (dir / "m.psum").string(),
          "--epochs", "2", "--hidden-size", "8"};
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

class CliCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::scratch_dir("cli");
    ASSERT_EQ(cli({"gencorpus", "--corpus", (dir_ / "corpus").string(), "--docs", "8", "--seed", "4"}).code, 0);
    ASSERT_EQ(cli(with({"train"}, small_model_flags(dir_))).code, 0);
  }
  static fs::path dir_;
};
fs::path CliCorpus::dir_;

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({}).code, kExitBadInput);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitBadInput);
  EXPECT_EQ(cli({"train", "--epochs", "x"}).code, kExitBadInput);
}

TEST(Cli, EmptyCorpusIsBadInput) {
  const auto dir = testing::scratch_dir("cli_empty");
  fs::create_directories(dir / "docs");
  fs::create_directories(dir / "summaries");
  const auto r = cli({"train", "--corpus", dir.string(), "--model", (dir / "m.psum").string()});
  EXPECT_EQ(r.code, kExitBadInput);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SummaryLongerThanPageIsArgumentError) {
  EXPECT_EQ(cli({"sweep", "--page-lens", "4", "--summary-len", "5"}).code, kExitBadInput);
  EXPECT_EQ(cli({"train", "--page-len", "4"}).code, kExitBadInput);
}

TEST(Cli, BadConfigFile) {
  const auto dir = testing::scratch_dir("cli_conf");
  std::ofstream(dir / "bad.conf") << "epochs = 2\nwhat\n";
  EXPECT_EQ(cli({"train", "--config", (dir / "bad.conf").string()}).code, kExitBadInput);
  EXPECT_EQ(cli({"train", "--config", (dir / "none.conf").string()}).code, kExitBadInput);
}

TEST(Cli, GradcheckPassesAndDetectsCorruption) {
  const auto ok = cli({"gradcheck", "--instances", "3"});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("max relative error"), std::string::npos);
  EXPECT_EQ(cli({"gradcheck", "--instances", "3"}).out, ok.out);
  EXPECT_EQ(cli({"gradcheck", "--instances", "3", "--corrupt-gradient"}).code, kExitCheckFailed);
}

TEST_F(CliCorpus, TrainIsDeterministic) {
  const auto first = slurp(dir_ / "m.psum");
  EXPECT_EQ(first.substr(0, 5), "PSUM1");
  auto flags = small_model_flags(dir_);
  flags[3] = (dir_ / "m2.psum").string();
  const auto r = cli(with({"train"}, flags));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epoch 2 mean_loss"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "m2.psum"), first);
}

TEST_F(CliCorpus, SummarizeShortAndLongInputs) {
  std::ofstream(dir_ / "short.txt") << "First one. Second one. Third one.";
  const auto shortr = cli({"summarize", (dir_ / "short.txt").string(), "--model", (dir_ / "m.psum").string()});
  ASSERT_EQ(shortr.code, 0) << shortr.err;
  EXPECT_EQ(shortr.out, "First one.\nSecond one.\nThird one.\n");

  std::ofstream long_file(dir_ / "long.txt");
  for (int i = 0; i < 95; ++i) long_file << "Sentence number w" << i << " is here. ";
  long_file.close();
  const auto longr = cli({"summarize", (dir_ / "long.txt").string(), "--indices", "--model",
                          (dir_ / "m.psum").string()});
  ASSERT_EQ(longr.code, 0) << longr.err;
  EXPECT_EQ(std::count(longr.out.begin(), longr.out.end(), '\n'), 5);
  EXPECT_EQ(std::count(longr.out.begin(), longr.out.end(), '\t'), 5);
}

TEST_F(CliCorpus, SummarizeMissingInput) {
  EXPECT_EQ(cli({"summarize", (dir_ / "absent.txt").string(), "--model", (dir_ / "m.psum").string()}).code,
            kExitBadInput);
}

TEST_F(CliCorpus, CorruptModelExitCode) {
  auto bytes = slurp(dir_ / "m.psum");
  bytes[bytes.size() / 2] ^= 0x10;
  std::ofstream(dir_ / "bad.psum", std::ios::binary) << bytes;
  std::ofstream(dir_ / "in.txt") << "One. Two.";
  EXPECT_EQ(cli({"summarize", (dir_ / "in.txt").string(), "--model", (dir_ / "bad.psum").string()}).code,
            kExitCorruptModel);
  EXPECT_EQ(cli({"eval", "--corpus", (dir_ / "corpus").string(), "--model", (dir_ / "bad.psum").string(),
                 "--csv", (dir_ / "e.csv").string()}).code,
            kExitCorruptModel);
}

TEST_F(CliCorpus, UnwritableOutputs) {
  auto flags = small_model_flags(dir_);
  flags[3] = "/nonexistent/dir/m.psum";
  EXPECT_EQ(cli(with({"train"}, flags)).code, kExitBadOutput);
  EXPECT_EQ(cli({"eval", "--corpus", (dir_ / "corpus").string(), "--model", (dir_ / "m.psum").string(),
                 "--csv", "/nonexistent/dir/e.csv"}).code,
            kExitBadOutput);
  EXPECT_EQ(cli({"gencorpus", "--corpus", "/proc/psum_corpus", "--docs", "2"}).code, kExitBadOutput);
}

TEST_F(CliCorpus, EvalWritesCsvWithMeanRow) {
  const auto csv = dir_ / "eval.csv";
  const auto r = cli({"eval", "--corpus", (dir_ / "corpus").string(), "--model", (dir_ / "m.psum").string(),
                      "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.rfind("doc_id,rouge1_recall,rouge2_recall,precision\n", 0), 0u);
  EXPECT_NE(text.find("\nmean,"), std::string::npos);
  EXPECT_EQ(cli({"eval", "--corpus", (dir_ / "corpus").string(), "--model", (dir_ / "m.psum").string(),
                 "--csv", csv.string()}).out,
            r.out);
}

TEST_F(CliCorpus, SweepOneRowPerSetting) {
  const auto csv = dir_ / "sweep.csv";
  auto args = with({"sweep", "--page-lens", "20,10,40", "--csv", csv.string()}, small_model_flags(dir_));
  const auto r = cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.rfind("page_len,rouge1_recall,rouge2_recall\n10,", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

}  // namespace
}  // namespace psum
