#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "ixsim/trial_log.hpp"

using namespace ixsim;

namespace
{

std::vector<TrialRecord> sample_records(int n)
{
  BatchSpec spec;
  spec.task = TaskKind::FullCycle;
  spec.op = novice_defaults();
  spec.n_trials = n;
  spec.seed = 8;
  return run_batch(spec).records;
}

}  // namespace

TEST(TrialLog, RoundTripsRecords)
{
  const auto records = sample_records(20);
  std::stringstream buf;
  write_log(buf, records);
  const LogReadResult back = read_log(buf);
  EXPECT_TRUE(back.errors.empty());
  ASSERT_EQ(back.records.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back.records[i], records[i]) << "record " << i;
  }
}

TEST(TrialLog, EmptyInputGivesNoRecords)
{
  std::stringstream buf;
  const LogReadResult r = read_log(buf);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.errors.empty());
}

TEST(TrialLog, CorruptLineIsReportedAndSkipped)
{
  const auto records = sample_records(20);
  std::stringstream buf;
  write_log(buf, records);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(buf, line)) {
    lines.push_back(line);
  }
  ASSERT_EQ(lines.size(), 20u);
  lines[6] = lines[6].substr(0, lines[6].size() / 2);
  std::stringstream corrupt;
  for (const auto & l : lines) {
    corrupt << l << '\n';
  }
  const LogReadResult r = read_log(corrupt);
  EXPECT_EQ(r.records.size(), 19u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 7);
  EXPECT_EQ(r.records[6], records[7]);
}

TEST(TrialLog, MissingFieldIsAnError)
{
  std::stringstream buf("{\"trial_index\": 1}\n\n[1, 2]\n");
  const LogReadResult r = read_log(buf);
  EXPECT_TRUE(r.records.empty());
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_EQ(r.errors[0].line, 1);
  EXPECT_EQ(r.errors[1].line, 3);
}

TEST(TrialLog, FileRoundTripAndMissingFile)
{
  const auto records = sample_records(2);
  const auto path = std::filesystem::temp_directory_path() / "ixsim_trial_log_test.jsonl";
  write_log(path.string(), records);
  const auto back = read_log(path.string());
  EXPECT_EQ(back.records, records);
  std::filesystem::remove(path);
  EXPECT_THROW(read_log(path.string()), IoError);
}
