#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "collapselab/rng.hpp"
#include "collapselab/tm/census.hpp"
#include "collapselab/tm/machine.hpp"
#include "collapselab/tm/table_io.hpp"

using namespace collapselab;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("machine space sizes") {
  CHECK(machine_count(1, 2) == 64);
  CHECK(machine_count(2, 2) == 20736);
  CHECK(machine_count(3, 2) == 16777216ULL);
  CHECK(machine_count(4, 2) == 25600000000ULL);
  CHECK_THROWS_AS(machine_count(10, 10), InvariantError);
  CHECK_THROWS_AS(machine_count(0, 2), InvariantError);
  CHECK_THROWS_AS(machine_count(1, 1), InvariantError);
}

TEST_CASE("decode is a bijection") {
  // index 0 is the all-zero table: write 0, move L, next state 0 everywhere
  const TuringMachineSpec first = decode_machine(0, 2, 2);
  for (const Transition& t : first.transitions) {
    CHECK(t.write == 0);
    CHECK(t.move == kMoveLeft);
    CHECK(t.next == 0);
  }

  for (std::uint64_t index = 0; index < 64; ++index)
    CHECK(encode_machine(decode_machine(index, 1, 2)) == index);

  Rng rng(314);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::uint64_t index = rng.below(machine_count(3, 2));
    CHECK(encode_machine(decode_machine(index, 3, 2)) == index);
  }

  // distinct indices give distinct machines
  const TuringMachineSpec a = decode_machine(123, 2, 2);
  const TuringMachineSpec b = decode_machine(124, 2, 2);
  CHECK(!(a == b));

  CHECK_THROWS_AS(decode_machine(64, 1, 2), InvariantError);
}

TEST_CASE("running a machine") {
  // (state 0, read 0): write 1, move right, halt -> output "1" in one step
  TuringMachineSpec halter;
  halter.n_states = 1;
  halter.n_symbols = 2;
  halter.transitions = {{1, kMoveRight, 1}, {0, kMoveLeft, 0}};
  const RunOutcome outcome = run_machine(halter, 100);
  CHECK(outcome.status == RunStatus::halted);
  CHECK(outcome.output == "1");
  CHECK(outcome.steps_used == 1);

  // two states bouncing between each other over blank tape never halt
  TuringMachineSpec looper;
  looper.n_states = 2;
  looper.n_symbols = 2;
  looper.transitions = {{0, kMoveRight, 1},
                        {0, kMoveLeft, 0},
                        {0, kMoveRight, 0},
                        {0, kMoveLeft, 1}};
  for (std::uint64_t budget : {1ULL, 10ULL, 1000ULL}) {
    const RunOutcome loop_outcome = run_machine(looper, budget);
    CHECK(loop_outcome.status == RunStatus::budget_exceeded);
    CHECK(loop_outcome.steps_used == budget);
  }

  CHECK_THROWS_AS(run_machine(halter, 0), InvariantError);
}

TEST_CASE("halted outcomes are invariant to a larger budget") {
  Rng rng(555);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t index = rng.below(machine_count(2, 2));
    const TuringMachineSpec spec = decode_machine(index, 2, 2);
    const RunOutcome small = run_machine(spec, 100);
    if (small.status != RunStatus::halted) continue;
    const RunOutcome large = run_machine(spec, 10000);
    CHECK(large.status == RunStatus::halted);
    CHECK(large.output == small.output);
    CHECK(large.steps_used == small.steps_used);
  }
}

TEST_CASE("the one-state space census, enumerated by hand") {
  // Machines whose (0,0) entry halts (4 of 8 codes) stop after one step and
  // print their written symbol; every other machine walks one direction over
  // blanks forever. Hence exactly 32 halters, split 16/16 between "0" and "1".
  const OutputFrequencyTable table = build_frequency_table(1, 2, 100);
  CHECK(table.total_machines == 64);
  CHECK(table.halted_machines == 32);
  REQUIRE(table.counts.size() == 2);
  CHECK(table.counts.at("0") == 16);
  CHECK(table.counts.at("1") == 16);
}

TEST_CASE("census is reproducible and partition invariant") {
  const OutputFrequencyTable reference = build_frequency_table(2, 2, 500);
  CHECK(reference.halted_machines > 0);
  CHECK(reference.halted_machines < reference.total_machines);

  for (unsigned workers : {2u, 4u, 16u}) {
    const OutputFrequencyTable other =
        build_frequency_table(2, 2, 500, {.workers = workers});
    CHECK(other == reference);
  }

  // partial ranges merge to the whole
  std::uint64_t halted_lo = 0, halted_hi = 0;
  const CountMap lo = census_range(2, 2, 500, 0, 10000, 1, &halted_lo);
  const CountMap hi = census_range(2, 2, 500, 10000, 20736, 3, &halted_hi);
  CHECK(halted_lo + halted_hi == reference.halted_machines);
  CountMap merged = lo;
  for (const auto& [output, count] : hi) merged[output] += count;
  CHECK(merged == reference.counts);
}

TEST_CASE("census sanity for the two-state space") {
  const OutputFrequencyTable table = build_frequency_table(2, 2, 500);
  const double fraction = static_cast<double>(table.halted_machines) /
                          static_cast<double>(table.total_machines);
  CHECK(fraction > 0.0);
  CHECK(fraction < 1.0);

  // single-symbol outputs dominate
  std::vector<std::pair<std::uint64_t, std::string>> by_count;
  for (const auto& [output, count] : table.counts)
    by_count.emplace_back(count, output);
  std::sort(by_count.rbegin(), by_count.rend());
  const std::string top0 = by_count[0].second;
  const std::string top1 = by_count[1].second;
  CHECK(((top0 == "0" && top1 == "1") || (top0 == "1" && top1 == "0")));
  for (const auto& [output, count] : table.counts)
    if (output.size() >= 3) CHECK(table.counts.at("0") > count);
}

TEST_CASE("raising the budget never shrinks the census") {
  const OutputFrequencyTable small = build_frequency_table(2, 2, 3);
  const OutputFrequencyTable large = build_frequency_table(2, 2, 500);
  CHECK(small.halted_machines <= large.halted_machines);
  // every two-state halter stops within six steps, so budget 6 == budget 500
  const OutputFrequencyTable six = build_frequency_table(2, 2, 6);
  CHECK(six.halted_machines == large.halted_machines);
  CHECK(six.counts == large.counts);
}

TEST_CASE("sampled census modes") {
  const OutputFrequencyTable exhaustive = build_frequency_table(1, 2, 100);
  const OutputFrequencyTable all_sampled = build_frequency_table(
      1, 2, 100, {.sampled = true, .sample_size = 64, .sample_seed = 9});
  CHECK(all_sampled.counts == exhaustive.counts);
  CHECK(all_sampled.halted_machines == exhaustive.halted_machines);
  CHECK(all_sampled.space_id.formalism != exhaustive.space_id.formalism);

  const OutputFrequencyTable a = build_frequency_table(
      2, 2, 500, {.sampled = true, .sample_size = 1000, .sample_seed = 4});
  const OutputFrequencyTable b = build_frequency_table(
      2, 2, 500, {.sampled = true, .sample_size = 1000, .sample_seed = 4});
  CHECK(a == b);
  CHECK(a.total_machines == 1000);

  CHECK_THROWS_AS(
      build_frequency_table(2, 2, 500,
                            {.sampled = true, .sample_size = 30000}),
      InvariantError);
}

TEST_CASE("exhaustive mode refuses oversized spaces") {
  CHECK_THROWS_AS(build_frequency_table(4, 2, 10), InvariantError);
  // but a tighter custom limit also trips on small spaces
  CensusMode mode;
  mode.exhaustive_limit = 1000;
  CHECK_THROWS_AS(build_frequency_table(2, 2, 10, mode), InvariantError);
}

TEST_CASE("table round trip and golden file bytes") {
  const OutputFrequencyTable table = build_frequency_table(1, 2, 50);
  const std::string expected =
      "ctm-table v1\n"
      "1,2,50,wm-halt-v1,64,32\n"
      "0,16\n"
      "1,16\n"
      "checksum,fnv1a64:940ac4be21008e9b\n";
  CHECK(serialize_table(table) == expected);

  const auto path = temp_file("collapselab_tm_roundtrip.tbl");
  persist_table(table, path);
  const OutputFrequencyTable loaded = load_table(path);
  CHECK(loaded == table);
  CHECK(loaded.space_id.n_states == 1);
  CHECK(loaded.space_id.budget == 50);
  std::filesystem::remove(path);
}

TEST_CASE("table integrity failures") {
  const OutputFrequencyTable table = build_frequency_table(2, 2, 500);
  const auto path = temp_file("collapselab_tm_corrupt.tbl");
  persist_table(table, path);

  // flip one count digit: checksum must catch it
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    bytes = buf.str();
  }
  const std::size_t pos = bytes.find("0,3456");
  REQUIRE(pos != std::string::npos);
  bytes[pos + 2] = '4';
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
  }
  CHECK_THROWS_AS(load_table(path), IntegrityError);

  // unsupported version line
  CHECK_THROWS_AS(parse_table("ctm-table v9\n1,2,50,f,64,32\n", "test"),
                  IntegrityError);
  // missing checksum
  CHECK_THROWS_AS(parse_table("ctm-table v1\n1,2,50,f,64,32\n0,16\n", "test"),
                  IntegrityError);
  std::filesystem::remove(path);
}

TEST_CASE("census matches per-machine runs") {
  const OutputFrequencyTable table = build_frequency_table(2, 2, 500);
  Rng rng(808);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::uint64_t index = rng.below(machine_count(2, 2));
    const RunOutcome outcome = run_machine(decode_machine(index, 2, 2), 500);
    if (outcome.status == RunStatus::halted) {
      CHECK(table.counts.count(outcome.output) == 1);
      CHECK(table.counts.at(outcome.output) > 0);
    }
  }
}
