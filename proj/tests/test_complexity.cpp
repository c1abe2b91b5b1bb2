#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "collapselab/complexity/aid.hpp"
#include "collapselab/complexity/bdm.hpp"
#include "collapselab/complexity/ctm.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/tm/census.hpp"

using namespace collapselab;
using Catch::Approx;

namespace {

const OutputFrequencyTable& census22() {
  static const OutputFrequencyTable table = build_frequency_table(2, 2, 500);
  return table;
}

}  // namespace

TEST_CASE("ctm basics on the two-state census") {
  const OutputFrequencyTable& table = census22();

  // one-step halters give "0" and "1" a census count of 3456 each:
  // CTM = -log2(3456/20736) = log2 6
  const double log2_6 = std::log2(6.0);
  CHECK(ctm("0", table).value_bits == Approx(log2_6).margin(1e-12));
  CHECK(ctm("1", table).value_bits == Approx(log2_6).margin(1e-12));
  CHECK(ctm("0", table).value_bits < ctm("010", table).value_bits);

  // the most frequent output minimizes CTM over the table
  double min_ctm = 1e9;
  std::string argmin;
  for (const auto& [output, count] : table.counts) {
    const double value = ctm(output, table).value_bits;
    if (value < min_ctm) {
      min_ctm = value;
      argmin = output;
    }
  }
  CHECK((argmin == "0" || argmin == "1"));

  // monotonicity: higher count <=> lower CTM
  for (const auto& [o1, c1] : table.counts)
    for (const auto& [o2, c2] : table.counts)
      if (c1 > c2)
        CHECK(ctm(o1, table).value_bits < ctm(o2, table).value_bits);
}

TEST_CASE("ctm boundary and miss policies") {
  // a census where one output soaks up every machine scores 0 bits
  OutputFrequencyTable degenerate;
  degenerate.space_id = {1, 2, 10, "synthetic"};
  degenerate.total_machines = 64;
  degenerate.halted_machines = 64;
  degenerate.counts["0"] = 64;
  CHECK(ctm("0", degenerate).value_bits == 0.0);

  const OutputFrequencyTable& table = census22();
  CHECK_THROWS_AS(ctm("0000", table), InvariantError);

  CtmOptions lenient;
  lenient.miss_policy = MissPolicy::max_plus_one;
  const ComplexityEstimate miss = ctm("0000", table, lenient);
  CHECK(miss.miss_policy_applied);
  double max_ctm = 0.0;
  for (const auto& [output, count] : table.counts)
    max_ctm = std::max(max_ctm, ctm(output, table).value_bits);
  CHECK(miss.value_bits == Approx(max_ctm + 1.0).margin(1e-12));

  // hit estimates are not flagged
  CHECK(!ctm("0", table, lenient).miss_policy_applied);

  // halting-conditional normalization is strictly smaller in bits
  CtmOptions halting;
  halting.normalization = CtmNormalization::halted_machines;
  CHECK(ctm("0", table, halting).value_bits < ctm("0", table).value_bits);
  CHECK(ctm("0", table, halting).value_bits ==
        Approx(-std::log2(3456.0 / 9784.0)).margin(1e-12));
}

TEST_CASE("bdm block laws") {
  const OutputFrequencyTable& table = census22();
  BdmConfig k1;
  k1.block_size = 1;

  const double ctm0 = ctm("0", table).value_bits;

  // single block reduces to CTM
  CHECK(bdm("0", k1, table).value_bits == ctm0);
  // repeated block adds exactly log2(multiplicity)
  for (std::size_t r : {1u, 2u, 4u, 8u}) {
    const std::string object(r, '0');
    CHECK(bdm(object, k1, table).value_bits ==
          ctm0 + std::log2(static_cast<double>(r)));
  }

  // hand evaluation with k = 2 over the census
  BdmConfig k2;
  k2.block_size = 2;
  const double ctm01 = ctm("01", table).value_bits;
  const double ctm10 = ctm("10", table).value_bits;
  CHECK(bdm("0101", k2, table).value_bits == Approx(ctm01 + 1.0).margin(1e-12));
  CHECK(bdm("0110", k2, table).value_bits ==
        Approx(ctm01 + ctm10).margin(1e-12));

  // boundary policies for a trailing short block
  BdmConfig short_final = k2;
  CHECK(bdm("010", short_final, table).value_bits ==
        Approx(ctm01 + ctm("0", table).value_bits).margin(1e-12));
  BdmConfig drop = k2;
  drop.boundary = BlockBoundary::drop_remainder;
  CHECK(bdm("010", drop, table).value_bits == Approx(ctm01).margin(1e-12));
  CHECK_THROWS_AS(bdm("0", drop, table), InvariantError);

  // block size must stay within what the census can score
  BdmConfig too_big;
  too_big.block_size = table.max_output_length() + 1;
  CHECK_THROWS_AS(bdm("00000000", too_big, table), InvariantError);
  CHECK_THROWS_AS(bdm("0101", BdmConfig{0, BlockBoundary::short_final_block, {}},
                      table),
                  InvariantError);
}

TEST_CASE("bdm miss handling") {
  const OutputFrequencyTable& table = census22();
  BdmConfig strict;
  strict.block_size = 4;
  // "0000" is not a two-state output (an all-zero span of four cells cannot
  // be read before the two blank-tape entries are both committed)
  CHECK_THROWS_AS(bdm("00000000", strict, table), InvariantError);

  BdmConfig lenient = strict;
  lenient.ctm.miss_policy = MissPolicy::max_plus_one;
  const ComplexityEstimate estimate = bdm("00000000", lenient, table);
  CHECK(estimate.miss_policy_applied);
  CHECK(estimate.value_bits > 0.0);

  // "1111" is in the census, so the constant-ones string never misses
  const ComplexityEstimate ones = bdm("11111111", lenient, table);
  CHECK(!ones.miss_policy_applied);
  CHECK(ones.value_bits ==
        Approx(ctm("1111", table).value_bits + 1.0).margin(1e-12));
}

TEST_CASE("perturbation application") {
  CHECK(Perturbation::flip(0).apply("0101") == "1101");
  CHECK(Perturbation::substitute(1, '0').apply("0101") == "0001");
  CHECK(Perturbation::delete_block(1, 2).apply("0101") == "01");
  CHECK_THROWS_AS(Perturbation::flip(4).apply("0101"), InvariantError);
  CHECK_THROWS_AS(Perturbation::delete_block(2, 3).apply("0101"),
                  InvariantError);
  CHECK_THROWS_AS(Perturbation::delete_block(0, 4).apply("0101"),
                  InvariantError);

  // inverses
  CHECK(Perturbation::flip(2).inverse_on("0101").apply(
            Perturbation::flip(2).apply("0101")) == "0101");
  const Perturbation sub = Perturbation::substitute(0, '1');
  CHECK(sub.inverse_on("0101").apply(sub.apply("0101")) == "0101");
  CHECK(!Perturbation::delete_block(0, 1).invertible());
}

TEST_CASE("aid deltas") {
  const OutputFrequencyTable& table = census22();
  BdmConfig cfg;
  cfg.block_size = 2;
  cfg.ctm.miss_policy = MissPolicy::max_plus_one;

  // substituting a symbol with itself is the identity perturbation
  CHECK(aid_delta("0101", Perturbation::substitute(2, '0'), cfg, table) == 0.0);

  // antisymmetry for invertible perturbations
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::string object;
    const std::size_t length = 2 + rng.below(7);
    for (std::size_t i = 0; i < length; ++i)
      object.push_back(rng.below(2) ? '1' : '0');
    const Perturbation tau =
        rng.below(2) ? Perturbation::flip(rng.below(length))
                     : Perturbation::substitute(rng.below(length),
                                                rng.below(2) ? '1' : '0');
    const std::string perturbed = tau.apply(object);
    const double forward = aid_delta(object, tau, cfg, table);
    const double backward =
        aid_delta(perturbed, tau.inverse_on(object), cfg, table);
    CHECK(forward + backward == Approx(0.0).margin(1e-12));
  }

  // breaking a run of zeros raises complexity under the census
  BdmConfig k4;
  k4.block_size = 4;
  k4.ctm.miss_policy = MissPolicy::max_plus_one;
  CHECK(aid_delta("00000000", Perturbation::flip(0), k4, table) > 0.0);
}

TEST_CASE("perturbation ranking") {
  const OutputFrequencyTable& table = census22();
  BdmConfig cfg;
  cfg.block_size = 2;
  cfg.ctm.miss_policy = MissPolicy::max_plus_one;

  const std::vector<RankedPerturbation> single =
      rank_perturbations("0101", {Perturbation::flip(0)}, cfg, table);
  REQUIRE(single.size() == 1);

  // equal magnitudes preserve input order (stable sort)
  const std::vector<RankedPerturbation> ties = rank_perturbations(
      "01", {Perturbation::substitute(0, '0'), Perturbation::substitute(1, '1')},
      cfg, table);
  CHECK(ties[0].tau.position == 0);
  CHECK(ties[1].tau.position == 1);

  // a period-breaking flip outranks a period-preserving substitution
  const std::vector<RankedPerturbation> ranked = rank_perturbations(
      "01010101",
      {Perturbation::substitute(0, '0'), Perturbation::flip(0)}, cfg, table);
  CHECK(ranked[0].tau.kind == Perturbation::Kind::flip);
  CHECK(std::abs(ranked[0].delta_bits) > std::abs(ranked[1].delta_bits));
}

TEST_CASE("perturbation spec parsing") {
  const std::vector<Perturbation> taus =
      parse_perturbation_spec("flip@0;sub@2=1;del@1+2", 6);
  REQUIRE(taus.size() == 3);
  CHECK(taus[0].kind == Perturbation::Kind::flip);
  CHECK(taus[1].kind == Perturbation::Kind::substitute);
  CHECK(taus[1].symbol == '1');
  CHECK(taus[2].kind == Perturbation::Kind::delete_block);
  CHECK(taus[2].length == 2);

  CHECK(parse_perturbation_spec("flip@all", 5).size() == 5);
  CHECK_THROWS_AS(parse_perturbation_spec("twist@1", 4), InvariantError);
  CHECK_THROWS_AS(parse_perturbation_spec("", 4), InvariantError);
}
