#include <doctest.h>

#include <cmath>
#include <set>

#include "ctrace/reconstruction.hpp"
#include "support.hpp"

using namespace ctrace;
using test::make_bn;
using test::make_dag;
using test::make_population;

namespace {

CredalNet uniform_rows(const Dag& g, Interval iv) {
  std::vector<IntervalCpt> icpts;
  for (const auto& v : g.variables()) {
    icpts.push_back({v.id, v.cardinality,
                     std::vector<Interval>(g.num_parent_configurations(v.id) * v.cardinality, iv)});
  }
  return CredalNet(g, std::move(icpts));
}

}  // namespace

TEST_SUITE("reconstruction") {

TEST_CASE("recover_from_idm inverts a marginal row") {
  const Dag one = make_dag(1, {});
  std::vector<std::vector<int>> rows(7, {0});
  rows.insert(rows.end(), 3, {1});
  const auto rec = recover_from_idm(idm_from_data(one, make_population(rows), 1.0), 1.0);
  CHECK(rec.sample_size == 10.0);
  CHECK(rec.row_totals[0][0] == 10.0);
  CHECK(rec.entry_counts[0][1] == 3.0);
  CHECK(rec.bn.cpt(0).table[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rec.integral);
}

TEST_CASE("recover_from_idm on a vacuous row gives a zero count and a uniform row") {
  const Dag chain = make_dag(2, {{0, 1}});
  const auto rec = recover_from_idm(idm_from_data(chain, make_population({{0, 1}, {0, 0}}), 1.0), 1.0);
  CHECK(rec.row_totals[1][1] == 0.0);
  CHECK(rec.bn.cpt(1).row(1)[0] == 0.5);
  CHECK(rec.bn.cpt(1).row(1)[1] == 0.5);
  CHECK(rec.row_totals[1][0] == 2.0);
  CHECK(rec.sample_size == 2.0);
}

TEST_CASE("recover_from_idm round trip") {
  Rng rng(Seed{21});
  for (int trial = 0; trial < 30; ++trial) {
    const Dag g = test::random_small_dag(rng, 6, 3);
    const std::size_t n = 20 + rng.below(400);
    const Population d = forward_sample(random_parameters(g, Seed{rng.next()}), n, Seed{rng.next()});
    for (double s : {1.0, 10.0, 1000.0}) {
      const auto rec = recover_from_idm(idm_from_data(g, d, s), s);
      const BayesNet ml = mle(g, d);
      CHECK(rec.sample_size == static_cast<double>(n));
      CHECK(rec.integral);
      const auto counts = count_families(g, d);
      for (const auto& v : g.variables()) {
        for (std::size_t k = 0; k < ml.cpt(v.id).table.size(); ++k) {
          CHECK(std::abs(rec.bn.cpt(v.id).table[k] - ml.cpt(v.id).table[k]) <= 1e-9);
          CHECK(rec.entry_counts[v.id][k] == counts.per_variable[v.id][k]);
        }
      }
    }
  }
}

TEST_CASE("recover_from_idm failures") {
  // Unequal widths within a row (binary rows with reachable bounds always
  // have equal widths, so use three states).
  const Dag three = test::make_dag(std::vector<int>{3}, {});
  CredalNet uneven(three, {{0, 3, {{0.1, 0.4}, {0.2, 0.4}, {0.3, 0.5}}}});
  CHECK_THROWS_AS(recover_from_idm(uneven, 1.0), ReconstructionError);
  try {
    recover_from_idm(uneven, 1.0);
  } catch (const ReconstructionError& e) {
    CHECK(e.failure() == ReconstructionFailure::not_idm);
  }
  // Zero width would need an infinite count.
  const Dag one = make_dag(1, {});
  CredalNet point(one, {{0, 2, {{0.3, 0.3}, {0.7, 0.7}}}});
  try {
    recover_from_idm(point, 1.0);
    FAIL("expected a failure");
  } catch (const ReconstructionError& e) {
    CHECK(e.failure() == ReconstructionFailure::infinite_count);
  }
}

TEST_CASE("recover_from_contamination examples") {
  const Dag one = make_dag(1, {});
  const auto rec = recover_from_contamination(contaminate(make_bn(one, {{{0.5, 0.5}}}), 0.2));
  CHECK(std::abs(rec.eps - 0.2) <= 1e-12);
  CHECK(rec.bn.cpt(0).table[0] == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(Seed{8});
  for (int trial = 0; trial < 30; ++trial) {
    const Dag g = test::random_small_dag(rng, 6, 3);
    const BayesNet bn = random_parameters(g, Seed{rng.next()});
    const double eps = 0.01 + 0.97 * rng.uniform();
    const auto back = recover_from_contamination(contaminate(bn, eps));
    CHECK(std::abs(back.eps - eps) <= 1e-12);
    for (const auto& v : g.variables()) {
      for (std::size_t k = 0; k < bn.cpt(v.id).table.size(); ++k) {
        CHECK(std::abs(back.bn.cpt(v.id).table[k] - bn.cpt(v.id).table[k]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("recover_from_contamination rejects other networks") {
  const Dag chain = make_dag(2, {{0, 1}});
  // Rows with different counts have different IDM widths.
  const Population d = make_population({{0, 0}, {0, 1}, {0, 1}, {1, 1}});
  try {
    recover_from_contamination(idm_from_data(chain, d, 1.0));
    FAIL("expected a failure");
  } catch (const ReconstructionError& e) {
    CHECK(e.failure() == ReconstructionFailure::not_contamination);
  }
  try {
    recover_from_contamination(uniform_rows(chain, {0.0, 1.0}));
    FAIL("expected a failure");
  } catch (const ReconstructionError& e) {
    CHECK(e.failure() == ReconstructionFailure::unrecoverable);
  }
}

TEST_CASE("classify_cn examples") {
  const Dag chain = make_dag(2, {{0, 1}});
  const BayesNet bn = make_bn(chain, {{{0.3, 0.7}}, {{0.6, 0.4}, {0.1, 0.9}}});
  CHECK(classify_cn(contaminate(bn, 1e-300)).kind == CnClass::singleton);
  CHECK(classify_cn(uniform_rows(chain, {0.0, 1.0})).kind == CnClass::vacuous);
  const auto cont = classify_cn(contaminate(bn, 0.3));
  CHECK(cont.kind == CnClass::contamination_like);
  CHECK(std::abs(cont.eps - 0.3) <= 1e-12);

  const Population d = make_population({{0, 0}, {0, 1}, {0, 1}, {1, 1}});
  const auto idm = classify_cn(idm_from_data(chain, d, 2.0));
  CHECK(idm.kind == CnClass::idm_like);
  CHECK(idm.uniform_s);
  CHECK(idm.sample_to_s_ratio[0] == doctest::Approx(4.0 / 2.0));
  CHECK(idm.count_to_s_ratio[1][0] == doctest::Approx(3.0 / 2.0));
  CHECK(idm.count_to_s_ratio[1][1] == doctest::Approx(1.0 / 2.0));

  const auto mixed = classify_cn(idm_from_data(chain, d, std::map<int, double>{{0, 1.0}, {1, 5.0}}));
  CHECK(mixed.kind == CnClass::idm_like);
  CHECK_FALSE(mixed.uniform_s);
  CHECK(mixed.sample_to_s_ratio[0] == doctest::Approx(4.0));
  CHECK(mixed.sample_to_s_ratio[1] == doctest::Approx(4.0 / 5.0));

  const Dag three = test::make_dag(std::vector<int>{3}, {});
  CHECK(classify_cn(CredalNet(three, {{0, 3, {{0.1, 0.4}, {0.2, 0.4}, {0.3, 0.5}}}})).kind ==
        CnClass::unknown);
  CHECK(to_string(CnClass::idm_like) == "idm_like");
  CHECK(to_string(CnClass::contamination_like) == "contamination_like");
}

TEST_CASE("IDM networks with several row counts never look contaminated") {
  Rng rng(Seed{3});
  for (int trial = 0; trial < 40; ++trial) {
    const Dag g = test::random_small_dag(rng, 5, 2, 0.6);
    const Population d = forward_sample(random_parameters(g, Seed{rng.next()}), 30 + rng.below(200),
                                        Seed{rng.next()});
    const CredalNet cn = idm_from_data(g, d, 1.0 + 10.0 * rng.uniform());
    const auto counts = count_families(g, d);
    std::set<std::uint64_t> totals;
    for (const auto& v : g.variables()) {
      for (std::size_t j = 0; j < g.num_parent_configurations(v.id); ++j) {
        totals.insert(counts.row_total(v.id, j, v.cardinality));
      }
    }
    if (totals.size() < 2) continue;
    CHECK(classify_cn(cn).kind != CnClass::contamination_like);
  }
}

}  // TEST_SUITE
