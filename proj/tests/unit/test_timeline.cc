#include <doctest.h>

#include <cmath>

#include "rach/energy.h"
#include "rach/sim.h"
#include "rach/timeline.h"

using namespace rach;

namespace {

void
check_matches(const SystemParams& p)
{
    const auto e = message_energies(p);
    const double tol = 1e-9;
    CHECK(std::fabs(timeline::preamble_slot(p).energy_uj(p) - e.e_p) < tol);
    CHECK(std::fabs(timeline::rar_success(p).energy_uj(p) - e.e_msg2s) < tol);
    CHECK(std::fabs(timeline::rar_failure(p).energy_uj(p) - e.e_msg2f) < tol);
    CHECK(std::fabs(timeline::msg3(p).energy_uj(p) - e.e_msg3) < tol);
    CHECK(std::fabs(timeline::msg4_success(p).energy_uj(p) - e.e_msg4s) < tol);
    CHECK(std::fabs(timeline::msg4_failure(p).energy_uj(p) - e.e_msg4f) < tol);
    CHECK(std::fabs(timeline::data_slot(p).energy_uj(p) - e.e_data) < tol);
    CHECK(std::fabs(timeline::msga(p).energy_uj(p) - e.e_msga) < tol);
    CHECK(std::fabs(timeline::msgb_success(p).energy_uj(p) - e.e_msgbs) < tol);
    CHECK(std::fabs(timeline::msgb_fallback(p).energy_uj(p) - e.e_msgbfb) < tol);
    for (int k = 1; k <= p.harq_max; ++k)
        CHECK(std::fabs(timeline::data_harq(p, k).energy_uj(p) - data_energy_k(p, k)) < tol);
}

} // namespace

TEST_CASE("timeline primitives")
{
    const auto p = default_params();
    Timeline t;
    t.then(RadioState::Transmit, 100.0).then(RadioState::Sleep, 400.0);
    CHECK(t.duration_us() == 500.0);
    CHECK(t.energy_uj(p) == doctest::Approx(1e-3 * (500.0 * 100.0 + 0.015 * 400.0)).epsilon(1e-15));

    Timeline twice;
    twice.then(t, 2.0);
    CHECK(twice.duration_us() == 1000.0);
    CHECK(twice.energy_uj(p) == doctest::Approx(2 * t.energy_uj(p)).epsilon(1e-15));

    Timeline half;
    half.then(t, 0.5);
    CHECK(half.energy_uj(p) == doctest::Approx(0.5 * t.energy_uj(p)).epsilon(1e-15));

    CHECK(timeline::preamble_slot(p).duration_us() == doctest::Approx(p.t_s_us));
    CHECK(timeline::rar_failure(p).duration_us() == doctest::Approx(p.n_rar * p.t_s_us));
}

TEST_CASE("timeline accountant reproduces the message energies")
{
    auto p = default_params();
    check_matches(p);

    SUBCASE("several HARQ rounds and DCI gaps")
    {
        for (int k : {1, 2, 4})
            for (int dci : {1, 2, 5}) {
                p.harq_max = k;
                p.n_dci = dci;
                check_matches(p);
            }
    }

    SUBCASE("odd window lengths and other powers")
    {
        p.n_rar = 7;
        p.n_crt = 11;
        p.p_r_mw = 55.0;
        p.p_s_mw = 0.2;
        p.t_d_us = 200.0;
        check_matches(p);
    }
}

TEST_CASE("expected HARQ energy from the outcome table")
{
    auto p = default_params();
    p.harq_max = 3;
    p.bler = 0.2;
    const auto table = OutcomeEnergyTable::from(p);
    REQUIRE(table.data_harq.size() == 3);
    const double expected = 0.8 * table.data_harq[0] + 0.8 * 0.2 * table.data_harq[1] + 0.04 * table.data_harq[2];
    CHECK(std::fabs(expected - data_harq_energy(p)) < 1e-9);
}

TEST_CASE("simulator outcome energies equal the mixture branch energies")
{
    const auto p = default_params();
    const auto e = message_energies(p);
    const double tol = 1e-9;
    SlotEngine four(SchemeKind::FourStep, ReceiverModel::Advanced, p);
    SlotEngine four_sdt(SchemeKind::FourStepSDT, ReceiverModel::Advanced, p);
    SlotEngine two(SchemeKind::TwoStep, ReceiverModel::Advanced, p);
    SlotEngine two_sdt(SchemeKind::TwoStepSDT, ReceiverModel::Advanced, p);

    CHECK(std::fabs(four.outcome_energy(Outcome::Undetected, 0) - (e.e_p + e.e_msg2f)) < tol);
    CHECK(std::fabs(four.outcome_energy(Outcome::PuschLost, 0) - (e.e_p + e.e_msg2s + e.e_msg3 + e.e_msg4f)) < tol);
    CHECK(std::fabs(four.outcome_energy(Outcome::Captured, 1) -
                    (e.e_p + e.e_msg2s + e.e_msg3 + e.e_msg4s + e.e_data_harq)) < tol);
    CHECK(std::fabs(four_sdt.outcome_energy(Outcome::Captured, 0) -
                    (e.e_p + e.e_msg2s + e.e_msg3 + e.e_data + e.e_msg4s)) < tol);
    CHECK(std::fabs(two.outcome_energy(Outcome::Captured, 1) - (e.e_msga + e.e_msgbs + e.e_data_harq)) < tol);
    CHECK(std::fabs(two.outcome_energy(Outcome::LostToOtherCapture, 0) - (e.e_msga + e.e_msgbf)) < tol);
    CHECK(std::fabs(two.outcome_energy(Outcome::FallbackWon, 1) -
                    (e.e_msga + e.e_msgbfb + e.e_msg3 + e.e_msg4s + e.e_data_harq)) < tol);
    CHECK(std::fabs(two_sdt.outcome_energy(Outcome::FallbackLost, 0) -
                    (e.e_msga + e.e_data + e.e_msgbfb + e.e_msg3 + e.e_msg4f)) < tol);
    CHECK(std::fabs(two_sdt.outcome_energy(Outcome::Captured, 0) - (e.e_msga + e.e_data + e.e_msgbs)) < tol);
    CHECK_THROWS(four.outcome_energy(Outcome::FallbackWon, 1));
}
