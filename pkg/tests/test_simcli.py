from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from simauction.distribution import MarginalDist, induced_bid_distribution
from simauction.interim import win_probs
from simauction.simcli import (
    Scenario,
    ScenarioError,
    UtilityConfig,
    cli_main,
    load_scenario,
    parse_scenario,
    run_simulation,
    scenario_to_toml,
)
from simauction.strategy import constant_strategy, random_monotone, to_csv

from helpers import bp


BASE_TOML = """\
n = 4
m = 5
seed = 7
u_bar = "1"
distribution = "uniform"
utility = { kind = "additive", alpha = "0.3" }
max_iter = 50
init = "half_value"
strategy_samples = 20
"""


@pytest.fixture
def scenario_file(tmp_path) -> Path:
    path = tmp_path / "scenario.toml"
    path.write_text(BASE_TOML)
    return path


class TestScenarioParsing:
    def test_parse_fields(self):
        s = parse_scenario(BASE_TOML)
        assert (s.n, s.m, s.seed) == (4, 5, 7)
        assert s.u_bar == Fraction(1)
        assert s.utility == UtilityConfig(kind="additive", alpha=Fraction(3, 10))
        assert s.distribution == MarginalDist.uniform()

    def test_roundtrip_equality(self):
        for text in (
            BASE_TOML,
            'n = 2\nm = 3\nutility = { kind = "multiplicative" }\n',
            'n = 2\nm = 3\nutility = { kind = "polynomial", coefficients = [["0", "1"], ["1", "1/2"]] }\n'
            'distribution = { kind = "piecewise", knots = [[0.0, 0.0], [0.5, 0.8], [1.0, 1.0]] }\n',
        ):
            s = parse_scenario(text)
            assert parse_scenario(scenario_to_toml(s)) == s

    def test_missing_required_field_named(self):
        with pytest.raises(ScenarioError, match="'m'"):
            parse_scenario('n = 2\nutility = { kind = "multiplicative" }\n')

    def test_unknown_key_named(self):
        with pytest.raises(ScenarioError, match="'bogus'"):
            parse_scenario(BASE_TOML + "bogus = 3\n")

    def test_misaligned_grid_rejected(self):
        # u(1,1) = 2.3 is not a multiple of 1/4
        with pytest.raises(ScenarioError, match="lattice"):
            parse_scenario('n = 4\nm = 3\nutility = { kind = "additive", alpha = "0.3" }\n')

    def test_u_bar_above_joint_value_rejected(self):
        with pytest.raises(ScenarioError, match="exceeds"):
            parse_scenario('n = 2\nm = 3\nu_bar = "3"\nutility = { kind = "additive", alpha = "0.3" }\n')

    def test_alpha_as_float_means_decimal(self):
        s = parse_scenario('n = 10\nm = 3\nutility = { kind = "additive", alpha = 0.3 }\n')
        assert s.utility.alpha == Fraction(3, 10)

    def test_bad_init_rule(self):
        with pytest.raises(ScenarioError, match="init"):
            parse_scenario(BASE_TOML.replace('init = "half_value"', 'init = "other"'))

    def test_boolean_alpha_rejected(self):
        with pytest.raises(ScenarioError, match="boolean"):
            parse_scenario('n = 2\nm = 3\nutility = { kind = "additive", alpha = true }\n')

    def test_negative_seed_rejected(self):
        with pytest.raises(ScenarioError, match="seed"):
            parse_scenario(BASE_TOML.replace("seed = 7", "seed = -1"))


class TestRunSimulation:
    def test_all_ties_quarter_frequency(self, scenario_file):
        inst = load_scenario(scenario_file).build()
        s = constant_strategy(inst.grid, bp(0, 0))
        stats = run_simulation(inst, s, s, draws=100_000)
        for side in (0, 1):
            f = stats.frequencies[side]
            for share in f.as_tuple():
                se = (0.25 * 0.75 / stats.draws) ** 0.5
                assert abs(share - 0.25) <= 3 * se
            assert abs(sum(f.as_tuple()) - 1.0) <= 1e-12
        assert stats.mean_revenue == 0.0

    def test_dominant_bidder_wins_everything(self, scenario_file):
        inst = load_scenario(scenario_file).build()
        s1 = constant_strategy(inst.grid, bp("1/2", "1/2"))
        s2 = constant_strategy(inst.grid, bp(0, 0))
        stats = run_simulation(inst, s1, s2, draws=5_000)
        assert stats.frequencies[0].both == 1.0
        assert stats.frequencies[1].neither == 1.0
        assert stats.mean_revenue == pytest.approx(1.0)
        assert 0.0 <= stats.efficiency <= 1.0

    def test_frequencies_match_interim_probabilities(self, scenario_file):
        inst = load_scenario(scenario_file).build()
        s1 = random_monotone(inst.grid, inst.bids, 11)
        s2 = random_monotone(inst.grid, inst.bids, 12)
        draws = 100_000
        stats = run_simulation(inst, s1, s2, draws=draws)
        for side, (own, opp) in enumerate(((s1, s2), (s2, s1))):
            mu = induced_bid_distribution(opp, inst.grid, inst.bids)
            p_both = p_only1 = p_only2 = 0.0
            for t, w in enumerate(inst.grid.weights):
                wp = win_probs(mu, own[t])
                p_both += w * wp.p3
                p_only1 += w * wp.p1
                p_only2 += w * wp.p2
            f = stats.frequencies[side]
            for share, p in ((f.both, p_both), (f.only1, p_only1), (f.only2, p_only2)):
                se = (p * (1 - p) / draws) ** 0.5
                assert abs(share - p) <= 3 * se + 1e-12

    def test_deterministic_and_worker_invariant(self, scenario_file, monkeypatch):
        inst = load_scenario(scenario_file).build()
        s1 = random_monotone(inst.grid, inst.bids, 1)
        s2 = random_monotone(inst.grid, inst.bids, 2)
        a = run_simulation(inst, s1, s2, draws=60_000)
        b = run_simulation(inst, s1, s2, draws=60_000)
        assert a == b
        monkeypatch.setenv("SIMAUCTION_WORKERS", "3")
        c = run_simulation(inst, s1, s2, draws=60_000)
        assert a == c

    def test_matches_allocation_loop(self, scenario_file):
        # replay the same draws through the scalar allocation path
        from simauction.model import allocate
        from simauction.simcli import _shard_sums

        inst = load_scenario(scenario_file).build()
        scn = inst.scenario
        s1 = random_monotone(inst.grid, inst.bids, 21)
        s2 = random_monotone(inst.grid, inst.bids, 22)
        draws = 400
        counts, *_ = _shard_sums(scn, s1.bids, s2.bids, draws, 0)

        rng = np.random.default_rng([scn.seed, 0])
        t1 = rng.choice(len(inst.grid), size=draws, p=inst.grid.weights_array)
        t2 = rng.choice(len(inst.grid), size=draws, p=inst.grid.weights_array)
        coins = rng.integers(0, 2, size=(draws, 2)).astype(bool)
        expect = np.zeros((2, 4), dtype=int)
        for k in range(draws):
            a1 = allocate(s1[int(t1[k])], s2[int(t2[k])], bool(coins[k, 0]), bool(coins[k, 1]))
            for side, (w1, w2) in enumerate(((a1.won1, a1.won2), (not a1.won1, not a1.won2))):
                col = 0 if (w1 and w2) else 1 if w1 else 2 if w2 else 3
                expect[side, col] += 1
        assert (counts == expect).all()


class TestCli:
    def test_solve_and_outputs(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli_main(["solve", str(scenario_file), "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "status=exact_equilibrium" in printed
        summary = (out / "summary.csv").read_text().splitlines()
        assert summary[0] == "status,iterations,max_regret,cycle_period"
        assert summary[1].startswith("exact_equilibrium,")
        assert (out / "strategy_bidder1.csv").exists()
        body = (out / "solution_bidder1.csv").read_text().splitlines()
        assert body[0] == "x1,x2,b1,b2,regret"
        assert len(body) == 1 + 25

    def test_verify_clean_exit_zero(self, scenario_file, tmp_path):
        out = tmp_path / "v"
        assert cli_main(["verify", str(scenario_file), "--out", str(out)]) == 0
        table = (out / "table1.csv").read_text().splitlines()
        assert len(table) == 1 + 45
        witnesses = (out / "witnesses.csv").read_text().splitlines()
        assert len(witnesses) == 1  # header only

    def test_verify_violating_spec_exit_two(self, tmp_path):
        # polynomial with decaying synergy: valid A1/A2, broken A3
        scen = tmp_path / "bad.toml"
        scen.write_text(
            'n = 4\nm = 5\nseed = 0\nu_bar = "1"\nstrategy_samples = 40\n'
            'utility = { kind = "polynomial", coefficients = [["0", "1", "0"], ["1", "1", "-3/4"]] }\n'
        )
        out = tmp_path / "v"
        assert cli_main(["verify", str(scen), "--out", str(out)]) == 2
        witnesses = (out / "witnesses.csv").read_text().splitlines()
        assert len(witnesses) > 1

    def test_verify_byte_identical_reruns(self, scenario_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli_main(["verify", str(scenario_file), "--out", str(out1)]) == 0
        assert cli_main(["verify", str(scenario_file), "--out", str(out2)]) == 0
        for name in ("table1.csv", "table1.txt", "witnesses.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_solve_byte_identical_reruns(self, scenario_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli_main(["solve", str(scenario_file), "--out", str(out1)]) == 0
        assert cli_main(["solve", str(scenario_file), "--out", str(out2)]) == 0
        for name in ("summary.csv", "solution_bidder1.csv", "strategy_bidder2.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_config_error_exit_one(self, tmp_path, capsys):
        scen = tmp_path / "bad.toml"
        scen.write_text('n = 4\nm = 3\nutility = { kind = "additive", alpha = "0.3" }\n')
        assert cli_main(["verify", str(scen), "--out", str(tmp_path / "o")]) == 1
        assert "lattice" in capsys.readouterr().err

    def test_probe_tie_arithmetic(self, scenario_file, tmp_path, capsys):
        # opponent strategy: constant zero bids
        inst = load_scenario(scenario_file).build()
        opp = tmp_path / "opp.csv"
        opp.write_text(to_csv(constant_strategy(inst.grid, bp(0, 0)), inst.grid))
        code = cli_main(
            ["probe", str(scenario_file), "--b1", "0", "--b2", "0", "--x1", "0.5", "--x2", "0.5",
             "--opponent", str(opp)]
        )
        assert code == 0
        header, row = capsys.readouterr().out.strip().splitlines()
        assert header == "b1,b2,q1,q2,q3,p1,p2,p3,V"
        cells = dict(zip(header.split(","), row.split(",")))
        assert float(cells["q1"]) == pytest.approx(0.5, abs=1e-12)
        assert float(cells["q2"]) == pytest.approx(0.5, abs=1e-12)
        assert float(cells["q3"]) == pytest.approx(0.25, abs=1e-12)

    def test_probe_off_grid_bid_is_config_error(self, scenario_file):
        assert (
            cli_main(["probe", str(scenario_file), "--b1", "1/3", "--b2", "0", "--x1", "0.5", "--x2", "0.5"]) == 1
        )

    def test_enumerate_tiny_instance(self, tmp_path, capsys):
        scen = tmp_path / "tiny.toml"
        scen.write_text('n = 2\nm = 1\nseed = 0\nu_bar = "1"\nutility = { kind = "additive", alpha = "0" }\n')
        out = tmp_path / "e"
        assert cli_main(["enumerate", str(scen), "--out", str(out)]) == 0
        assert (out / "equilibria.csv").exists()
        assert "monotone strategies" in capsys.readouterr().out

    def test_binary_entry_point(self, scenario_file, tmp_path):
        # the installed module must honor the exit-code contract end to end
        import subprocess
        import sys

        done = subprocess.run(
            [sys.executable, "-m", "simauction", "probe", str(scenario_file),
             "--b1", "1/4", "--b2", "1/2", "--x1", "0.3", "--x2", "0.9"],
            capture_output=True,
            text=True,
        )
        assert done.returncode == 0
        assert done.stdout.startswith("b1,b2,q1,q2,q3,p1,p2,p3,V")
        bad = subprocess.run(
            [sys.executable, "-m", "simauction", "solve", str(tmp_path / "missing.toml")],
            capture_output=True,
            text=True,
        )
        assert bad.returncode == 1

    def test_simulate_with_supplied_strategies(self, scenario_file, tmp_path):
        inst = load_scenario(scenario_file).build()
        p1 = tmp_path / "s1.csv"
        p2 = tmp_path / "s2.csv"
        p1.write_text(to_csv(constant_strategy(inst.grid, bp("1/2", "1/2")), inst.grid))
        p2.write_text(to_csv(constant_strategy(inst.grid, bp(0, 0)), inst.grid))
        out = tmp_path / "s"
        code = cli_main(
            ["simulate", str(scenario_file), "--draws", "2000", "--out", str(out),
             "--strategy1", str(p1), "--strategy2", str(p2)]
        )
        assert code == 0
        rows = (out / "simulation_frequencies.csv").read_text().splitlines()
        assert rows[1].startswith("1,1,")  # bidder 1 wins both always
